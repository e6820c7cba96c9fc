"""Command-line front end.

Subcommands: generate, noise, train, eval, sweep, leaf-sweep,
size-sweep, bounds, counterexample, selftest. Exit codes: 0 success,
2 configuration or usage error, 3 an asserted property failed (for
example a bound was not dominated).

Sweep options can come from a plain key-value config file
(key = value, '#' comments, lists separated by ';') and every key is
mirrored by a command-line flag; flags win over the file.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bench, bounds
from .datasets import load_table, save_dataset
from .forest import ForestClassifier, forest_from_text, forest_predict, forest_to_text
from .noise import inject_noise, parse_noise_model
from .tree import tree_from_text, tree_predict, tree_to_text

CONFIG_ERROR = 2
CHECK_FAILED = 3

_LABEL_MAP_HELP = (
    "label columns may hold any two raw values; the numerically larger value "
    "(or, for non-numeric values, the lexicographically larger one) maps to +1"
)


class CliError(Exception):
    """Configuration or usage problem; exits with status 2."""


def _parse_config_file(path: str) -> dict[str, str]:
    mapping = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise CliError(f"cannot read config {path}: {exc}") from None
    for i, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{i}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not key:
            raise CliError(f"{path}:{i}: empty key")
        mapping[key] = value.strip()
    return mapping


_LIST_KEYS = {"datasets", "noise", "learners", "leaf_sizes", "train_sizes"}
_INT_KEYS = {"min_leaf", "repeats", "seed", "train_size", "test_size", "n_jobs"}


def _sweep_config(args) -> tuple[bench.ExperimentConfig, dict]:
    """Merge config file and flags into an ExperimentConfig plus extras."""
    values: dict = {}
    if args.config:
        for key, raw in _parse_config_file(args.config).items():
            if key in _LIST_KEYS:
                values[key] = tuple(v.strip() for v in raw.split(";") if v.strip())
            elif key in _INT_KEYS:
                try:
                    values[key] = int(raw)
                except ValueError:
                    raise CliError(f"config key {key}: expected an integer, got {raw!r}")
            elif key == "out":
                values[key] = raw
            else:
                raise CliError(f"unknown config key {key!r}")
    for key in ("datasets", "noise", "learners", "leaf_sizes", "train_sizes"):
        flag = getattr(args, key, None)
        if flag:
            values[key] = tuple(v.strip() for v in flag.split(";") if v.strip())
    for key in ("min_leaf", "repeats", "seed", "train_size", "test_size", "n_jobs"):
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if getattr(args, "out", None):
        values["out"] = args.out

    if "seed" not in values:
        raise CliError("a seed is required (--seed or seed = ... in the config)")
    extras = {
        "out": values.pop("out", None),
        "leaf_sizes": values.pop("leaf_sizes", None),
        "train_sizes": values.pop("train_sizes", None),
        "min_leaf_set": "min_leaf" in values,
    }
    try:
        return bench.ExperimentConfig(**values), extras
    except (TypeError, ValueError) as exc:
        raise CliError(str(exc)) from None


def _write_outputs(table: bench.ResultTable, out: str | None, runs_out: str | None):
    if out:
        bench.emit_table(table, out)
    else:
        for line in bench.table_to_lines(table):
            print(line)
    if runs_out:
        bench.emit_runs(table, runs_out)


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_generate(args) -> int:
    spec = args.dataset if ":" in args.dataset or args.n is None else f"{args.dataset}:{args.n}"
    kind, payload = bench._parse_dataset_spec(spec)
    if kind != "gen":
        raise CliError("generate needs a generator name, not a file")
    name, n = payload
    ds = bench._GENERATORS[name](n, args.seed)
    save_dataset(ds, args.out)
    print(f"wrote {ds.n} samples ({name}, d={ds.d}) to {args.out}")
    return 0


def _cmd_noise(args) -> int:
    ds = load_table(args.data, delimiter=args.delimiter, label_column=args.label_column)
    model = parse_noise_model(args.model)
    noisy = inject_noise(ds, model, args.seed)
    save_dataset(noisy.data, args.out)
    flipped = int(noisy.flip_mask.sum())
    print(f"wrote {noisy.n} samples to {args.out} ({flipped} labels flipped)")
    if args.mask_out:
        with open(args.mask_out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("flipped\n")
            fh.write("\n".join(str(int(v)) for v in noisy.flip_mask) + "\n")
    return 0


def _cmd_train(args) -> int:
    ds = load_table(args.data, delimiter=args.delimiter, label_column=args.label_column)
    learner = bench.build_learner(
        args.learner, min_leaf=args.min_leaf, seed=args.seed, n_jobs=args.n_jobs
    )
    if args.max_depth is not None:
        learner.set_params(max_depth=args.max_depth)
    learner.fit(ds.X, ds.y)
    if isinstance(learner, ForestClassifier):
        text = forest_to_text(learner.trees_, learner.mode)
    else:
        text = tree_to_text(learner.tree_)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    print(f"trained {args.learner} on {ds.n} samples; model written to {args.out}")
    return 0


def _cmd_eval(args) -> int:
    ds = load_table(args.data, delimiter=args.delimiter, label_column=args.label_column)
    with open(args.model, "r", encoding="utf-8") as fh:
        text = fh.read()
    if text.startswith("FOREST "):
        trees, _ = forest_from_text(text)
        predictions = forest_predict(trees, ds.X)
    else:
        predictions = tree_predict(tree_from_text(text), ds.X)
    accuracy = 100.0 * float(np.mean(predictions == ds.y))
    print(f"accuracy {accuracy:.2f} on {ds.n} samples")
    return 0


def _cmd_sweep(args) -> int:
    cfg, extras = _sweep_config(args)
    table = bench.run_noise_sweep(cfg)
    _write_outputs(table, extras["out"], args.runs_out)
    return 0


def _cmd_leaf_sweep(args) -> int:
    cfg, extras = _sweep_config(args)
    if not extras["leaf_sizes"]:
        raise CliError("leaf-sweep needs --leaf-sizes (or leaf_sizes = ... in the config)")
    sizes = [int(v) for v in extras["leaf_sizes"]]
    table = bench.run_leaf_size_sweep(cfg, sizes)
    _write_outputs(table, extras["out"], args.runs_out)
    return 0


def _cmd_size_sweep(args) -> int:
    cfg, extras = _sweep_config(args)
    if not extras["train_sizes"]:
        raise CliError("size-sweep needs --train-sizes (or train_sizes = ... in the config)")
    sizes = [int(v) for v in extras["train_sizes"]]
    # without an explicit min_leaf the scaled n//16 rule applies per size
    min_leaf = cfg.min_leaf if extras["min_leaf_set"] else None
    table = bench.run_training_size_sweep(cfg, sizes, min_leaf=min_leaf)
    _write_outputs(table, extras["out"], args.runs_out)
    return 0


# leaf margins can span (0, 1]; split-gain gaps are capped by the
# criterion (0.25 for twoing), so the split grid uses smaller rho values
LEAF_RHO_GRID = (0.1, 0.2, 0.5)
SPLIT_RHO_GRID = (0.05, 0.1, 0.2)
ETA_GRID = (0.1, 0.25, 0.4)
DELTA_GRID = (0.05, 0.1)


def _cmd_bounds(args) -> int:
    criteria_list = ("leaf", "gini", "mc", "twoing") if args.criterion == "all" else (args.criterion,)
    print("criterion,rho,eta,delta,n,empirical_rate,verdict")
    failed = False
    for criterion in criteria_list:
        rho_grid = LEAF_RHO_GRID if criterion == "leaf" else SPLIT_RHO_GRID
        for rho in rho_grid:
            for eta in ETA_GRID:
                for delta in DELTA_GRID:
                    q = bounds.BoundQuery(rho=rho, eta=eta, delta=delta, criterion=criterion)
                    if criterion == "leaf":
                        n = bounds.leaf_sample_bound(q)
                        rate = bounds.validate_leaf_bound(q, trials=args.trials, seed=args.seed)
                    else:
                        n = bounds.split_sample_bound(q)
                        strong, weak = bounds.make_split_fixture(q)
                        rate = bounds.validate_split_bound(
                            q, strong, weak, trials=args.trials, seed=args.seed
                        )
                    ok = rate <= bounds.dominance_envelope(args.trials, delta)
                    failed = failed or not ok
                    print(f"{criterion},{rho},{eta},{delta},{n},{rate:.6f},"
                          f"{'pass' if ok else 'FAIL'}")
    return CHECK_FAILED if failed else 0


def _cmd_counterexample(args) -> int:
    report = bounds.entropy_counterexample()
    print(f"entropy gain, even split:     clean {report.clean_even:.6f}  "
          f"eta={report.eta:g} {report.noisy_even:.6f}")
    print(f"entropy gain, lopsided split: clean {report.clean_lopsided:.6f}  "
          f"eta={report.eta:g} {report.noisy_lopsided:.6f}")
    print(f"clean ranking prefers the lopsided split: {report.clean_prefers_lopsided}")
    print(f"noisy ranking prefers the even split:     {report.noisy_prefers_even}")
    if not report.ranking_flips:
        print("expected the entropy ranking to flip; it did not", file=sys.stderr)
        return CHECK_FAILED
    print("entropy ranking flips under noise: confirmed")
    return 0


def _cmd_selftest(args) -> int:
    from . import selftest

    return 0 if selftest.run(seed=args.seed) else CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisytrees",
        description="Decision trees and forests under label noise: data "
                    "generation, training, bounds, and benchmark sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_table_args(p):
        p.add_argument("--delimiter", default=",", help="cell delimiter (default comma)")
        p.add_argument("--label-column", type=int, default=-1,
                       help=f"label column index (default last); {_LABEL_MAP_HELP}")

    p = sub.add_parser("generate", help="write a synthetic dataset CSV")
    p.add_argument("--dataset", required=True,
                   help="cb2|cb4|imb3|imb4, optionally with :<n>")
    p.add_argument("--n", type=int, default=None, help="sample count override")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(handler=_cmd_generate)

    p = sub.add_parser("noise", help="inject label noise into a dataset CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True,
                   help="sym:<eta> | cc:<eta+>,<eta-> | nu:affine:<offset>,<slope>")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--mask-out", default=None, help="also write the flip mask")
    add_table_args(p)
    p.set_defaults(handler=_cmd_noise)

    p = sub.add_parser("train", help="fit a tree or forest and serialize it")
    p.add_argument("--data", required=True)
    p.add_argument("--learner", required=True,
                   help="tree:<criterion> | forest:<criterion>[,<n_trees>] | "
                        "prf:<k_splits>[,<n_trees>]")
    p.add_argument("--min-leaf", type=int, default=1)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-jobs", type=int, default=None)
    p.add_argument("--out", required=True)
    add_table_args(p)
    p.set_defaults(handler=_cmd_train)

    p = sub.add_parser("eval", help="accuracy of a serialized model on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    add_table_args(p)
    p.set_defaults(handler=_cmd_eval)

    def add_sweep_args(p):
        p.add_argument("--config", default=None, help="key = value file; lists use ';'")
        p.add_argument("--datasets", default=None, help="';'-separated dataset specs")
        p.add_argument("--noise", default=None, help="';'-separated noise models")
        p.add_argument("--learners", default=None, help="';'-separated learner specs")
        p.add_argument("--min-leaf", type=int, default=None)
        p.add_argument("--repeats", type=int, default=None)
        p.add_argument("--seed", type=int, default=None, required=False)
        p.add_argument("--train-size", type=int, default=None)
        p.add_argument("--test-size", type=int, default=None)
        p.add_argument("--n-jobs", type=int, default=None)
        p.add_argument("--out", default=None, help="result CSV (default: stdout)")
        p.add_argument("--runs-out", default=None, help="per-run log CSV")

    p = sub.add_parser("sweep", help="noise sweep over datasets and learners")
    add_sweep_args(p)
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("leaf-sweep", help="noise sweep repeated per leaf size")
    add_sweep_args(p)
    p.add_argument("--leaf-sizes", default=None, help="';'-separated leaf sizes")
    p.set_defaults(handler=_cmd_leaf_sweep)

    p = sub.add_parser("size-sweep", help="noise sweep repeated per training size")
    add_sweep_args(p)
    p.add_argument("--train-sizes", default=None, help="';'-separated training sizes")
    p.set_defaults(handler=_cmd_size_sweep)

    p = sub.add_parser("bounds", help="print sample bounds and their Monte Carlo check")
    p.add_argument("--criterion", default="all",
                   choices=("all", "leaf", "gini", "mc", "twoing"))
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=_cmd_bounds)

    p = sub.add_parser("counterexample",
                       help="show the entropy ranking flip at eta=0.4")
    p.set_defaults(handler=_cmd_counterexample)

    p = sub.add_parser("selftest", help="run quick built-in consistency checks")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(handler=_cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CONFIG_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
