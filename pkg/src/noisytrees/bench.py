"""Reproducible noise-robustness experiments with CSV output.

The harness sweeps noise models over datasets and learners, repeating
each cell with repeat-derived seeds and reporting mean and standard
deviation of clean-test accuracy in percent. Two data protocols are
supported: the split protocol (generate or load one pool, shuffle into
60/20/20 train/validation/test) and the direct protocol (generate a
training set of a requested size plus a fixed clean test set), used by
the leaf-size and training-size sweeps.

Noise only ever touches training (and validation) labels; accuracy is
always measured against labels that never passed through injection.
"""

from __future__ import annotations

import csv
import functools
import io
from dataclasses import dataclass, field

import numpy as np

from .datasets import (
    DEFAULT_SIZES,
    Dataset,
    SplitSpec,
    generate_checkerboard,
    generate_imbalanced_linear,
    load_table,
    split_dataset,
)
from .forest import ForestClassifier
from .noise import inject_noise, parse_noise_model
from .tree import TreeClassifier

# seed-derivation stream tags
_DATA, _SPLIT, _TEST, _NOISE, _LEARNER = range(5)

_SPLIT_SPEC = (0.6, 0.2, 0.2)


def derive_seed(*parts: int) -> int:
    """Deterministic child seed from a tuple of nonnegative integers."""
    ss = np.random.SeedSequence([int(p) for p in parts])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def scaled_min_leaf(train_size: int) -> int:
    """Leaf-size rule for the training-size sweep: n // 20, at least 1.

    Keeps leaf occupancy proportional to the training size, so the
    flip-survival exponent of a leaf grows linearly with n.
    """
    return max(1, train_size // 20)


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: datasets x learners x noise models, repeated.

    datasets entries are generator names (cb2, cb4, imb3, imb4 at their
    standard benchmark sizes, or cb2:<n> to override) or file:<path>.
    learners entries are tree:<criterion>, forest:<criterion>[,<trees>],
    or prf:<k_splits>[,<trees>]. noise entries use the model syntax of
    noise.parse_noise_model. train_size switches to the direct protocol.
    """

    datasets: tuple[str, ...] = ("cb2",)
    noise: tuple[str, ...] = ("sym:0",)
    learners: tuple[str, ...] = ("tree:gini",)
    min_leaf: int = 250
    repeats: int = 10
    seed: int = 0
    train_size: int | None = None
    test_size: int = 4000
    n_jobs: int | None = None

    def __post_init__(self):
        for name in ("datasets", "noise", "learners"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")
        if not self.datasets or not self.noise or not self.learners:
            raise ValueError("datasets, noise, and learners must be non-empty")
        for spec in self.noise:
            parse_noise_model(spec)
        for spec in self.learners:
            build_learner(spec, min_leaf=1, seed=0)
        for spec in self.datasets:
            _parse_dataset_spec(spec)


@dataclass(frozen=True)
class ResultRow:
    dataset: str
    learner: str
    noise: str
    mean: float
    std: float
    repeats: int


@dataclass(frozen=True)
class RunRecord:
    dataset: str
    learner: str
    noise: str
    repeat: int
    accuracy: float


@dataclass
class ResultTable:
    rows: list[ResultRow] = field(default_factory=list)
    runs: list[RunRecord] = field(default_factory=list)

    def row(self, dataset: str, learner: str, noise: str) -> ResultRow:
        for row in self.rows:
            if (row.dataset, row.learner, row.noise) == (dataset, learner, noise):
                return row
        raise KeyError(f"no row for {(dataset, learner, noise)}")

    def extend(self, other: "ResultTable") -> None:
        self.rows.extend(other.rows)
        self.runs.extend(other.runs)


# ---------------------------------------------------------------------------
# dataset and learner specs
# ---------------------------------------------------------------------------

_GENERATORS = {
    "cb2": functools.partial(generate_checkerboard, 2),
    "cb4": functools.partial(generate_checkerboard, 4),
    "imb3": functools.partial(generate_imbalanced_linear, 3),
    "imb4": functools.partial(generate_imbalanced_linear, 4),
}


def _parse_dataset_spec(spec: str):
    """Returns (kind, payload): ('gen', (name, n)) or ('file', path)."""
    if spec.startswith("file:"):
        return "file", spec[len("file:"):]
    name, _, size = spec.partition(":")
    if name not in _GENERATORS:
        raise ValueError(
            f"unknown dataset {spec!r}; expected one of {sorted(_GENERATORS)}, "
            "optionally with :<n>, or file:<path>"
        )
    n = int(size) if size else DEFAULT_SIZES[name]
    if n < 1:
        raise ValueError(f"dataset size must be positive in {spec!r}")
    return "gen", (name, n)


def build_learner(spec: str, *, min_leaf: int, seed: int, n_jobs: int | None = None):
    """Instantiate an estimator from its sweep spec string."""
    head, _, rest = spec.partition(":")
    try:
        if head == "tree" and rest:
            _check_criterion(spec, rest)
            return TreeClassifier(criterion=rest, min_leaf=min_leaf, seed=seed)
        if head == "forest" and rest:
            criterion, _, trees = rest.partition(",")
            _check_criterion(spec, criterion)
            return ForestClassifier(
                n_trees=int(trees) if trees else 100,
                criterion=criterion,
                min_leaf=min_leaf,
                bootstrap=True,
                seed=seed,
                n_jobs=n_jobs,
            )
        if head == "prf" and rest:
            k, _, trees = rest.partition(",")
            return ForestClassifier(
                n_trees=int(trees) if trees else 100,
                mode="purely_random",
                k_splits=int(k),
                seed=seed,
                n_jobs=n_jobs,
            )
    except ValueError as exc:
        raise ValueError(f"bad learner {spec!r}: {exc}") from None
    raise ValueError(
        f"bad learner {spec!r}; expected tree:<criterion>, "
        "forest:<criterion>[,<n_trees>] or prf:<k_splits>[,<n_trees>]"
    )


def _check_criterion(spec: str, criterion: str) -> None:
    from .criteria import CRITERIA

    if criterion not in CRITERIA:
        raise ValueError(f"bad learner {spec!r}: unknown criterion {criterion!r}")


# ---------------------------------------------------------------------------
# sweep engine
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=8)
def _load_file_dataset(path: str) -> Dataset:
    return load_table(path)


def _repeat_data(cfg, d_idx, dataset_spec, repeat, train_size):
    """Train/validation/test datasets for one repeat.

    Split protocol (train_size None): regenerate the full pool and
    shuffle it 60/20/20. Direct protocol: generate a training set of
    train_size points and a clean test set of cfg.test_size points
    whose seed does not depend on the training size.
    """
    kind, payload = _parse_dataset_spec(dataset_spec)
    data_seed = derive_seed(cfg.seed, _DATA, d_idx, repeat)
    if train_size is None:
        if kind == "gen":
            name, n = payload
            pool = _GENERATORS[name](n, data_seed)
        else:
            pool = _load_file_dataset(payload)
        spec = SplitSpec(*_SPLIT_SPEC, seed=derive_seed(cfg.seed, _SPLIT, d_idx, repeat))
        return split_dataset(pool, spec)
    test_seed = derive_seed(cfg.seed, _TEST, d_idx, repeat)
    if kind == "gen":
        name, _ = payload
        train = _GENERATORS[name](train_size, data_seed)
        test = _GENERATORS[name](cfg.test_size, test_seed)
        return train, None, test
    pool = _load_file_dataset(payload)
    if pool.n < train_size + cfg.test_size:
        raise ValueError(
            f"{payload}: {pool.n} rows cannot supply train_size={train_size} "
            f"plus test_size={cfg.test_size}"
        )
    perm = np.random.default_rng(data_seed).permutation(pool.n)
    return pool.subset(perm[:train_size]), None, pool.subset(perm[train_size:train_size + cfg.test_size])


def _noise_matrix(
    cfg: ExperimentConfig,
    *,
    min_leaf: int,
    train_size: int | None,
    dataset_label=lambda s: s,
    learner_label=lambda s: s,
) -> ResultTable:
    """Run the full datasets x noise x learners grid once."""
    table = ResultTable()
    for d_idx, dataset_spec in enumerate(cfg.datasets):
        accs = np.empty((len(cfg.learners), len(cfg.noise), cfg.repeats))
        for repeat in range(cfg.repeats):
            train, val, test = _repeat_data(cfg, d_idx, dataset_spec, repeat, train_size)
            for n_idx, noise_spec in enumerate(cfg.noise):
                model = parse_noise_model(noise_spec)
                noisy = inject_noise(
                    train, model, derive_seed(cfg.seed, _NOISE, d_idx, repeat, n_idx, 0)
                )
                if val is not None:
                    # mirrors the protocol; no hyperparameter is tuned on it
                    inject_noise(
                        val, model, derive_seed(cfg.seed, _NOISE, d_idx, repeat, n_idx, 1)
                    )
                for l_idx, learner_spec in enumerate(cfg.learners):
                    learner = build_learner(
                        learner_spec,
                        min_leaf=min_leaf,
                        seed=derive_seed(cfg.seed, _LEARNER, d_idx, repeat, n_idx, l_idx),
                        n_jobs=cfg.n_jobs,
                    )
                    learner.fit(noisy.X, noisy.y)
                    accuracy = 100.0 * float(
                        np.mean(learner.predict(test.X) == test.y)
                    )
                    accs[l_idx, n_idx, repeat] = accuracy
        for l_idx, learner_spec in enumerate(cfg.learners):
            for n_idx, noise_spec in enumerate(cfg.noise):
                cell = accs[l_idx, n_idx]
                table.rows.append(ResultRow(
                    dataset=dataset_label(dataset_spec),
                    learner=learner_label(learner_spec),
                    noise=noise_spec,
                    mean=float(cell.mean()),
                    std=float(cell.std(ddof=1)) if cfg.repeats > 1 else 0.0,
                    repeats=cfg.repeats,
                ))
                table.runs.extend(
                    RunRecord(dataset_label(dataset_spec), learner_label(learner_spec),
                              noise_spec, r, float(cell[r]))
                    for r in range(cfg.repeats)
                )
    return table


def run_noise_sweep(cfg: ExperimentConfig) -> ResultTable:
    """Noise models x learners x datasets at the configured leaf size."""
    return _noise_matrix(cfg, min_leaf=cfg.min_leaf, train_size=cfg.train_size)


def run_leaf_size_sweep(cfg: ExperimentConfig, leaf_sizes) -> ResultTable:
    """Repeat the noise sweep for every leaf size at fixed training size.

    Uses the direct protocol with cfg.train_size (default 20000). The
    leaf size is appended to the learner column as :leaf=<m>. Data,
    noise, and learner seeds do not depend on the leaf size, so the
    m = cfg.min_leaf cells coincide with run_noise_sweep on the same
    config.
    """
    train_size = cfg.train_size if cfg.train_size is not None else 20000
    table = ResultTable()
    for m in leaf_sizes:
        table.extend(_noise_matrix(
            cfg, min_leaf=int(m), train_size=train_size,
            learner_label=lambda s, m=m: f"{s}:leaf={m}",
        ))
    return table


def run_training_size_sweep(
    cfg: ExperimentConfig, sizes, min_leaf: int | None = None
) -> ResultTable:
    """Repeat the noise sweep for every training size with a fixed clean
    test set of cfg.test_size points.

    min_leaf None applies scaled_min_leaf(size) per point; an explicit
    value is used unchanged for every size. The size is appended to the
    dataset column as :n=<size>.
    """
    table = ResultTable()
    for size in sizes:
        size = int(size)
        table.extend(_noise_matrix(
            cfg,
            min_leaf=min_leaf if min_leaf is not None else scaled_min_leaf(size),
            train_size=size,
            dataset_label=lambda s, size=size: f"{s}:n={size}",
        ))
    return table


# ---------------------------------------------------------------------------
# CSV output
# ---------------------------------------------------------------------------

TABLE_COLUMNS = ("dataset", "learner", "noise", "mean", "std", "repeats")
RUNS_COLUMNS = ("dataset", "learner", "noise", "repeat", "accuracy")


def _csv_line(cells) -> str:
    # minimal quoting keeps field-internal commas (cc:0.4,0.2) parseable
    out = io.StringIO()
    csv.writer(out, lineterminator="").writerow(cells)
    return out.getvalue()


def table_to_lines(rt: ResultTable) -> list[str]:
    lines = [_csv_line(TABLE_COLUMNS)]
    for r in rt.rows:
        lines.append(_csv_line(
            (r.dataset, r.learner, r.noise, f"{r.mean:.2f}", f"{r.std:.2f}", r.repeats)
        ))
    return lines


def runs_to_lines(rt: ResultTable) -> list[str]:
    lines = [_csv_line(RUNS_COLUMNS)]
    for r in rt.runs:
        lines.append(_csv_line(
            (r.dataset, r.learner, r.noise, r.repeat, repr(r.accuracy))
        ))
    return lines


def emit_table(rt: ResultTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(table_to_lines(rt)) + "\n")


def emit_runs(rt: ResultTable, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(runs_to_lines(rt)) + "\n")
