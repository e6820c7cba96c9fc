"""Quick built-in consistency checks behind the selftest subcommand.

These are smoke checks, not the full test suite: closed-form noise
scaling, generator determinism, split partitioning, the entropy ranking
flip, and one small bound dominance run.
"""

from __future__ import annotations

import numpy as np

from . import bounds, criteria
from .datasets import SplitSpec, generate_checkerboard, split_dataset
from .noise import inject_noise, SymmetricNoise


def _random_stats(rng) -> criteria.SplitStats:
    n = int(rng.integers(40, 4000))
    n_l = int(rng.integers(1, n))
    n_pos = int(rng.integers(0, n + 1))
    lo = max(0, n_pos - (n - n_l))
    hi = min(n_l, n_pos)
    n_l_pos = int(rng.integers(lo, hi + 1))
    return criteria.SplitStats.from_counts(n, n_l, n_pos, n_l_pos)


def _check_scaling(rng) -> bool:
    factors = {"gini": lambda e: (1 - 2 * e) ** 2,
               "mc": lambda e: abs(1 - 2 * e),
               "twoing": lambda e: (1 - 2 * e) ** 2}
    for _ in range(200):
        s = _random_stats(rng)
        for eta in np.arange(0.05, 0.5, 0.05):
            noisy = criteria.noisy_split_stats(s, eta)
            for kind, factor in factors.items():
                clean = criteria.criterion_value(kind, s)
                got = criteria.criterion_value(kind, noisy)
                if abs(got - factor(eta) * clean) > 1e-10:
                    return False
    return True


def _check_generator_determinism(seed) -> bool:
    a = generate_checkerboard(2, 500, seed)
    b = generate_checkerboard(2, 500, seed)
    return np.array_equal(a.X, b.X) and np.array_equal(a.y, b.y)


def _check_split_partition(seed) -> bool:
    ds = generate_checkerboard(4, 1000, seed)
    train, val, test = split_dataset(ds, SplitSpec(seed=seed))
    sizes = (train.n, val.n, test.n)
    return sizes == (600, 200, 200)


def _check_noise_rate(seed) -> bool:
    ds = generate_checkerboard(2, 20000, seed)
    noisy = inject_noise(ds, SymmetricNoise(0.3), seed)
    rate = noisy.flip_mask.mean()
    return abs(rate - 0.3) < 0.02 and np.array_equal(noisy.X, ds.X)


def _check_counterexample() -> bool:
    return bounds.entropy_counterexample().ranking_flips


def _check_leaf_bound(seed) -> bool:
    q = bounds.BoundQuery(rho=0.2, eta=0.25, delta=0.05, criterion="leaf")
    rate = bounds.validate_leaf_bound(q, trials=2000, seed=seed)
    return rate <= bounds.dominance_envelope(2000, q.delta)


def run(seed: int = 0) -> bool:
    rng = np.random.default_rng(seed)
    checks = [
        ("closed-form noise scaling of gini/mc/twoing", lambda: _check_scaling(rng)),
        ("generator determinism", lambda: _check_generator_determinism(seed)),
        ("split partition sizes", lambda: _check_split_partition(seed)),
        ("noise injection rate and feature purity", lambda: _check_noise_rate(seed)),
        ("entropy ranking flip", _check_counterexample),
        ("leaf bound dominance (quick)", lambda: _check_leaf_bound(seed)),
    ]
    all_ok = True
    for name, check in checks:
        ok = check()
        all_ok = all_ok and ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return all_ok
