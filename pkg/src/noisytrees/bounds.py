"""Sample-size bounds for noise-robust majority votes and split rankings,
Monte Carlo validators for both, and the entropy ranking-flip example.

The bounds come from Hoeffding's inequality and are deliberately
conservative; the validators measure the actual failure rates so the
analytic numbers can be checked for dominance (empirical rate <= delta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from ._validation import check_seed
from .criteria import (
    SplitStats,
    criterion_value,
    gain,
    gain_from_counts,
    noisy_split_stats,
)

CRITERIA = ("leaf", "gini", "mc", "twoing")

# criterion -> (leading constant, log numerator) in
# ceil(C / (rho^2 (1-2 eta)^2) * ln(K / delta)).
# The split constants follow from a union bound over per-node fraction
# deviations: gini needs fractions rho(1-2eta)/12-accurate across 6
# events per split, misclassification rho(1-2eta)/6-accurate, and twoing
# rho(1-2eta)/2-accurate over 4 events per split (the parent fraction
# drops out of the twoing criterion).
_CONSTANTS = {
    "leaf": (2.0, 1.0),
    "gini": (72.0, 12.0),
    "mc": (18.0, 12.0),
    "twoing": (2.0, 8.0),
}


@dataclass(frozen=True)
class BoundQuery:
    """Margin rho, flip rate eta, failure budget delta, and criterion.

    For the leaf bound rho is the clean difference between positive and
    negative fractions; for split bounds it is the clean gain gap
    between the two competing splits.
    """

    rho: float
    eta: float
    delta: float
    criterion: str

    def __post_init__(self):
        if not 0.0 < self.rho <= 1.0:
            raise ValueError(f"rho must lie in (0, 1], got {self.rho}")
        if not 0.0 <= self.eta < 1.0 or self.eta == 0.5:
            raise ValueError(f"eta must lie in [0, 1) and differ from 0.5, got {self.eta}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}, got {self.criterion!r}")


def _bound(c: float, k: float, q: BoundQuery) -> int:
    scale = q.rho ** 2 * (1.0 - 2.0 * q.eta) ** 2
    return math.ceil(c / scale * math.log(k / q.delta))


def leaf_sample_bound(q: BoundQuery) -> int:
    """Samples at a leaf so the majority label survives symmetric flips
    with probability at least 1 - delta: ceil(2/(rho^2(1-2eta)^2) ln(1/delta))."""
    if q.criterion != "leaf":
        raise ValueError("leaf_sample_bound expects criterion='leaf'")
    if q.eta >= 0.5:
        raise ValueError("the leaf bound needs eta < 0.5")
    return _bound(*_CONSTANTS["leaf"], q)


def split_sample_bound(q: BoundQuery) -> int:
    """Samples at a node so the better of two splits keeps the higher
    gain under symmetric flips with probability at least 1 - delta."""
    if q.criterion == "leaf":
        raise ValueError("split_sample_bound expects a split criterion")
    return _bound(*_CONSTANTS[q.criterion], q)


def validate_leaf_bound(q: BoundQuery, trials: int = 10000, seed: int = 0) -> float:
    """Empirical majority-flip rate at exactly n = leaf_sample_bound(q).

    Builds n labels whose positive margin is at least rho (positives
    rounded up), flips each label with probability eta, and counts the
    trials where the majority goes negative. The returned rate should
    not exceed delta.
    """
    n = leaf_sample_bound(q)
    n_pos = math.ceil(n * (1.0 + q.rho) / 2.0)
    n_neg = n - n_pos
    rng = np.random.default_rng(check_seed(seed))
    flips_pos = rng.binomial(n_pos, q.eta, size=trials)
    flips_neg = rng.binomial(n_neg, q.eta, size=trials)
    noisy_pos = n_pos - flips_pos + flips_neg
    failures = np.count_nonzero(2 * noisy_pos - n < 0)
    return failures / trials


def _as_counts(s: SplitStats) -> tuple[int, int, int, int]:
    """(n_l_pos, n_l_neg, n_r_pos, n_r_neg), requiring integral counts."""
    out = []
    for count, frac in ((s.n_l, s.p_l), (s.n_r, s.p_r)):
        pos = frac * count
        if abs(pos - round(pos)) > 1e-9:
            raise ValueError(
                "split stats must come from integer counts for Monte Carlo "
                f"validation; {frac} * {count} is not integral"
            )
        pos = int(round(pos))
        out.extend((pos, count - pos))
    return tuple(out)


def validate_split_bound(
    q: BoundQuery,
    split_a: SplitStats,
    split_b: SplitStats,
    trials: int = 10000,
    seed: int = 0,
) -> float:
    """Empirical rate of the two splits swapping order under flips.

    Both stats must describe the same node population with
    n = split_sample_bound(q) samples, and split_a must beat split_b by
    at least rho in clean gain. Each trial flips every sample's label
    with probability eta (one shared noise draw for both splits, since
    they compete on the same node) and recomputes both finite-sample
    gains; a trial fails when split_a no longer wins strictly. The
    returned rate should not exceed delta.
    """
    n = split_sample_bound(q)
    if split_a.n != n or split_b.n != n:
        raise ValueError(f"both splits must have n = split_sample_bound(q) = {n}")
    n_pos_a = round(split_a.p * n)
    n_pos_b = round(split_b.p * n)
    if n_pos_a != n_pos_b:
        raise ValueError("splits must describe the same node: class counts differ")
    clean_gap = criterion_value(q.criterion, split_a) - criterion_value(q.criterion, split_b)
    if clean_gap < q.rho - 1e-12:
        raise ValueError(
            f"clean gain gap {clean_gap:.6g} is below rho={q.rho}; the bound "
            "does not apply"
        )

    la_pos, la_neg, _, _ = _as_counts(split_a)
    lb_pos, lb_neg, _, _ = _as_counts(split_b)
    n_pos = n_pos_a
    n_neg = n - n_pos
    # couple the two splits through a maximal-overlap joint: positives are
    # indexed 0..n_pos-1, split_a's left child takes the first la_pos of
    # them, split_b's left child the first lb_pos (same for negatives)
    cells = {}
    for tag, total, in_a, in_b in (
        ("pos", n_pos, la_pos, lb_pos),
        ("neg", n_neg, la_neg, lb_neg),
    ):
        ll = min(in_a, in_b)
        cells[tag] = (ll, in_a - ll, in_b - ll, total - in_a - in_b + ll)

    rng = np.random.default_rng(check_seed(seed))
    flips = {
        tag: [rng.binomial(c, q.eta, size=trials) for c in cells[tag]]
        for tag in ("pos", "neg")
    }
    pos_f, neg_f = flips["pos"], flips["neg"]
    noisy_total_pos = (
        n_pos - sum(pos_f) + sum(neg_f)
    )
    # noisy positives in each split's left child: kept positives + flipped
    # negatives of the (ll, lr) or (ll, rl) cells
    a_left_pos = (
        cells["pos"][0] + cells["pos"][1] - pos_f[0] - pos_f[1]
        + neg_f[0] + neg_f[1]
    )
    b_left_pos = (
        cells["pos"][0] + cells["pos"][2] - pos_f[0] - pos_f[2]
        + neg_f[0] + neg_f[2]
    )

    def gains(stats, left_pos):
        return gain_from_counts(
            q.criterion, n, noisy_total_pos, np.full(trials, stats.n_l), left_pos
        )

    gain_a = gains(split_a, a_left_pos)
    gain_b = gains(split_b, b_left_pos)
    failures = np.count_nonzero(gain_a <= gain_b)
    return failures / trials


def make_split_fixture(
    q: BoundQuery, headroom: float = 1.3
) -> tuple[SplitStats, SplitStats]:
    """A pair of competing splits at n = split_sample_bound(q) whose clean
    gain gap exceeds rho by the given headroom.

    The strong split halves the node with child fractions 0.5 -+ s, the
    weak split is uninformative (child fractions near 0.5), so the gap is
    about 2s^2 for gini, s for misclassification, and s^2 for twoing.
    Raises when no s in (0, 0.5] can reach the requested gap (twoing and
    gini gaps are capped at 0.25 and 0.5).
    """
    if q.criterion == "leaf":
        raise ValueError("split fixtures need a split criterion")
    max_gap = 0.25 if q.criterion == "twoing" else 0.5
    if q.rho > max_gap:
        raise ValueError(
            f"a clean {q.criterion} gain gap of {q.rho:.3g} is unreachable "
            f"(the criterion caps gaps at {max_gap})"
        )
    target = min(q.rho * headroom, max_gap)
    if q.criterion == "gini":
        s = math.sqrt(target / 2.0)
    elif q.criterion == "mc":
        s = target
    else:
        s = math.sqrt(target)
    s = min(s, 0.5)
    n = split_sample_bound(q)
    n_l = n // 2
    n_r = n - n_l
    strong_left = round((0.5 - s) * n_l)
    strong_right = round((0.5 + s) * n_r)
    n_pos = strong_left + strong_right
    strong = SplitStats.from_counts(n, n_l, n_pos, strong_left)
    weak = SplitStats.from_counts(n, n_l, n_pos, round(n_pos * n_l / n))
    gap = criterion_value(q.criterion, strong) - criterion_value(q.criterion, weak)
    if gap < q.rho:
        raise ValueError(
            f"fixture construction fell short: realized gap {gap:.6g} < rho={q.rho}"
        )
    return strong, weak


def dominance_envelope(trials: int, delta: float, confidence: float = 0.99) -> float:
    """Largest empirical rate still consistent with a true rate <= delta.

    Uses the one-sided binomial quantile so that a validator run flags a
    violation only when the observed failure count is implausible under
    the bound.
    """
    return float(binom.ppf(confidence, trials, delta)) / trials


# ---------------------------------------------------------------------------
# entropy ranking-flip example
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EntropyCounterexample:
    """Two splits whose entropy-gain ranking flips under 40% flips.

    The even split halves the node with child fractions 0.1 and 0.5; the
    lopsided split sends 30% of samples left with child fractions 0.01
    and 0.297/0.7. Clean, the lopsided split wins; at eta = 0.4 the even
    split wins. The same fractions keep their ranking under gini,
    misclassification, and twoing at every eta != 0.5.
    """

    eta: float
    even_split: SplitStats
    lopsided_split: SplitStats
    clean_even: float
    clean_lopsided: float
    noisy_even: float
    noisy_lopsided: float

    @property
    def clean_prefers_lopsided(self) -> bool:
        return self.clean_lopsided > self.clean_even

    @property
    def noisy_prefers_even(self) -> bool:
        return self.noisy_even > self.noisy_lopsided

    @property
    def ranking_flips(self) -> bool:
        return self.clean_prefers_lopsided and self.noisy_prefers_even


def entropy_counterexample(eta: float = 0.4) -> EntropyCounterexample:
    """Evaluate the entropy ranking flip at the given flip rate."""
    even = SplitStats.from_counts(n=1000, n_l=500, n_pos=300, n_l_pos=50)
    lopsided = SplitStats.from_counts(n=1000, n_l=300, n_pos=300, n_l_pos=3)
    return EntropyCounterexample(
        eta=eta,
        even_split=even,
        lopsided_split=lopsided,
        clean_even=gain("entropy", even),
        clean_lopsided=gain("entropy", lopsided),
        noisy_even=gain("entropy", noisy_split_stats(even, eta)),
        noisy_lopsided=gain("entropy", noisy_split_stats(lopsided, eta)),
    )
