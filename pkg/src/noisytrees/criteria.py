"""Impurity measures, split-gain criteria, and their noisy counterparts.

The gain of a split is parent impurity minus the child-size-weighted
child impurities. The twoing criterion is kept separate because it is
not an impurity difference, although for two classes it reduces to
a(1-a)(p_l - p_r)^2.

Under symmetric label noise at rate eta, every class fraction moves to
p(1-2*eta)+eta in the large-sample limit. That transformation scales the
gini and twoing criteria by (1-2*eta)^2 and the misclassification gain
by |1-2*eta|, leaving the ranking of splits unchanged. Entropy admits no
such closed-form scaling and its ranking can flip (see
bounds.entropy_counterexample).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

IMPURITY_KINDS = ("gini", "entropy", "mc")
CRITERIA = IMPURITY_KINDS + ("twoing",)

#: a*p_l + (1-a)*p_r must reproduce the parent fraction this tightly
PARENT_CONSISTENCY_TOL = 1e-12

_LN2 = np.log(2.0)


def gini_impurity(p):
    return 2.0 * np.multiply(p, 1.0 - np.asarray(p, dtype=np.float64))


def entropy_impurity(p):
    """Binary entropy in bits, with 0*log(0) taken as 0."""
    p = np.asarray(p, dtype=np.float64)
    return -(xlogy(p, p) + xlogy(1.0 - p, 1.0 - p)) / _LN2


def misclassification_impurity(p):
    p = np.asarray(p, dtype=np.float64)
    return np.minimum(p, 1.0 - p)


_IMPURITY = {
    "gini": gini_impurity,
    "entropy": entropy_impurity,
    "mc": misclassification_impurity,
}


def impurity(kind: str, p):
    """Evaluate one impurity measure at positive-class fraction p."""
    if kind not in _IMPURITY:
        raise ValueError(f"unknown impurity kind {kind!r}; expected one of {IMPURITY_KINDS}")
    value = _IMPURITY[kind](p)
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class SplitStats:
    """Counts and class fractions describing one binary split.

    n samples at the parent, n_l of them routed left. p, p_l, p_r are the
    positive-class fractions of parent, left child, and right child. The
    fractions must be consistent with the left-child weight a = n_l / n.
    Fractions are stored separately from counts so that the closed-form
    noisy transformation (which produces non-count fractions) fits in the
    same type.
    """

    n: int
    n_l: int
    p: float
    p_l: float
    p_r: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0 <= self.n_l <= self.n:
            raise ValueError(f"n_l must lie in [0, n], got {self.n_l}")
        for name in ("p", "p_l", "p_r"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        mixed = self.a * self.p_l + (1.0 - self.a) * self.p_r
        if abs(mixed - self.p) > PARENT_CONSISTENCY_TOL:
            raise ValueError(
                f"child fractions are inconsistent with the parent: "
                f"a*p_l+(1-a)*p_r = {mixed!r} but p = {self.p!r}"
            )

    @classmethod
    def from_counts(cls, n: int, n_l: int, n_pos: int, n_l_pos: int) -> "SplitStats":
        """Build stats from integer sample counts."""
        n_r = n - n_l
        n_r_pos = n_pos - n_l_pos
        if not 0 <= n_pos <= n:
            raise ValueError(f"n_pos must lie in [0, n], got {n_pos}")
        if not 0 <= n_l_pos <= n_l:
            raise ValueError(f"n_l_pos must lie in [0, n_l], got {n_l_pos}")
        if not 0 <= n_r_pos <= n_r:
            raise ValueError("right-child positive count out of range")
        p_l = n_l_pos / n_l if n_l else 0.0
        p_r = n_r_pos / n_r if n_r else 0.0
        return cls(n=n, n_l=n_l, p=n_pos / n, p_l=p_l, p_r=p_r)

    @property
    def n_r(self) -> int:
        return self.n - self.n_l

    @property
    def a(self) -> float:
        return self.n_l / self.n

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def q_l(self) -> float:
        return 1.0 - self.p_l

    @property
    def q_r(self) -> float:
        return 1.0 - self.p_r


def _require_nondegenerate(s: SplitStats):
    if s.n_l == 0 or s.n_r == 0:
        raise ValueError("degenerate split: both children need at least one sample")


def gain(kind: str, s: SplitStats) -> float:
    """Impurity gain of a split: G(parent) - a*G(left) - (1-a)*G(right)."""
    _require_nondegenerate(s)
    a = s.a
    return float(
        impurity(kind, s.p) - a * impurity(kind, s.p_l) - (1.0 - a) * impurity(kind, s.p_r)
    )


def twoing(s: SplitStats) -> float:
    """Two-class twoing criterion a(1-a)(p_l - p_r)^2."""
    _require_nondegenerate(s)
    a = s.a
    return float(a * (1.0 - a) * (s.p_l - s.p_r) ** 2)


def criterion_value(criterion: str, s: SplitStats) -> float:
    """Dispatch over the four supported split criteria."""
    if criterion == "twoing":
        return twoing(s)
    return gain(criterion, s)


def gain_from_counts(criterion: str, n, n_pos, n_l, n_l_pos):
    """Vectorized criterion values from counts; n_l/n_l_pos may be arrays.

    Counts are converted to fractions exactly once, which keeps the
    arithmetic error of repeated evaluation out of the comparison between
    candidate splits.
    """
    if criterion not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")
    n_l = np.asarray(n_l, dtype=np.float64)
    n_l_pos = np.asarray(n_l_pos, dtype=np.float64)
    n_r = n - n_l
    a = n_l / n
    p_l = n_l_pos / n_l
    p_r = (n_pos - n_l_pos) / n_r
    if criterion == "twoing":
        return a * (1.0 - a) * (p_l - p_r) ** 2
    parent = impurity(criterion, n_pos / n)
    return parent - a * _IMPURITY[criterion](p_l) - (1.0 - a) * _IMPURITY[criterion](p_r)


def noisy_split_stats(s: SplitStats, eta: float) -> SplitStats:
    """Expected split stats under symmetric flips at rate eta.

    Every fraction moves through p -> p(1-2*eta)+eta while the counts and
    the left-child weight stay fixed, because flips never move samples
    across a split.
    """
    if not 0.0 <= eta < 1.0:
        raise ValueError(f"eta must lie in [0, 1), got {eta}")
    shift = 1.0 - 2.0 * eta
    return SplitStats(
        n=s.n,
        n_l=s.n_l,
        p=s.p * shift + eta,
        p_l=s.p_l * shift + eta,
        p_r=s.p_r * shift + eta,
    )


def noisy_gain_closed_form(criterion: str, clean_gain: float, eta: float) -> float:
    """Large-sample criterion value under symmetric flips at rate eta.

    gini and twoing scale by (1-2*eta)^2, misclassification by |1-2*eta|.
    Entropy has no closed-form scaling and is rejected.
    """
    if criterion == "entropy":
        raise ValueError(
            "entropy gain has no closed-form noisy scaling; its split ranking "
            "is not preserved under symmetric flips (use the Monte Carlo path)"
        )
    if criterion not in CRITERIA:
        raise ValueError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")
    if eta == 0.5:
        raise ValueError("eta=0.5 erases all label information; no scaling exists")
    shift = 1.0 - 2.0 * eta
    if criterion == "mc":
        return abs(shift) * clean_gain
    return shift * shift * clean_gain
