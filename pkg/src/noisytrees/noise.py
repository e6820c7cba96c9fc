"""Label-noise models and seeded noise injection.

Three model families are supported: symmetric (one flip rate for every
sample), class-conditional (one rate per true class), and non-uniform
(rate depends on the feature vector through a named parametric family).
Injection never touches features and records which labels were flipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from ._validation import check_rate, check_seed
from .datasets import Dataset

# non-uniform rates are clipped strictly below 1/2 so that majority votes
# stay recoverable for every sample
NONUNIFORM_RATE_CAP = 0.4999


@dataclass(frozen=True)
class SymmetricNoise:
    """Every label flips independently with the same probability."""

    eta: float

    def __post_init__(self):
        check_rate(self.eta, "eta")

    def rates(self, X, y) -> np.ndarray:
        return np.full(len(y), self.eta)

    @property
    def spec(self) -> str:
        return f"sym:{self.eta:g}"


@dataclass(frozen=True)
class ClassConditionalNoise:
    """Flip probability depends only on the true class."""

    eta_pos: float
    eta_neg: float

    def __post_init__(self):
        check_rate(self.eta_pos, "eta_pos")
        check_rate(self.eta_neg, "eta_neg")

    def rates(self, X, y) -> np.ndarray:
        return np.where(np.asarray(y) == 1, self.eta_pos, self.eta_neg)

    @property
    def spec(self) -> str:
        return f"cc:{self.eta_pos:g},{self.eta_neg:g}"


@dataclass(frozen=True)
class AffineFeatureNoise:
    """Non-uniform rate clip(offset + slope * x[0], 0, 0.4999)."""

    offset: float
    slope: float

    def rates(self, X, y) -> np.ndarray:
        raw = self.offset + self.slope * np.asarray(X)[:, 0]
        return np.clip(raw, 0.0, NONUNIFORM_RATE_CAP)

    @property
    def spec(self) -> str:
        return f"nu:affine:{self.offset:g},{self.slope:g}"


NoiseModel = Union[SymmetricNoise, ClassConditionalNoise, AffineFeatureNoise]


def parse_noise_model(spec: str) -> NoiseModel:
    """Parse the CLI syntax sym:0.3 | cc:0.4,0.2 | nu:affine:a,b."""
    parts = spec.strip().split(":")
    try:
        if parts[0] == "sym" and len(parts) == 2:
            return SymmetricNoise(float(parts[1]))
        if parts[0] == "cc" and len(parts) == 2:
            pos, neg = parts[1].split(",")
            return ClassConditionalNoise(float(pos), float(neg))
        if parts[0] == "nu" and len(parts) == 3 and parts[1] == "affine":
            a, b = parts[2].split(",")
            return AffineFeatureNoise(float(a), float(b))
    except ValueError as exc:
        raise ValueError(f"bad noise model {spec!r}: {exc}") from None
    raise ValueError(
        f"bad noise model {spec!r}; expected sym:<eta>, cc:<eta+>,<eta-> "
        "or nu:affine:<offset>,<slope>"
    )


@dataclass(frozen=True)
class NoisyDataset:
    """A dataset whose labels went through noise injection.

    data holds the noisy labels; flip_mask[i] == 1 exactly where the
    noisy label differs from the source label.
    """

    data: Dataset
    flip_mask: np.ndarray
    model: NoiseModel
    seed: int

    def __post_init__(self):
        mask = np.asarray(self.flip_mask, dtype=np.uint8).copy()
        if mask.shape != (self.data.n,):
            raise ValueError("flip_mask length must match the dataset")
        mask.flags.writeable = False
        object.__setattr__(self, "flip_mask", mask)

    @property
    def X(self) -> np.ndarray:
        return self.data.X

    @property
    def y(self) -> np.ndarray:
        return self.data.y

    @property
    def n(self) -> int:
        return self.data.n


def inject_noise(ds: Dataset, model: NoiseModel, seed: int) -> NoisyDataset:
    """Flip each label independently with its model rate.

    One uniform draw is consumed per sample, in sample order, so
    appending samples to a dataset never changes the flips of earlier
    samples under the same seed.
    """
    rng = np.random.default_rng(check_seed(seed))
    draws = rng.random(ds.n)
    flips = draws < model.rates(ds.X, ds.y)
    noisy = np.where(flips, -ds.y, ds.y)
    return NoisyDataset(ds.with_labels(noisy), flips.astype(np.uint8), model, seed)


def expected_noisy_fraction(p: float, eta: float) -> float:
    """Large-sample class fraction after symmetric flips: p(1-2eta)+eta."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    check_rate(eta, "eta")
    return p * (1.0 - 2.0 * eta) + eta
