"""Input checks shared by the estimators and the data helpers."""

from __future__ import annotations

import numpy as np


def check_features(X, *, expected_d: int | None = None) -> np.ndarray:
    """Coerce X to a finite float64 matrix of shape (n, d)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D feature matrix, got shape {X.shape}")
    if X.shape[0] == 0:
        raise ValueError("empty feature matrix")
    if not np.isfinite(X).all():
        raise ValueError("feature matrix contains non-finite values")
    if expected_d is not None and X.shape[1] != expected_d:
        raise ValueError(
            f"feature dimension mismatch: expected {expected_d}, got {X.shape[1]}"
        )
    return X


def check_labels(y, *, n: int | None = None) -> np.ndarray:
    """Coerce y to an int8 vector with values in {+1, -1}."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ValueError(f"expected a 1-D label vector, got shape {y.shape}")
    values = np.unique(y)
    if not np.isin(values, (-1, 1)).all():
        bad = [v for v in values.tolist() if v not in (-1, 1)]
        raise ValueError(f"labels must be +1 or -1, found {bad}")
    if n is not None and y.shape[0] != n:
        raise ValueError(f"expected {n} labels, got {y.shape[0]}")
    return y.astype(np.int8)


def check_rate(value: float, name: str = "rate") -> float:
    """Validate a flip probability in [0, 1)."""
    value = float(value)
    if not 0.0 <= value < 1.0:
        raise ValueError(f"{name} must lie in [0, 1), got {value}")
    return value


def check_seed(seed: int, name: str = "seed") -> int:
    seed = int(seed)
    if seed < 0:
        raise ValueError(f"{name} must be a nonnegative integer, got {seed}")
    return seed
