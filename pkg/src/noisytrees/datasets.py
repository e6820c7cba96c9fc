"""Synthetic benchmark datasets, tabular file I/O, and seeded splitting.

Two families of 2-D generators are provided: checkerboards (a grid of
alternating-class cells over [0, grid]^2) and imbalanced linear problems
(axis-aligned class boxes with unequal priors). Both are deterministic
given a seed. Labels are always +1 / -1.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ._validation import check_features, check_labels, check_seed

IMBALANCED_VARIANTS = {
    # variant -> (positive box, negative box, positive prior)
    3: (((0.0, 0.5), (0.0, 1.0)), ((0.5, 1.0), (0.0, 1.0)), 0.9),
    4: (((0.0, 0.5), (0.0, 1.0)), ((0.5, 0.7), (0.4, 0.6)), 0.8),
}

#: default sample counts used by the benchmark harness
DEFAULT_SIZES = {"cb2": 30000, "cb4": 30000, "imb3": 40000, "imb4": 40000}


@dataclass(frozen=True)
class Dataset:
    """An immutable sample of feature vectors with +1/-1 labels."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = check_features(self.X)
        y = check_labels(self.y, n=X.shape[0])
        # already-frozen arrays (e.g. from another Dataset) are shared as-is
        if X.flags.writeable:
            X = X.copy()
            X.flags.writeable = False
        if y.flags.writeable:
            y = y.copy()
            y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def with_labels(self, y) -> "Dataset":
        """Same features, different labels."""
        return Dataset(self.X, y)

    def subset(self, indices) -> "Dataset":
        return Dataset(self.X[indices], self.y[indices])


def checkerboard_label(X, grid: int) -> np.ndarray:
    """+1 where the cell parity of a point is even, -1 otherwise.

    Cells are unit squares of [0, grid]^2. Points on interior cell edges
    belong to the cell of their floor; a coordinate equal to grid maps to
    the last cell.
    """
    X = np.asarray(X, dtype=np.float64)
    cells = np.clip(np.floor(X), 0, grid - 1)
    parity = (cells[..., 0] + cells[..., 1]) % 2
    return np.where(parity == 0, 1, -1).astype(np.int8)


def generate_checkerboard(grid: int, n: int, seed: int) -> Dataset:
    """Uniform points on [0, grid]^2 labeled by cell parity.

    grid=2 is the classic XOR board with the positive region
    [0,1)^2 union [1,2)x[1,2); grid=4 extends the same parity rule.
    """
    if grid not in (2, 4):
        raise ValueError(f"grid must be 2 or 4, got {grid}")
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(check_seed(seed))
    X = rng.random((n, 2)) * grid
    return Dataset(X, checkerboard_label(X, grid))


def generate_imbalanced_linear(variant: int, n: int, seed: int) -> Dataset:
    """Two uniform class boxes with unequal priors.

    Variant 3: positives on [0,0.5]x[0,1] with prior 0.9, negatives on
    [0.5,1]x[0,1] with prior 0.1. Variant 4: positive prior 0.8, negatives
    confined to [0.5,0.7]x[0.4,0.6] with prior 0.2. Class membership is an
    independent draw from the prior for every sample.
    """
    if variant not in IMBALANCED_VARIANTS:
        raise ValueError(f"variant must be 3 or 4, got {variant}")
    if n < 1:
        raise ValueError("n must be at least 1")
    pos_box, neg_box, prior = IMBALANCED_VARIANTS[variant]
    rng = np.random.default_rng(check_seed(seed))
    positive = rng.random(n) < prior
    u = rng.random((n, 2))
    X = np.empty((n, 2))
    for axis in range(2):
        lo_pos, hi_pos = pos_box[axis]
        lo_neg, hi_neg = neg_box[axis]
        lo = np.where(positive, lo_pos, lo_neg)
        hi = np.where(positive, hi_pos, hi_neg)
        X[:, axis] = lo + u[:, axis] * (hi - lo)
    y = np.where(positive, 1, -1)
    return Dataset(X, y)


# ---------------------------------------------------------------------------
# tabular I/O
# ---------------------------------------------------------------------------


def dataset_to_lines(ds: Dataset) -> list[str]:
    """CSV lines with header f0,...,f{d-1},label and +1/-1 labels."""
    header = ",".join([f"f{j}" for j in range(ds.d)] + ["label"])
    lines = [header]
    for i in range(ds.n):
        cells = [repr(float(v)) for v in ds.X[i]]
        cells.append("+1" if ds.y[i] == 1 else "-1")
        lines.append(",".join(cells))
    return lines


def save_dataset(ds: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(dataset_to_lines(ds)) + "\n")


def _looks_like_header(row: list[str], label_idx: int) -> bool:
    # only feature cells count; labels may legitimately be non-numeric
    for j, cell in enumerate(row):
        if j == label_idx:
            continue
        try:
            float(cell)
        except ValueError:
            return True
    return False


def _label_mapping(raw_labels: set[str]) -> dict[str, int]:
    """Map a two-value label alphabet onto {+1, -1}.

    When both raw values parse as numbers the numerically larger one
    becomes +1 (so 1 beats 0, +1 beats -1); otherwise the
    lexicographically larger string becomes +1.
    """
    if len(raw_labels) > 2:
        raise ValueError(
            f"expected at most two label values, found {sorted(raw_labels)}"
        )
    if len(raw_labels) == 1:
        value = next(iter(raw_labels))
        try:
            num = float(value)
            if num in (1.0, -1.0):
                return {value: int(num)}
        except ValueError:
            pass
        return {value: 1}
    first, second = sorted(raw_labels)
    try:
        if float(first) > float(second):
            first, second = second, first
    except ValueError:
        pass
    return {first: -1, second: 1}


def load_table(
    path,
    *,
    delimiter: str = ",",
    header: bool | None = None,
    label_column: int = -1,
) -> Dataset:
    """Read a delimiter-separated table into a Dataset.

    All cells except the label column must parse as finite reals. The
    label column (default: last) may hold any two-value alphabet; see
    _label_mapping for how it is mapped onto {+1, -1}. header=None
    auto-detects a header row by trying to parse the first row.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [row for row in csv.reader(fh, delimiter=delimiter) if row]
    if not rows:
        raise ValueError(f"{path}: empty file")
    width = len(rows[0])
    if width < 2:
        raise ValueError(f"{path}: need at least one feature column and a label")
    label_idx = label_column if label_column >= 0 else width + label_column
    if not 0 <= label_idx < width:
        raise ValueError(f"{path}: label column {label_column} out of range")
    if header is None:
        header = _looks_like_header(rows[0], label_idx)
    if header:
        rows = rows[1:]
        if not rows:
            raise ValueError(f"{path}: no data rows after header")

    features = np.empty((len(rows), width - 1))
    raw_labels = []
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(
                f"{path}: row {i + 1} has {len(row)} columns, expected {width}"
            )
        k = 0
        for j, cell in enumerate(row):
            if j == label_idx:
                raw_labels.append(cell.strip())
                continue
            try:
                value = float(cell)
            except ValueError:
                raise ValueError(
                    f"{path}: row {i + 1}, column {j + 1}: "
                    f"cannot parse {cell!r} as a number"
                ) from None
            if not np.isfinite(value):
                raise ValueError(
                    f"{path}: row {i + 1}, column {j + 1}: non-finite value {cell!r}"
                )
            features[i, k] = value
            k += 1

    mapping = _label_mapping(set(raw_labels))
    y = np.array([mapping[v] for v in raw_labels], dtype=np.int8)
    return Dataset(features, y)


# ---------------------------------------------------------------------------
# splitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitSpec:
    """Train/validation/test fractions plus the shuffle seed."""

    train_fraction: float = 0.6
    validation_fraction: float = 0.2
    test_fraction: float = 0.2
    seed: int = 0

    def __post_init__(self):
        total = self.train_fraction + self.validation_fraction + self.test_fraction
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"fractions must sum to 1, got {total}")
        for name in ("train_fraction", "validation_fraction", "test_fraction"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        check_seed(self.seed)


def split_dataset(ds: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset, Dataset]:
    """Disjoint train/validation/test partition by seeded shuffle.

    Validation and test get floor(fraction * n) samples each; the
    remainder goes to train.
    """
    if ds.n < 3:
        raise ValueError(f"need at least 3 samples to split, got {ds.n}")
    # epsilon absorbs float error in fraction * n before flooring
    n_val = int(spec.validation_fraction * ds.n + 1e-9)
    n_test = int(spec.test_fraction * ds.n + 1e-9)
    if spec.test_fraction > 0 and n_test == 0:
        raise ValueError(
            f"test_fraction {spec.test_fraction} yields an empty test set at n={ds.n}"
        )
    n_train = ds.n - n_val - n_test
    perm = np.random.default_rng(spec.seed).permutation(ds.n)
    train = ds.subset(perm[:n_train])
    val = ds.subset(perm[n_train:n_train + n_val])
    test = ds.subset(perm[n_train + n_val:])
    return train, val, test
