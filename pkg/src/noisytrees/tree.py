"""Top-down greedy binary decision trees over axis-aligned threshold splits.

A split routes x to the left child when x[feature] <= threshold.
Thresholds are midpoints between consecutive distinct sorted feature
values, so routing is stable under small perturbations of the data. A
node becomes a leaf when it has fewer than 2*min_leaf samples, when the
depth limit is reached, or when no candidate split has positive gain.
Leaves predict the majority class of their training samples, with ties
going to +1.

Everything is deterministic given the data and the parameters; gain ties
are broken toward the lower feature index and then the lower threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from . import criteria
from ._validation import check_features, check_labels, check_seed


@dataclass
class Leaf:
    label: int
    n_pos: int
    n_neg: int


@dataclass
class Split:
    feature: int
    threshold: float
    left: "Split | Leaf | None" = None
    right: "Split | Leaf | None" = None


TreeNode = Split | Leaf


@dataclass(frozen=True)
class BestSplit:
    feature: int
    threshold: float
    gain: float


def candidate_thresholds(values) -> np.ndarray:
    """Midpoints between consecutive distinct sorted values."""
    distinct = np.unique(np.asarray(values, dtype=np.float64))
    return (distinct[:-1] + distinct[1:]) / 2.0


def _scan_feature(x, pos, n_pos, criterion, min_leaf):
    """Best (gain, threshold) along one feature, or None.

    x holds the node's values of that feature, pos the matching 0/1
    positive indicators. Candidates keep at least min_leaf samples on
    each side. Within a feature the first maximum wins, which is the
    lowest threshold because candidates are scanned in value order.
    """
    n = x.size
    order = np.argsort(x, kind="stable")
    xs = x[order]
    cum_pos = np.cumsum(pos[order])
    idx = np.arange(min_leaf - 1, n - min_leaf)
    idx = idx[xs[idx] < xs[idx + 1]]
    if idx.size == 0:
        return None
    gains = criteria.gain_from_counts(criterion, n, n_pos, idx + 1, cum_pos[idx])
    k = int(np.argmax(gains))
    lo, hi = xs[idx[k]], xs[idx[k] + 1]
    threshold = lo + (hi - lo) / 2.0
    if threshold >= hi:  # adjacent floats: keep the counted partition intact
        threshold = float(np.nextafter(hi, lo))
    return float(gains[k]), float(threshold)


def best_split(
    X,
    y,
    *,
    criterion: str = "gini",
    min_leaf: int = 1,
    feature_indices=None,
) -> BestSplit | None:
    """Gain-maximizing axis-aligned split, or None if no gain is positive.

    Ties are broken toward the lower feature index, then the lower
    threshold.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.shape[0] < 2:
        raise ValueError("need at least 2 samples to split")
    pos = (y == 1).astype(np.int64)
    n_pos = int(pos.sum())
    if feature_indices is None:
        feature_indices = range(X.shape[1])
    best = None
    for j in feature_indices:
        found = _scan_feature(X[:, j], pos, n_pos, criterion, min_leaf)
        if found is None:
            continue
        g, t = found
        if best is None or g > best.gain:
            best = BestSplit(int(j), t, g)
    if best is None or best.gain <= 0.0:
        return None
    return best


def grow_tree(
    X,
    y,
    *,
    criterion: str = "gini",
    min_leaf: int = 1,
    max_depth: int | None = None,
    feature_subset: int | None = None,
    rng: np.random.Generator | None = None,
) -> TreeNode:
    """Fit a tree and return its root node.

    feature_subset draws that many features uniformly without
    replacement at every node (requires rng); None considers all
    features. Growth is iterative, left child first, so the rng stream
    is consumed in a fixed order.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    n, d = X.shape
    if n == 0:
        raise ValueError("cannot fit a tree on an empty dataset")
    if min_leaf < 1:
        raise ValueError("min_leaf must be at least 1")
    if feature_subset is not None:
        if not 1 <= feature_subset <= d:
            raise ValueError(f"feature_subset must lie in [1, {d}]")
        if feature_subset == d:
            feature_subset = None
        elif rng is None:
            raise ValueError("feature_subset requires an rng")
    pos = (y == 1).astype(np.int64)

    def make_leaf(idx, n_pos):
        n_neg = idx.size - n_pos
        return Leaf(1 if n_pos >= n_neg else -1, int(n_pos), int(n_neg))

    root = None
    # entries: (parent, side, sample indices, depth); right pushed first
    # so the left subtree is grown first
    stack = [(None, "l", np.arange(n), 0)]
    while stack:
        parent, side, idx, depth = stack.pop()
        n_pos_here = int(pos[idx].sum())
        node = None
        if (
            idx.size < 2 * min_leaf
            or (max_depth is not None and depth >= max_depth)
            or n_pos_here == 0
            or n_pos_here == idx.size
        ):
            node = make_leaf(idx, n_pos_here)
        else:
            if feature_subset is None:
                features = range(d)
            else:
                features = np.sort(rng.choice(d, size=feature_subset, replace=False))
            found = best_split(
                X[idx], y[idx], criterion=criterion, min_leaf=min_leaf,
                feature_indices=features,
            )
            if found is None:
                node = make_leaf(idx, n_pos_here)
            else:
                node = Split(found.feature, found.threshold)
                mask = X[idx, found.feature] <= found.threshold
                stack.append((node, "r", idx[~mask], depth + 1))
                stack.append((node, "l", idx[mask], depth + 1))
        if parent is None:
            root = node
        elif side == "l":
            parent.left = node
        else:
            parent.right = node
    return root


def tree_predict(node: TreeNode, X) -> np.ndarray:
    """Route a batch of samples down the tree and return +1/-1 labels."""
    X = np.asarray(X, dtype=np.float64)
    out = np.empty(X.shape[0], dtype=np.int8)
    stack = [(node, np.arange(X.shape[0]))]
    while stack:
        node, idx = stack.pop()
        if idx.size == 0:
            continue
        if isinstance(node, Leaf):
            out[idx] = node.label
        else:
            mask = X[idx, node.feature] <= node.threshold
            stack.append((node.left, idx[mask]))
            stack.append((node.right, idx[~mask]))
    return out


def tree_depth(node: TreeNode) -> int:
    depth = 0
    stack = [(node, 0)]
    while stack:
        node, level = stack.pop()
        if isinstance(node, Leaf):
            depth = max(depth, level)
        else:
            stack.append((node.left, level + 1))
            stack.append((node.right, level + 1))
    return depth


def tree_leaves(node: TreeNode) -> list[Leaf]:
    leaves = []
    stack = [node]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            leaves.append(node)
        else:
            stack.append(node.right)
            stack.append(node.left)
    return leaves


def trees_equal(t1, t2, threshold_tol: float = 0.0) -> bool:
    """Structural equality: same topology, features, and leaf labels,
    with thresholds allowed to differ by at most threshold_tol."""
    t1 = getattr(t1, "tree_", t1)
    t2 = getattr(t2, "tree_", t2)
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        if isinstance(a, Leaf) != isinstance(b, Leaf):
            return False
        if isinstance(a, Leaf):
            if a.label != b.label:
                return False
        else:
            if a.feature != b.feature:
                return False
            if abs(a.threshold - b.threshold) > threshold_tol:
                return False
            stack.append((a.left, b.left))
            stack.append((a.right, b.right))
    return True


# ---------------------------------------------------------------------------
# serialization: line-oriented, pre-order, exact float round-trip
# ---------------------------------------------------------------------------


def tree_to_lines(node: TreeNode) -> list[str]:
    """Pre-order lines: N <feature> <threshold> | L <label> <n+> <n->."""
    lines = []
    stack = [node]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            lines.append(f"L {node.label:+d} {node.n_pos} {node.n_neg}")
        else:
            lines.append(f"N {node.feature} {node.threshold!r}")
            stack.append(node.right)
            stack.append(node.left)
    return lines


def tree_from_lines(lines, start: int = 0) -> tuple[TreeNode, int]:
    """Parse one pre-order tree; returns (root, next unread line index)."""
    root = None
    open_splits: list[Split] = []  # splits still missing a child
    pos = start
    while True:
        if pos >= len(lines):
            raise ValueError("truncated tree serialization")
        fields = lines[pos].split()
        if fields[0] == "L":
            node = Leaf(int(fields[1]), int(fields[2]), int(fields[3]))
        elif fields[0] == "N":
            node = Split(int(fields[1]), float(fields[2]))
        else:
            raise ValueError(f"line {pos + 1}: expected 'N' or 'L', got {fields[0]!r}")
        pos += 1
        if root is None:
            root = node
        else:
            parent = open_splits[-1]
            if parent.left is None:
                parent.left = node
            else:
                parent.right = node
                open_splits.pop()
        if isinstance(node, Split):
            open_splits.append(node)
        if not open_splits:
            return root, pos


def tree_to_text(node: TreeNode) -> str:
    return "\n".join(tree_to_lines(node)) + "\n"


def tree_from_text(text: str) -> TreeNode:
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValueError("empty tree serialization")
    root, consumed = tree_from_lines(lines)
    if consumed != len(lines):
        raise ValueError(f"trailing content after line {consumed}")
    return root


# ---------------------------------------------------------------------------
# estimator
# ---------------------------------------------------------------------------


class TreeClassifier(BaseEstimator, ClassifierMixin):
    """Greedy binary decision tree for +1/-1 labels.

    Parameters
    ----------
    criterion : {'gini', 'entropy', 'mc', 'twoing'}
        Split-selection criterion; 'mc' is the misclassification rate.
    min_leaf : int
        Minimum training samples in every leaf. A node is split only if
        both children keep at least this many samples.
    max_depth : int or None
        Depth limit; None grows until the size or zero-gain rule stops.
    feature_subset : int or None
        Number of features drawn uniformly at every node. None uses all
        features (and then fitting consumes no randomness).
    seed : int
        Seed for the per-node feature draws.
    """

    def __init__(self, criterion="gini", min_leaf=1, max_depth=None,
                 feature_subset=None, seed=0):
        self.criterion = criterion
        self.min_leaf = min_leaf
        self.max_depth = max_depth
        self.feature_subset = feature_subset
        self.seed = seed

    def fit(self, X, y):
        X = check_features(X)
        y = check_labels(y, n=X.shape[0])
        if self.criterion not in criteria.CRITERIA:
            raise ValueError(
                f"unknown criterion {self.criterion!r}; expected one of {criteria.CRITERIA}"
            )
        rng = None
        if self.feature_subset is not None:
            rng = np.random.default_rng(check_seed(self.seed))
        self.tree_ = grow_tree(
            X, y,
            criterion=self.criterion,
            min_leaf=self.min_leaf,
            max_depth=self.max_depth,
            feature_subset=self.feature_subset,
            rng=rng,
        )
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([-1, 1])
        return self

    def predict(self, X):
        X = check_features(X, expected_d=self.n_features_in_)
        return tree_predict(self.tree_, X)
