"""Random forests: greedy (bagging + per-node feature draws) and purely
random (label-blind partitions, only leaf votes see the labels).

Every tree owns an rng stream derived from (seed, tree index), so a
forest is byte-identical whether its trees are fit serially or in
parallel. Prediction is a majority vote over the trees, ties going
to +1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator, ClassifierMixin

from ._validation import check_features, check_labels, check_seed
from . import criteria
from .tree import Leaf, Split, TreeNode, grow_tree, tree_predict, tree_from_lines, tree_to_lines

MODES = ("greedy", "purely_random")


def _grow_purely_random(X, y, k_splits: int, rng: np.random.Generator) -> TreeNode:
    """Grow one label-blind random tree.

    Repeats up to k_splits times: pick a splittable leaf uniformly, pick
    a feature uniformly, draw the threshold uniformly from that
    feature's observed range at the leaf. A draw of a constant feature
    is discarded and redrawn. Leaves are labeled by majority vote at the
    end.
    """

    @dataclass(eq=False)
    class Box:
        idx: np.ndarray
        lo: np.ndarray = field(init=False)
        hi: np.ndarray = field(init=False)
        node: Leaf | None = None

        def __post_init__(self):
            pts = X[self.idx]
            self.lo = pts.min(axis=0)
            self.hi = pts.max(axis=0)

        def splittable(self):
            return self.idx.size >= 2 and (self.lo < self.hi).any()

    d = X.shape[1]
    root_box = Box(np.arange(X.shape[0]))
    boxes = [root_box]
    links: list[tuple[Box, Box, Box, int, float]] = []  # parent, left, right, feature, threshold
    done = 0
    while done < k_splits:
        open_boxes = [b for b in boxes if b.splittable()]
        if not open_boxes:
            break
        box = open_boxes[rng.integers(len(open_boxes))]
        j = int(rng.integers(d))
        lo, hi = box.lo[j], box.hi[j]
        if lo == hi:
            continue
        t = float(rng.uniform(lo, hi))
        mask = X[box.idx, j] <= t
        left = Box(box.idx[mask])
        right = Box(box.idx[~mask])
        boxes.remove(box)
        boxes.extend((left, right))
        links.append((box, left, right, j, t))
        done += 1

    pos = (y == 1)
    for box in boxes:
        n_pos = int(pos[box.idx].sum())
        n_neg = box.idx.size - n_pos
        box.node = Leaf(1 if n_pos >= n_neg else -1, n_pos, n_neg)
    # wire internal nodes children-first; links were appended top-down
    nodes = {id(box): box.node for box in boxes}
    for parent, left, right, j, t in reversed(links):
        nodes[id(parent)] = Split(j, t, nodes[id(left)], nodes[id(right)])
    return nodes[id(root_box)]


def _fit_one_tree(X, y, seed_seq, *, mode, bootstrap, criterion, min_leaf,
                  max_depth, feature_subset, k_splits) -> TreeNode:
    rng = np.random.default_rng(seed_seq)
    if mode == "purely_random":
        return _grow_purely_random(X, y, k_splits, rng)
    if bootstrap:
        idx = rng.integers(0, X.shape[0], X.shape[0])
        X, y = X[idx], y[idx]
    return grow_tree(
        X, y, criterion=criterion, min_leaf=min_leaf, max_depth=max_depth,
        feature_subset=feature_subset, rng=rng,
    )


def vote(tree_predictions) -> np.ndarray:
    """Majority vote across trees; ties go to +1.

    tree_predictions has one row per tree.
    """
    total = np.sum(np.asarray(tree_predictions, dtype=np.int64), axis=0)
    return np.where(total >= 0, 1, -1).astype(np.int8)


class ForestClassifier(BaseEstimator, ClassifierMixin):
    """Ensemble of randomized trees with majority-vote prediction.

    Parameters
    ----------
    n_trees : int
        Ensemble size.
    criterion : str
        Split criterion of the greedy trees (ignored in purely random
        mode).
    min_leaf, max_depth :
        Passed through to the greedy trees.
    feature_subset : int or None
        Per-node feature draw size for greedy trees; None means
        ceil(sqrt(d)).
    bootstrap : bool
        Resample n training points with replacement per greedy tree.
    mode : {'greedy', 'purely_random'}
        Purely random trees split without looking at labels; k_splits
        caps the number of node splits per tree.
    k_splits : int
        Split budget per purely random tree.
    seed : int
        Master seed; tree i uses the i-th spawned child stream.
    n_jobs : int or None
        Parallel workers for fitting (joblib); None fits serially. The
        result does not depend on this setting.
    """

    def __init__(self, n_trees=100, criterion="gini", min_leaf=1, max_depth=None,
                 feature_subset=None, bootstrap=True, mode="greedy",
                 k_splits=100, seed=0, n_jobs=None):
        self.n_trees = n_trees
        self.criterion = criterion
        self.min_leaf = min_leaf
        self.max_depth = max_depth
        self.feature_subset = feature_subset
        self.bootstrap = bootstrap
        self.mode = mode
        self.k_splits = k_splits
        self.seed = seed
        self.n_jobs = n_jobs

    def fit(self, X, y):
        X = check_features(X)
        y = check_labels(y, n=X.shape[0])
        if self.n_trees < 1:
            raise ValueError("n_trees must be at least 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "greedy" and self.criterion not in criteria.CRITERIA:
            raise ValueError(f"unknown criterion {self.criterion!r}")
        if self.mode == "purely_random" and self.k_splits < 0:
            raise ValueError("k_splits must be nonnegative")
        feature_subset = self.feature_subset
        if feature_subset is None and self.mode == "greedy":
            feature_subset = int(np.ceil(np.sqrt(X.shape[1])))

        streams = np.random.SeedSequence(check_seed(self.seed)).spawn(self.n_trees)
        fit = delayed(_fit_one_tree)
        jobs = (
            fit(X, y, s, mode=self.mode, bootstrap=self.bootstrap,
                criterion=self.criterion, min_leaf=self.min_leaf,
                max_depth=self.max_depth, feature_subset=feature_subset,
                k_splits=self.k_splits)
            for s in streams
        )
        if self.n_jobs is None or self.n_jobs == 1:
            self.trees_ = [f(*args, **kwargs) for f, args, kwargs in jobs]
        else:
            self.trees_ = Parallel(n_jobs=self.n_jobs)(jobs)
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([-1, 1])
        return self

    def predict(self, X):
        X = check_features(X, expected_d=self.n_features_in_)
        return vote([tree_predict(t, X) for t in self.trees_])


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def forest_predict(trees, X) -> np.ndarray:
    """Majority vote of a plain list of tree roots."""
    return vote([tree_predict(t, X) for t in trees])


def forest_to_text(trees, mode: str = "greedy") -> str:
    lines = [f"FOREST {len(trees)} {mode}"]
    for tree in trees:
        lines.extend(tree_to_lines(tree))
    return "\n".join(lines) + "\n"


def forest_from_text(text: str) -> tuple[list[TreeNode], str]:
    """Parse a serialized forest back into (tree roots, mode)."""
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].startswith("FOREST "):
        raise ValueError("expected a FOREST header line")
    _, count, mode = lines[0].split()
    if mode not in MODES:
        raise ValueError(f"unknown forest mode {mode!r}")
    trees = []
    pos = 1
    for _ in range(int(count)):
        tree, pos = tree_from_lines(lines, pos)
        trees.append(tree)
    if pos != len(lines):
        raise ValueError(f"trailing content after line {pos}")
    return trees, mode
