"""Decision trees and bootstrap-aggregated forests split on Gini impurity.

Each node draws ceil(sqrt(dim)) candidate features from an RNG keyed by
(tree seed, node id), so a tree grown with a larger depth limit is exactly
the shallower tree with some leaves refined. Candidate thresholds are the
midpoints between consecutive distinct sorted values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .._base import BaseEstimator, check_dataset, check_fitted, check_query
from ..features import SparseVector


@dataclass
class TreeNode:
    """Internal node (feature, threshold, children) or leaf (class counts)."""

    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    counts: tuple[int, int] | None = None  # (negatives, positives)

    @property
    def is_leaf(self) -> bool:
        return self.counts is not None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"counts": list(self.counts)}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "TreeNode":
        if "counts" in payload:
            return cls(counts=tuple(payload["counts"]))
        return cls(
            feature=payload["feature"],
            threshold=payload["threshold"],
            left=cls.from_dict(payload["left"]),
            right=cls.from_dict(payload["right"]),
        )


class _Columns:
    """Column access over training rows; sparse uses a reusable scratch buffer."""

    def __init__(self, X, dim: int, is_sparse: bool):
        self.is_sparse = is_sparse
        if is_sparse:
            per_feature: dict[int, tuple[list[int], list[float]]] = {}
            for row, vec in enumerate(X):
                for idx, val in zip(vec.indices, vec.values):
                    rows, vals = per_feature.setdefault(int(idx), ([], []))
                    rows.append(row)
                    vals.append(float(val))
            self._columns = {
                f: (np.asarray(rows, dtype=np.int64), np.asarray(vals, dtype=np.float64))
                for f, (rows, vals) in per_feature.items()
            }
            self._scratch = np.zeros(len(X), dtype=np.float64)
        else:
            self._dense = X

    def column(self, feature: int, rows: np.ndarray) -> np.ndarray:
        if not self.is_sparse:
            return self._dense[rows, feature]
        entry = self._columns.get(feature)
        if entry is None:
            return np.zeros(rows.size, dtype=np.float64)
        feat_rows, feat_vals = entry
        self._scratch[feat_rows] = feat_vals
        out = self._scratch[rows].copy()
        self._scratch[feat_rows] = 0.0
        return out


def _leaf(y_node: np.ndarray) -> TreeNode:
    pos = int(y_node.sum())
    return TreeNode(counts=(int(y_node.size - pos), pos))


def _best_split(vals: np.ndarray, y_node: np.ndarray) -> tuple[float, float] | None:
    """Lowest weighted Gini impurity over midpoint thresholds, or None."""
    order = np.argsort(vals, kind="stable")
    sv = vals[order]
    sy = y_node[order].astype(np.float64)
    boundaries = np.nonzero(sv[:-1] < sv[1:])[0]
    if boundaries.size == 0:
        return None
    m = sv.size
    prefix_pos = np.cumsum(sy)
    total_pos = prefix_pos[-1]
    nl = boundaries.astype(np.float64) + 1.0
    nr = m - nl
    pl = prefix_pos[boundaries]
    pr = total_pos - pl
    gini_l = 1.0 - (pl / nl) ** 2 - ((nl - pl) / nl) ** 2
    gini_r = 1.0 - (pr / nr) ** 2 - ((nr - pr) / nr) ** 2
    weighted = (nl * gini_l + nr * gini_r) / m
    j = int(np.argmin(weighted))
    threshold = 0.5 * (sv[boundaries[j]] + sv[boundaries[j] + 1])
    return float(weighted[j]), threshold


def _grow(
    columns: _Columns,
    rows: np.ndarray,
    labels: np.ndarray,
    dim: int,
    mtry: int,
    max_depth: int,
    tree_seed: int,
    depth: int = 0,
    node_id: int = 1,
) -> TreeNode:
    y_node = labels[rows]
    if depth >= max_depth or rows.size < 2 or y_node.all() or not y_node.any():
        return _leaf(y_node)

    rng = np.random.default_rng([tree_seed, node_id])
    features = rng.choice(dim, size=min(mtry, dim), replace=False)

    best: tuple[float, int, float, np.ndarray] | None = None
    for feature in features:
        vals = columns.column(int(feature), rows)
        found = _best_split(vals, y_node)
        if found is None:
            continue
        impurity, threshold = found
        if best is None or impurity < best[0]:
            best = (impurity, int(feature), threshold, vals)
    if best is None:
        return _leaf(y_node)

    _, feature, threshold, vals = best
    go_left = vals <= threshold
    if not go_left.any() or go_left.all():  # degenerate midpoint rounding
        return _leaf(y_node)
    left = _grow(
        columns, rows[go_left], labels, dim, mtry, max_depth, tree_seed, depth + 1, 2 * node_id
    )
    right = _grow(
        columns, rows[~go_left], labels, dim, mtry, max_depth, tree_seed, depth + 1, 2 * node_id + 1
    )
    return TreeNode(feature=feature, threshold=threshold, left=left, right=right)


def _value_at(x, feature: int) -> float:
    if isinstance(x, SparseVector):
        pos = np.searchsorted(x.indices, feature)
        if pos < x.indices.size and x.indices[pos] == feature:
            return float(x.values[pos])
        return 0.0
    return float(x[feature])


def _walk(node: TreeNode, x) -> tuple[int, int]:
    while not node.is_leaf:
        node = node.left if _value_at(x, node.feature) <= node.threshold else node.right
    return node.counts


def _tree_predict(node: TreeNode, x) -> bool:
    neg, pos = _walk(node, x)
    return pos > neg  # leaf tie goes negative


def _tree_seeds(seed: int, n_trees: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(n_trees)]


class DecisionTreeClassifier(BaseEstimator):
    """Single Gini tree on the full training set (no bootstrap)."""

    def __init__(self, max_depth: int = 16, seed: int = 42):
        self.max_depth = max_depth
        self.seed = seed
        self.root_: TreeNode | None = None
        self.dim_: int | None = None
        self.is_sparse_: bool | None = None

    def fit(self, X, y) -> "DecisionTreeClassifier":
        X, labels, dim, is_sparse = check_dataset(X, y)
        columns = _Columns(X, dim, is_sparse)
        rows = np.arange(labels.size, dtype=np.int64)
        mtry = int(math.ceil(math.sqrt(dim)))
        tree_seed = _tree_seeds(self.seed, 1)[0]
        self.root_ = _grow(columns, rows, labels, dim, mtry, self.max_depth, tree_seed)
        self.dim_ = dim
        self.is_sparse_ = is_sparse
        return self

    def predict_one(self, x) -> bool:
        check_fitted(self, "root_")
        x = check_query(x, self.dim_, self.is_sparse_)
        return _tree_predict(self.root_, x)

    def predict(self, X) -> np.ndarray:
        return np.asarray([self.predict_one(x) for x in X], dtype=bool)


class RandomForestClassifier(BaseEstimator):
    """Majority vote over bootstrap-sampled Gini trees; forest tie goes negative."""

    def __init__(
        self,
        n_trees: int = 100,
        max_depth: int = 16,
        bootstrap: bool = True,
        seed: int = 42,
    ):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.bootstrap = bootstrap
        self.seed = seed
        self.trees_: list[TreeNode] | None = None
        self.dim_: int | None = None
        self.is_sparse_: bool | None = None

    def fit(self, X, y) -> "RandomForestClassifier":
        if self.n_trees < 1:
            raise ValueError(f"n_trees must be >= 1, got {self.n_trees}")
        X, labels, dim, is_sparse = check_dataset(X, y)
        columns = _Columns(X, dim, is_sparse)
        mtry = int(math.ceil(math.sqrt(dim)))
        n = labels.size
        self.trees_ = []
        for tree_seed in _tree_seeds(self.seed, self.n_trees):
            if self.bootstrap:
                rows = np.random.default_rng([tree_seed, 0]).integers(0, n, size=n)
            else:
                rows = np.arange(n, dtype=np.int64)
            self.trees_.append(
                _grow(columns, rows, labels, dim, mtry, self.max_depth, tree_seed)
            )
        self.dim_ = dim
        self.is_sparse_ = is_sparse
        return self

    def bootstrap_rows(self, tree_index: int, n_rows: int) -> np.ndarray:
        """The exact sample rows tree `tree_index` was grown on."""
        tree_seed = _tree_seeds(self.seed, self.n_trees)[tree_index]
        if not self.bootstrap:
            return np.arange(n_rows, dtype=np.int64)
        return np.random.default_rng([tree_seed, 0]).integers(0, n_rows, size=n_rows)

    def predict_one(self, x) -> bool:
        check_fitted(self, "trees_")
        x = check_query(x, self.dim_, self.is_sparse_)
        votes = sum(1 for tree in self.trees_ if _tree_predict(tree, x))
        return votes * 2 > len(self.trees_)

    def predict(self, X) -> np.ndarray:
        return np.asarray([self.predict_one(x) for x in X], dtype=bool)

    def to_dict(self) -> dict:
        check_fitted(self, "trees_")
        return {
            "kind": "RandomForest",
            **self.get_params(),
            "dim": self.dim_,
            "is_sparse": self.is_sparse_,
            "trees": [tree.to_dict() for tree in self.trees_],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "RandomForestClassifier":
        model = cls(
            n_trees=payload["n_trees"],
            max_depth=payload["max_depth"],
            bootstrap=payload["bootstrap"],
            seed=payload["seed"],
        )
        model.dim_ = payload["dim"]
        model.is_sparse_ = payload["is_sparse"]
        model.trees_ = [TreeNode.from_dict(t) for t in payload["trees"]]
        return model
