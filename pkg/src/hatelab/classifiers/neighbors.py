"""k-nearest-neighbor classification by Euclidean distance.

k must be odd so majority votes cannot tie; exact distance ties are broken by
the lower training index, which makes predictions deterministic. Sparse
distances use ||a||^2 - 2 a.b + ||b||^2 over stored entries only.
"""

from __future__ import annotations

import numpy as np

from .._base import BaseEstimator, check_dataset, check_fitted, check_query
from ..features import SparseVector


class KNNClassifier(BaseEstimator):
    def __init__(self, k: int = 5):
        self.k = k
        self.X_: list | np.ndarray | None = None
        self.y_: np.ndarray | None = None
        self.dim_: int | None = None
        self.is_sparse_: bool | None = None
        self._train_sq_norms: np.ndarray | None = None

    def fit(self, X, y) -> "KNNClassifier":
        if self.k % 2 == 0 or self.k < 1:
            raise ValueError(f"k must be a positive odd integer, got {self.k}")
        X, labels, dim, is_sparse = check_dataset(X, y)
        if self.k > labels.size:
            raise ValueError(f"k={self.k} exceeds training size {labels.size}")
        self.X_ = X
        self.y_ = labels
        self.dim_ = dim
        self.is_sparse_ = is_sparse
        if is_sparse:
            self._train_sq_norms = np.asarray([float(np.dot(v.values, v.values)) for v in X])
        return self

    def _sq_distances(self, x) -> np.ndarray:
        if self.is_sparse_:
            # scratch buffer lets each train row's dot touch only its entries
            scratch = np.zeros(self.dim_, dtype=np.float64)
            scratch[x.indices] = x.values
            q_norm = float(np.dot(x.values, x.values))
            cross = np.asarray([v.dot_dense(scratch) for v in self.X_])
            return self._train_sq_norms - 2.0 * cross + q_norm
        diffs = self.X_ - x
        return np.einsum("ij,ij->i", diffs, diffs)

    def predict_one(self, x) -> bool:
        check_fitted(self, "y_")
        x = check_query(x, self.dim_, self.is_sparse_)
        d2 = self._sq_distances(x)
        # stable sort keeps lower training indices first among equal distances
        nearest = np.argsort(d2, kind="stable")[: self.k]
        votes = int(self.y_[nearest].sum())
        return votes * 2 > self.k

    def predict(self, X) -> np.ndarray:
        return np.asarray([self.predict_one(x) for x in X], dtype=bool)

    def to_dict(self) -> dict:
        check_fitted(self, "y_")
        if self.is_sparse_:
            rows = [
                {"indices": v.indices.tolist(), "values": v.values.tolist()} for v in self.X_
            ]
        else:
            rows = self.X_.tolist()
        return {
            "kind": "KNN",
            "k": self.k,
            "dim": self.dim_,
            "is_sparse": self.is_sparse_,
            "X": rows,
            "y": [bool(v) for v in self.y_],
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "KNNClassifier":
        model = cls(k=payload["k"])
        dim = payload["dim"]
        if payload["is_sparse"]:
            X = [
                SparseVector(
                    dim=dim,
                    indices=np.asarray(r["indices"], dtype=np.int64),
                    values=np.asarray(r["values"], dtype=np.float64),
                )
                for r in payload["X"]
            ]
        else:
            X = np.asarray(payload["X"], dtype=np.float64)
        return model.fit(X, payload["y"])
