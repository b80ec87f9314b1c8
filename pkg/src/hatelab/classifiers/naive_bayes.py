"""Multinomial Naive Bayes with additive smoothing.

Feature values are treated as event counts and must be non-negative; that is
why only count-shaped vectorizers feed this model. Likelihoods use
P(t|c) = (count(t,c) + alpha) / (total(c) + alpha * V) with V the feature
dimension, and class priors come from label frequencies.
"""

from __future__ import annotations

import numpy as np

from .._base import BaseEstimator, check_dataset, check_fitted, check_query
from ..features import SparseVector


class NaiveBayesClassifier(BaseEstimator):
    def __init__(self, alpha: float = 1.0):
        self.alpha = alpha
        self.dim_: int | None = None
        self.log_prior_: np.ndarray | None = None  # [neg, pos]
        self.log_likelihood_: np.ndarray | None = None  # (2, dim)
        self.is_sparse_: bool | None = None

    def fit(self, X, y) -> "NaiveBayesClassifier":
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        X, labels, dim, is_sparse = check_dataset(X, y)
        if labels.all() or not labels.any():
            raise ValueError("naive Bayes needs both classes present in the training data")

        counts = np.zeros((2, dim), dtype=np.float64)
        if is_sparse:
            for vec, label in zip(X, labels):
                if np.any(vec.values < 0):
                    raise ValueError(
                        "naive Bayes requires non-negative feature values; "
                        "got a negative entry"
                    )
                np.add.at(counts[int(label)], vec.indices, vec.values)
        else:
            if np.any(X < 0):
                raise ValueError(
                    "naive Bayes requires non-negative feature values; got a negative entry"
                )
            counts[0] = X[~labels].sum(axis=0)
            counts[1] = X[labels].sum(axis=0)

        totals = counts.sum(axis=1, keepdims=True)
        self.log_likelihood_ = np.log(counts + self.alpha) - np.log(totals + self.alpha * dim)
        n = labels.size
        n_pos = int(labels.sum())
        self.log_prior_ = np.log(np.array([n - n_pos, n_pos], dtype=np.float64) / n)
        self.dim_ = dim
        self.is_sparse_ = is_sparse
        return self

    def _scores(self, x) -> np.ndarray:
        if isinstance(x, SparseVector):
            if np.any(x.values < 0):
                raise ValueError("naive Bayes requires non-negative feature values")
            like = np.array(
                [x.dot_dense(self.log_likelihood_[0]), x.dot_dense(self.log_likelihood_[1])]
            )
        else:
            if np.any(x < 0):
                raise ValueError("naive Bayes requires non-negative feature values")
            like = self.log_likelihood_ @ x
        return self.log_prior_ + like

    def predict_one(self, x) -> bool:
        check_fitted(self, "log_prior_")
        x = check_query(x, self.dim_, self.is_sparse_)
        scores = self._scores(x)
        return bool(scores[1] > scores[0])  # tie goes to the negative class

    def predict(self, X) -> np.ndarray:
        return np.asarray([self.predict_one(x) for x in X], dtype=bool)

    def to_dict(self) -> dict:
        check_fitted(self, "log_prior_")
        return {
            "kind": "NaiveBayes",
            "alpha": self.alpha,
            "dim": self.dim_,
            "is_sparse": self.is_sparse_,
            "log_prior": self.log_prior_.tolist(),
            "log_likelihood": self.log_likelihood_.tolist(),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "NaiveBayesClassifier":
        model = cls(alpha=payload["alpha"])
        model.dim_ = payload["dim"]
        model.is_sparse_ = payload["is_sparse"]
        model.log_prior_ = np.asarray(payload["log_prior"], dtype=np.float64)
        model.log_likelihood_ = np.asarray(payload["log_likelihood"], dtype=np.float64)
        return model
