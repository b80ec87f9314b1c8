"""Linear models trained by mini-batch (sub)gradient descent.

Both models share the margin machinery: z_i = w . x_i + b, prediction is
z > 0. The objective functions are standalone so they can be checked against
central finite differences independently of the training loop.

Logistic regression: J(w, b) = mean log(1 + exp(-y_pm * z)) + (l2 / 2) ||w||^2
Linear SVM:          J(w, b) = mean max(0, 1 - y_pm * z) + lam * ||w||^2

with y_pm in {-1, +1}; biases are never regularized.
"""

from __future__ import annotations

import numpy as np

from .._base import BaseEstimator, check_dataset, check_fitted, check_query
from ..features import SparseVector


class TrainingDivergedError(RuntimeError):
    """Non-finite loss during training; reduce the learning rate."""


def _margins(X, w: np.ndarray, b: float, is_sparse: bool) -> np.ndarray:
    if is_sparse:
        return np.asarray([vec.dot_dense(w) for vec in X]) + b
    return X @ w + b


def _accumulate(grad_w: np.ndarray, X, coefs: np.ndarray, is_sparse: bool) -> None:
    """grad_w += sum_i coefs[i] * x_i, touching only stored entries when sparse."""
    if is_sparse:
        for vec, c in zip(X, coefs):
            if c != 0.0:
                np.add.at(grad_w, vec.indices, c * vec.values)
    else:
        grad_w += coefs @ X


def logistic_objective(
    w: np.ndarray, b: float, X, y: np.ndarray, l2: float, is_sparse: bool
) -> tuple[float, np.ndarray, float]:
    """Full-batch logistic loss with L2 penalty; returns (loss, grad_w, grad_b)."""
    n = len(X)
    z = _margins(X, w, b, is_sparse)
    y_pm = np.where(y, 1.0, -1.0)
    # log(1 + exp(-m)) computed stably for both signs of m
    m = y_pm * z
    loss = float(np.mean(np.logaddexp(0.0, -m))) + 0.5 * l2 * float(np.dot(w, w))
    sigma = 1.0 / (1.0 + np.exp(-z))
    coefs = (sigma - y.astype(np.float64)) / n
    grad_w = l2 * w.copy()
    _accumulate(grad_w, X, coefs, is_sparse)
    grad_b = float(np.sum(coefs))
    return loss, grad_w, grad_b


def hinge_objective(
    w: np.ndarray, b: float, X, y: np.ndarray, lam: float, is_sparse: bool
) -> tuple[float, np.ndarray, float]:
    """Full-batch hinge loss with lam * ||w||^2; subgradient at kinks uses 0."""
    n = len(X)
    z = _margins(X, w, b, is_sparse)
    y_pm = np.where(y, 1.0, -1.0)
    slack = 1.0 - y_pm * z
    loss = float(np.mean(np.maximum(slack, 0.0))) + lam * float(np.dot(w, w))
    active = slack > 0.0
    coefs = np.where(active, -y_pm, 0.0) / n
    grad_w = 2.0 * lam * w
    _accumulate(grad_w, X, coefs, is_sparse)
    grad_b = float(np.sum(coefs))
    return loss, grad_w, grad_b


class _LinearModelBase(BaseEstimator):
    """Shared fit/predict loop; subclasses provide the batch objective."""

    def _batch_gradient(self, w, b, X_batch, y_batch, is_sparse):
        raise NotImplementedError

    def _fit_loop(self, X, y) -> "_LinearModelBase":
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        X, labels, dim, is_sparse = check_dataset(X, y)
        rng = np.random.default_rng(self.seed)
        w = np.zeros(dim, dtype=np.float64)
        b = 0.0
        n = labels.size
        batch_size = max(1, min(self.batch_size, n))
        take = (lambda idx: [X[i] for i in idx]) if is_sparse else (lambda idx: X[idx])

        for _ in range(self.epochs):
            order = rng.permutation(n)
            for start in range(0, n, batch_size):
                idx = order[start : start + batch_size]
                loss, grad_w, grad_b = self._batch_gradient(
                    w, b, take(idx), labels[idx], is_sparse
                )
                if not np.isfinite(loss):
                    raise TrainingDivergedError(
                        f"loss became non-finite; try a learning rate below {self.lr}"
                    )
                w -= self.lr * grad_w
                b -= self.lr * grad_b

        self.weights_ = w
        self.bias_ = b
        self.dim_ = dim
        self.is_sparse_ = is_sparse
        return self

    def decision_function_one(self, x) -> float:
        check_fitted(self, "weights_")
        x = check_query(x, self.dim_, self.is_sparse_)
        if isinstance(x, SparseVector):
            return x.dot_dense(self.weights_) + self.bias_
        return float(self.weights_ @ x + self.bias_)

    def predict_one(self, x) -> bool:
        return self.decision_function_one(x) > 0.0

    def predict(self, X) -> np.ndarray:
        return np.asarray([self.predict_one(x) for x in X], dtype=bool)

    def _fitted_payload(self) -> dict:
        check_fitted(self, "weights_")
        return {
            "dim": self.dim_,
            "is_sparse": self.is_sparse_,
            "weights": self.weights_.tolist(),
            "bias": self.bias_,
        }

    def _restore_fitted(self, payload: dict) -> None:
        self.dim_ = payload["dim"]
        self.is_sparse_ = payload["is_sparse"]
        self.weights_ = np.asarray(payload["weights"], dtype=np.float64)
        self.bias_ = float(payload["bias"])


class LogisticRegressionClassifier(_LinearModelBase):
    def __init__(
        self,
        lr: float = 0.5,
        l2: float = 0.0,
        epochs: int = 30,
        batch_size: int = 32,
        seed: int = 42,
    ):
        self.lr = lr
        self.l2 = l2
        self.epochs = epochs
        self.batch_size = batch_size
        self.seed = seed
        self.weights_: np.ndarray | None = None
        self.bias_: float | None = None
        self.dim_: int | None = None
        self.is_sparse_: bool | None = None

    def _batch_gradient(self, w, b, X_batch, y_batch, is_sparse):
        return logistic_objective(w, b, X_batch, y_batch, self.l2, is_sparse)

    def fit(self, X, y) -> "LogisticRegressionClassifier":
        if self.l2 < 0:
            raise ValueError(f"l2 must be >= 0, got {self.l2}")
        return self._fit_loop(X, y)

    def to_dict(self) -> dict:
        return {"kind": "LogisticRegression", **self.get_params(), **self._fitted_payload()}

    @classmethod
    def from_dict(cls, payload: dict) -> "LogisticRegressionClassifier":
        model = cls(
            lr=payload["lr"],
            l2=payload["l2"],
            epochs=payload["epochs"],
            batch_size=payload["batch_size"],
            seed=payload["seed"],
        )
        model._restore_fitted(payload)
        return model


class LinearSVMClassifier(_LinearModelBase):
    def __init__(
        self,
        lam: float = 0.01,
        lr: float = 0.5,
        epochs: int = 30,
        batch_size: int = 32,
        seed: int = 42,
    ):
        self.lam = lam
        self.lr = lr
        self.epochs = epochs
        self.batch_size = batch_size
        self.seed = seed
        self.weights_: np.ndarray | None = None
        self.bias_: float | None = None
        self.dim_: int | None = None
        self.is_sparse_: bool | None = None

    def _batch_gradient(self, w, b, X_batch, y_batch, is_sparse):
        return hinge_objective(w, b, X_batch, y_batch, self.lam, is_sparse)

    def fit(self, X, y) -> "LinearSVMClassifier":
        if self.lam < 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        return self._fit_loop(X, y)

    def to_dict(self) -> dict:
        return {"kind": "LinearSVM", **self.get_params(), **self._fitted_payload()}

    @classmethod
    def from_dict(cls, payload: dict) -> "LinearSVMClassifier":
        model = cls(
            lam=payload["lam"],
            lr=payload["lr"],
            epochs=payload["epochs"],
            batch_size=payload["batch_size"],
            seed=payload["seed"],
        )
        model._restore_fitted(payload)
        return model
