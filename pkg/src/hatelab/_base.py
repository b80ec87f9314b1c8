"""Estimator plumbing: get_params/set_params and input validation helpers.

The estimators here follow the familiar fit/transform/predict conventions so
they compose with pipeline-style tooling, without pulling in an external
dependency for the base class.
"""

from __future__ import annotations

import inspect

import numpy as np


class BaseEstimator:
    """Parameter introspection via the constructor signature.

    Subclasses must store every constructor argument on ``self`` under the
    same name and do no other work in ``__init__``.
    """

    @classmethod
    def _param_names(cls) -> list[str]:
        sig = inspect.signature(cls.__init__)
        return [name for name in sig.parameters if name != "self"]

    def get_params(self) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params) -> "BaseEstimator":
        valid = set(self._param_names())
        for name, value in params.items():
            if name not in valid:
                raise ValueError(f"invalid parameter {name!r} for {type(self).__name__}")
            setattr(self, name, value)
        return self

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"


class NotFittedError(RuntimeError):
    pass


def check_fitted(estimator, attribute: str) -> None:
    if getattr(estimator, attribute, None) is None:
        raise NotFittedError(f"{type(estimator).__name__} is not fitted yet; call fit first")


def check_labels(y) -> np.ndarray:
    labels = np.asarray([bool(v) for v in y], dtype=bool)
    if labels.size == 0:
        raise ValueError("labels must be nonempty")
    return labels


def check_dataset(X, y) -> tuple[list | np.ndarray, np.ndarray, int, bool]:
    """Validate a feature list plus labels.

    Returns (features, labels, dim, is_sparse). Features are either a list of
    SparseVector (all sharing one dim) or a dense float64 matrix.
    """
    from .features import SparseVector

    labels = check_labels(y)
    if isinstance(X, np.ndarray):
        dense = np.asarray(X, dtype=np.float64)
        if dense.ndim != 2:
            raise ValueError(f"dense features must be 2-D, got shape {dense.shape}")
        if dense.shape[0] != labels.size:
            raise ValueError(f"{dense.shape[0]} feature rows but {labels.size} labels")
        return dense, labels, dense.shape[1], False
    X = list(X)
    if len(X) != labels.size:
        raise ValueError(f"{len(X)} feature rows but {labels.size} labels")
    if len(X) == 0:
        raise ValueError("features must be nonempty")
    if all(isinstance(v, SparseVector) for v in X):
        dim = X[0].dim
        for v in X:
            if v.dim != dim:
                raise ValueError(f"inconsistent feature dims: {v.dim} vs {dim}")
        return X, labels, dim, True
    dense = np.asarray(X, dtype=np.float64)
    if dense.ndim != 2:
        raise ValueError("features must be SparseVectors or rows of equal length")
    return dense, labels, dense.shape[1], False


def check_query(x, dim: int, is_sparse: bool):
    """Validate a single feature vector against a fitted model's dim and kind."""
    from .features import SparseVector

    if isinstance(x, SparseVector):
        if not is_sparse:
            raise ValueError("model was fitted on dense features but got a SparseVector")
        if x.dim != dim:
            raise ValueError(f"feature dim {x.dim} does not match model dim {dim}")
        return x
    if is_sparse:
        raise ValueError("model was fitted on sparse features but got a dense vector")
    arr = np.asarray(x, dtype=np.float64).ravel()
    if arr.shape[0] != dim:
        raise ValueError(f"feature dim {arr.shape[0]} does not match model dim {dim}")
    return arr
