"""Model persistence as self-describing JSON.

Python's float repr round-trips IEEE-754 doubles exactly, so saving and
reloading reproduces every parameter bit-for-bit.
"""

from __future__ import annotations

import json
from pathlib import Path

from .forest import RandomForestClassifier
from .linear import LinearSVMClassifier, LogisticRegressionClassifier
from .naive_bayes import NaiveBayesClassifier
from .neighbors import KNNClassifier

_KINDS = {
    "NaiveBayes": NaiveBayesClassifier,
    "LogisticRegression": LogisticRegressionClassifier,
    "LinearSVM": LinearSVMClassifier,
    "KNN": KNNClassifier,
    "RandomForest": RandomForestClassifier,
}


def save_model(model, path: str | Path) -> None:
    payload = model.to_dict()
    if payload.get("kind") not in _KINDS:
        raise ValueError(f"unknown model kind: {payload.get('kind')!r}")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)


def load_model(path: str | Path):
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    kind = payload.get("kind")
    if kind not in _KINDS:
        raise ValueError(f"unknown model kind: {kind!r}")
    return _KINDS[kind].from_dict(payload)
