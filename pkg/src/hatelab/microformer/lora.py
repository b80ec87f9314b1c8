"""Low-rank adaptation: freeze the base model, train small side matrices.

``attach_lora`` returns a deep copy whose selected attention projections
carry rank-r adapters (A drawn from N(0, 0.02), B zeroed, so the adapted
model starts out computing exactly what the base model computes).
``merge_lora`` folds the adapters back into the weights and unfreezes
everything.
"""

from __future__ import annotations

import copy
from typing import Iterable

import numpy as np

from .model import LoraAdapter, Param, TransformerClassifier

__all__ = ["attach_lora", "merge_lora", "DEFAULT_TARGETS"]

# Which attention projections receive adapters by default.
DEFAULT_TARGETS = ("wq", "wv")

_ALLOWED_TARGETS = {"wq", "wk", "wv", "wo"}

_INIT_STD = 0.02


def attach_lora(
    model: TransformerClassifier,
    r: int = 8,
    alpha: float = 16.0,
    targets: Iterable[str] = DEFAULT_TARGETS,
    seed: int = 0,
    train_head: bool = True,
) -> TransformerClassifier:
    """Adapted copy of ``model``; the original is left untouched."""
    targets = tuple(targets)
    if not targets:
        raise ValueError("targets must not be empty")
    bad = [t for t in targets if t not in _ALLOWED_TARGETS]
    if bad:
        raise ValueError(f"unknown adapter targets: {bad}; allowed: {sorted(_ALLOWED_TARGETS)}")
    if r < 1:
        raise ValueError(f"rank must be >= 1, got {r}")

    adapted = copy.deepcopy(model)
    if adapted.has_adapters():
        raise ValueError("model already carries adapters")
    adapted.set_trainable(False)

    rng = np.random.default_rng(seed)
    for layer in adapted.layers:
        for target in targets:
            lin = getattr(layer.attn, target)
            if r >= min(lin.d_in, lin.d_out):
                raise ValueError(
                    f"rank {r} must be smaller than min(d_in, d_out) = "
                    f"{min(lin.d_in, lin.d_out)} for {lin.name}"
                )
            a = Param(
                f"{lin.name}.lora.a",
                rng.normal(0.0, _INIT_STD, size=(r, lin.d_in)),
                trainable=True,
            )
            b = Param(
                f"{lin.name}.lora.b",
                np.zeros((lin.d_out, r)),
                trainable=True,
            )
            lin.lora = LoraAdapter(a, b, r, alpha)

    if train_head:
        adapted.head.w.trainable = True
        adapted.head.b.trainable = True
    return adapted


def merge_lora(model: TransformerClassifier) -> TransformerClassifier:
    """Plain model computing the same function as the adapted one: each
    base weight absorbs scale * (B @ A) transposed into (d_in, d_out)."""
    if not model.has_adapters():
        raise ValueError("model has no adapters to merge")
    merged = copy.deepcopy(model)
    for lin in merged.linears().values():
        if lin.lora is None:
            continue
        lora = lin.lora
        lin.w.value = lin.w.value + lora.scale * (lora.b.value @ lora.a.value).T
        lin.lora = None
    merged.set_trainable(True)
    return merged
