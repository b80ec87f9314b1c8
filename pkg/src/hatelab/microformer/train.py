"""Minibatch SGD for the transformer, in full or adapter-only mode."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..classifiers.linear import TrainingDivergedError
from .model import (
    TransformerClassifier,
    loss_and_grads_padded,
    pad_batch,
    total_parameters,
    trainable_parameters,
)

__all__ = ["TrainReport", "train", "predict"]


@dataclass
class TrainReport:
    mode: str
    epoch_losses: list[float] = field(default_factory=list)
    epoch_accuracies: list[float] = field(default_factory=list)
    epoch_seconds: list[float] = field(default_factory=list)
    trainable_params: int = 0
    total_params: int = 0

    @property
    def epochs(self) -> int:
        return len(self.epoch_losses)


def predict(
    model: TransformerClassifier,
    sequences: Sequence[Sequence[int]],
    batch_size: int = 64,
) -> np.ndarray:
    """Boolean predictions; a logit tie falls back to the negative class."""
    out = np.zeros(len(sequences), dtype=bool)
    for start in range(0, len(sequences), batch_size):
        chunk = sequences[start : start + batch_size]
        ids, mask = pad_batch(chunk, model.config.max_seq_len)
        logits, _ = model.forward_batch(ids, mask)
        out[start : start + len(chunk)] = logits[:, 1] > logits[:, 0]
    return out


def train(
    model: TransformerClassifier,
    sequences: Sequence[Sequence[int]],
    labels: Sequence[bool],
    epochs: int = 10,
    lr: float = 0.1,
    batch_size: int = 64,
    seed: int = 42,
    mode: str = "full",
    track_accuracy: bool = True,
) -> TrainReport:
    """Trains in place and reports per-epoch loss, accuracy and wall-clock.

    mode "full" updates every parameter of a plain model; mode "lora"
    requires attached adapters and touches only what they left trainable.
    With track_accuracy off the per-epoch accuracy pass is skipped, so
    epoch timings cover exactly one forward/backward sweep.
    """
    if mode not in ("full", "lora"):
        raise ValueError(f"mode must be 'full' or 'lora', got {mode!r}")
    if mode == "lora" and not model.has_adapters():
        raise ValueError("mode 'lora' requires a model with attached adapters")
    if mode == "full" and model.has_adapters():
        raise ValueError("mode 'full' requires a plain model; merge adapters first")
    if len(sequences) != len(labels):
        raise ValueError("sequences and labels must have equal length")
    if not sequences:
        raise ValueError("cannot train on an empty dataset")
    if epochs < 1 or batch_size < 1:
        raise ValueError("epochs and batch_size must be >= 1")

    n = len(sequences)
    # Pad the whole dataset once; epochs then shuffle row indices and trim
    # each batch to its own longest sequence.
    ids_all, mask_all = pad_batch(sequences, model.config.max_seq_len)
    lengths = mask_all.sum(axis=1)
    y_all = np.asarray([int(bool(v)) for v in labels], dtype=np.int64)
    params = model.param_map()
    rng = np.random.default_rng(seed)
    report = TrainReport(
        mode=mode,
        trainable_params=trainable_parameters(model),
        total_params=total_parameters(model),
    )

    for epoch in range(epochs):
        started = time.perf_counter()
        order = rng.permutation(n)
        loss_sum = 0.0
        for start in range(0, n, batch_size):
            take = order[start : start + batch_size]
            tmax = int(lengths[take].max())
            loss, grads = loss_and_grads_padded(
                model,
                ids_all[take, :tmax],
                mask_all[take, :tmax],
                y_all[take],
                rng=rng,
            )
            if not np.isfinite(loss):
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch}; lower the learning rate"
                )
            for name, grad in grads.items():
                param = params[name]
                param.value -= lr * grad
            loss_sum += loss * len(take)
        report.epoch_losses.append(loss_sum / n)
        report.epoch_seconds.append(time.perf_counter() - started)
        if track_accuracy:
            hits = predict(model, sequences, batch_size) == np.asarray(
                [bool(v) for v in labels]
            )
            report.epoch_accuracies.append(float(hits.mean()))
    return report
