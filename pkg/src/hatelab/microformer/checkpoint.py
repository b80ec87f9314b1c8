"""Model and adapter persistence as .npz archives.

Base checkpoints hold the config (as a JSON string) plus one array per
parameter.  Adapters are stored separately so a single base checkpoint
can back any number of fine-tunes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .config import ModelConfig
from .lora import attach_lora
from .model import TransformerClassifier, init_model

__all__ = ["save_checkpoint", "load_checkpoint", "save_adapters", "load_adapters"]

_PARAM_PREFIX = "param::"


def save_checkpoint(model: TransformerClassifier, path: str | Path) -> None:
    if model.has_adapters():
        raise ValueError(
            "cannot checkpoint an adapted model; merge it or save adapters separately"
        )
    arrays = {_PARAM_PREFIX + p.name: p.value for p in model.params()}
    np.savez(
        path,
        __config__=np.array(json.dumps(model.config.to_dict())),
        **arrays,
    )


def load_checkpoint(path: str | Path) -> TransformerClassifier:
    with np.load(path, allow_pickle=False) as archive:
        config = ModelConfig.from_dict(json.loads(str(archive["__config__"])))
        model = init_model(config, seed=0)
        params = model.param_map()
        seen = set()
        for key in archive.files:
            if not key.startswith(_PARAM_PREFIX):
                continue
            name = key[len(_PARAM_PREFIX) :]
            if name not in params:
                raise ValueError(f"checkpoint has unknown parameter {name!r}")
            stored = archive[key]
            if stored.shape != params[name].value.shape:
                raise ValueError(
                    f"checkpoint shape mismatch for {name!r}: "
                    f"{stored.shape} vs {params[name].value.shape}"
                )
            params[name].value = stored.astype(np.float64)
            seen.add(name)
    missing = set(params) - seen
    if missing:
        raise ValueError(f"checkpoint is missing parameters: {sorted(missing)}")
    return model


def save_adapters(model: TransformerClassifier, path: str | Path) -> None:
    if not model.has_adapters():
        raise ValueError("model has no adapters to save")
    targets = []
    arrays = {}
    r = alpha = None
    for name, lin in model.linears().items():
        if lin.lora is None:
            continue
        target = name.rsplit(".", 1)[-1]
        if target not in targets:
            targets.append(target)
        r, alpha = lin.lora.r, lin.lora.alpha
        arrays[_PARAM_PREFIX + lin.lora.a.name] = lin.lora.a.value
        arrays[_PARAM_PREFIX + lin.lora.b.name] = lin.lora.b.value
    meta = {
        "r": r,
        "alpha": alpha,
        "targets": targets,
        "train_head": bool(model.head.w.trainable),
    }
    if meta["train_head"]:
        arrays[_PARAM_PREFIX + model.head.w.name] = model.head.w.value
        arrays[_PARAM_PREFIX + model.head.b.name] = model.head.b.value
    np.savez(path, __adapters__=np.array(json.dumps(meta)), **arrays)


def load_adapters(
    base: TransformerClassifier, path: str | Path
) -> TransformerClassifier:
    """Re-attaches saved adapters (and head, if it was trained) onto a
    copy of ``base``."""
    with np.load(path, allow_pickle=False) as archive:
        if "__adapters__" not in archive.files:
            raise ValueError("not an adapter archive")
        meta = json.loads(str(archive["__adapters__"]))
        adapted = attach_lora(
            base,
            r=int(meta["r"]),
            alpha=float(meta["alpha"]),
            targets=meta["targets"],
            train_head=bool(meta["train_head"]),
        )
        for name, lin in adapted.linears().items():
            if lin.lora is None:
                continue
            lin.lora.a.value = archive[_PARAM_PREFIX + lin.lora.a.name].astype(np.float64)
            lin.lora.b.value = archive[_PARAM_PREFIX + lin.lora.b.name].astype(np.float64)
        if meta["train_head"]:
            adapted.head.w.value = archive[_PARAM_PREFIX + adapted.head.w.name].astype(
                np.float64
            )
            adapted.head.b.value = archive[_PARAM_PREFIX + adapted.head.b.name].astype(
                np.float64
            )
    return adapted
