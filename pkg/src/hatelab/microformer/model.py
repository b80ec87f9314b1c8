"""Pre-norm transformer encoder for binary text classification.

Everything is plain float64 numpy.  Forward passes record whatever the
matching backward pass needs, and gradients are accumulated only for
parameters whose ``trainable`` flag is set, so a model with frozen base
weights never pays for the large weight-gradient matmuls.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .config import ModelConfig

__all__ = [
    "Param",
    "LoraAdapter",
    "TransformerClassifier",
    "init_model",
    "pad_batch",
    "forward_logits",
    "loss_and_grads",
    "loss_and_grads_padded",
    "total_parameters",
    "trainable_parameters",
]

# Additive attention bias for masked-out keys.  Large enough that the
# post-softmax weight underflows to exactly 0.0 in float64.
_MASK_BIAS = -1.0e9

_INIT_STD = 0.02


class Param:
    """A named tensor with a trainable flag."""

    __slots__ = ("name", "value", "trainable")

    def __init__(self, name: str, value: np.ndarray, trainable: bool = True):
        self.name = name
        self.value = value
        self.trainable = trainable

    @property
    def size(self) -> int:
        return int(self.value.size)

    def __repr__(self) -> str:
        flag = "trainable" if self.trainable else "frozen"
        return f"Param({self.name!r}, shape={self.value.shape}, {flag})"


class Grads(dict):
    """name -> gradient array, accumulated across uses of a parameter."""

    def add(self, name: str, value: np.ndarray) -> None:
        if name in self:
            self[name] += value
        else:
            self[name] = value


class LoraAdapter:
    """Low-rank additive delta for one linear projection.

    Applies ``scale * (x @ A.T) @ B.T`` next to the frozen base weight,
    with ``A`` of shape (r, d_in) and ``B`` of shape (d_out, r).
    """

    __slots__ = ("a", "b", "r", "alpha")

    def __init__(self, a: Param, b: Param, r: int, alpha: float):
        self.a = a
        self.b = b
        self.r = r
        self.alpha = alpha

    @property
    def scale(self) -> float:
        return self.alpha / self.r


class Linear:
    def __init__(self, name: str, d_in: int, d_out: int, rng: np.random.Generator):
        self.name = name
        self.d_in = d_in
        self.d_out = d_out
        self.w = Param(f"{name}.w", rng.normal(0.0, _INIT_STD, size=(d_in, d_out)))
        self.b = Param(f"{name}.b", np.zeros(d_out))
        self.lora: LoraAdapter | None = None

    def params(self) -> Iterable[Param]:
        yield self.w
        yield self.b
        if self.lora is not None:
            yield self.lora.a
            yield self.lora.b

    def has_trainable(self) -> bool:
        return any(p.trainable for p in self.params())

    def effective_weight(self) -> np.ndarray:
        """Base weight with the low-rank delta folded in: W + (alpha/r)(BA)^T.
        Rebuilding this per forward is a (d_in x r x d_out) matmul, which is
        negligible next to the main (n x d_in x d_out) projection."""
        if self.lora is None:
            return self.w.value
        lora = self.lora
        return self.w.value + lora.scale * (lora.b.value @ lora.a.value).T

    def forward(self, x: np.ndarray, cache: dict) -> np.ndarray:
        w_eff = self.effective_weight()
        cache["x"] = x
        cache["w_eff"] = w_eff
        # One flat GEMM; a 3-D matmul would dispatch per batch row instead.
        y = x.reshape(-1, self.d_in) @ w_eff
        y += self.b.value
        return y.reshape(*x.shape[:-1], self.d_out)

    def backward(
        self, dy: np.ndarray, cache: dict, grads: Grads, need_dx: bool = True
    ) -> np.ndarray | None:
        dy2 = dy.reshape(-1, self.d_out)
        lora = self.lora
        if self.w.trainable:
            x2 = cache["x"].reshape(-1, self.d_in)
            dw = x2.T @ dy2
            grads.add(self.w.name, dw)
            if lora is not None:
                if lora.a.trainable:
                    grads.add(lora.a.name, lora.scale * (dw @ lora.b.value).T)
                if lora.b.trainable:
                    grads.add(lora.b.name, lora.scale * (dw.T @ lora.a.value.T))
        elif lora is not None and (lora.a.trainable or lora.b.trainable):
            # Rank-r factorization keeps this O(n*r*(d_in+d_out)) instead of
            # paying for the full (d_in x d_out) weight gradient.
            x2 = cache["x"].reshape(-1, self.d_in)
            if lora.a.trainable:
                v = dy2 @ lora.b.value
                grads.add(lora.a.name, lora.scale * (v.T @ x2))
            if lora.b.trainable:
                u = x2 @ lora.a.value.T
                grads.add(lora.b.name, lora.scale * (dy2.T @ u))
        if self.b.trainable:
            grads.add(self.b.name, dy2.sum(axis=0))
        if not need_dx:
            return None
        dx = dy2 @ cache["w_eff"].T
        return dx.reshape(*dy.shape[:-1], self.d_in)


class LayerNorm:
    """Normalizes the last axis to zero mean / unit variance, then scales.

    eps is tiny on purpose: the normalized output should carry variance 1
    to high precision even for small-magnitude activations.
    """

    EPS = 1.0e-12

    def __init__(self, name: str, dim: int):
        self.name = name
        self.g = Param(f"{name}.g", np.ones(dim))
        self.b = Param(f"{name}.b", np.zeros(dim))

    def params(self) -> Iterable[Param]:
        yield self.g
        yield self.b

    def has_trainable(self) -> bool:
        return self.g.trainable or self.b.trainable

    def forward(self, x: np.ndarray, cache: dict) -> np.ndarray:
        mu = x.mean(axis=-1, keepdims=True)
        xhat = x - mu
        var = np.mean(xhat * xhat, axis=-1, keepdims=True)
        inv = 1.0 / np.sqrt(var + self.EPS)
        xhat *= inv
        cache["xhat"] = xhat
        cache["inv"] = inv
        y = xhat * self.g.value
        y += self.b.value
        return y

    def backward(
        self, dy: np.ndarray, cache: dict, grads: Grads, need_dx: bool = True
    ) -> np.ndarray | None:
        xhat = cache["xhat"]
        if self.g.trainable:
            grads.add(self.g.name, np.sum(dy * xhat, axis=tuple(range(dy.ndim - 1))))
        if self.b.trainable:
            grads.add(self.b.name, np.sum(dy, axis=tuple(range(dy.ndim - 1))))
        if not need_dx:
            return None
        dxhat = dy * self.g.value
        mean_d = dxhat.mean(axis=-1, keepdims=True)
        mean_dx = np.mean(dxhat * xhat, axis=-1, keepdims=True)
        dxhat -= mean_d
        dxhat -= xhat * mean_dx
        dxhat *= cache["inv"]
        return dxhat


def relu(x: np.ndarray) -> np.ndarray:
    """Feed-forward nonlinearity, as in the original encoder recipe."""
    return np.maximum(x, 0.0)


class FeedForward:
    def __init__(self, name: str, d_model: int, d_ff: int, rng: np.random.Generator):
        self.lin1 = Linear(f"{name}.lin1", d_model, d_ff, rng)
        self.lin2 = Linear(f"{name}.lin2", d_ff, d_model, rng)

    def params(self) -> Iterable[Param]:
        yield from self.lin1.params()
        yield from self.lin2.params()

    def has_trainable(self) -> bool:
        return self.lin1.has_trainable() or self.lin2.has_trainable()

    def forward(self, x: np.ndarray, cache: dict) -> np.ndarray:
        cache["c1"] = {}
        cache["c2"] = {}
        h = self.lin1.forward(x, cache["c1"])
        g = np.maximum(h, 0.0)
        cache["active"] = h > 0.0
        return self.lin2.forward(g, cache["c2"])

    def backward(
        self, dy: np.ndarray, cache: dict, grads: Grads, need_dx: bool = True
    ) -> np.ndarray | None:
        inner = need_dx or self.lin1.has_trainable()
        dg = self.lin2.backward(dy, cache["c2"], grads, need_dx=inner)
        if dg is None:
            return None
        dg *= cache["active"]
        return self.lin1.backward(dg, cache["c1"], grads, need_dx=need_dx)


class MultiHeadAttention:
    def __init__(self, name: str, config: ModelConfig, rng: np.random.Generator):
        d = config.d_model
        self.n_heads = config.n_heads
        self.head_dim = config.head_dim
        self.wq = Linear(f"{name}.wq", d, d, rng)
        self.wk = Linear(f"{name}.wk", d, d, rng)
        self.wv = Linear(f"{name}.wv", d, d, rng)
        self.wo = Linear(f"{name}.wo", d, d, rng)

    def params(self) -> Iterable[Param]:
        for lin in (self.wq, self.wk, self.wv, self.wo):
            yield from lin.params()

    def has_trainable(self) -> bool:
        return any(lin.has_trainable() for lin in (self.wq, self.wk, self.wv, self.wo))

    def _split(self, x: np.ndarray) -> np.ndarray:
        b, t, d = x.shape
        # Contiguous copy so the batched matmuls below hit fast BLAS paths.
        return np.ascontiguousarray(
            x.reshape(b, t, self.n_heads, self.head_dim).transpose(0, 2, 1, 3)
        )

    def _merge(self, x: np.ndarray) -> np.ndarray:
        b, h, t, hd = x.shape
        return x.transpose(0, 2, 1, 3).reshape(b, t, h * hd)

    def forward(
        self, x: np.ndarray, key_bias: np.ndarray | None, cache: dict
    ) -> np.ndarray:
        for key in ("cq", "ck", "cv", "co"):
            cache[key] = {}
        qh = self._split(self.wq.forward(x, cache["cq"]))
        kh = self._split(self.wk.forward(x, cache["ck"]))
        vh = self._split(self.wv.forward(x, cache["cv"]))
        scale = 1.0 / math.sqrt(self.head_dim)
        scores = qh @ kh.swapaxes(-1, -2)
        scores *= scale
        if key_bias is not None:
            # (B,1,1,T) bias: dead keys get a shift so deep that softmax
            # underflows them to exact zero.
            scores += key_bias
        scores -= scores.max(axis=-1, keepdims=True)
        np.exp(scores, out=scores)
        scores /= scores.sum(axis=-1, keepdims=True)
        att = scores
        ctx = att @ vh
        cache["att"] = att
        cache["qh"] = qh
        cache["kh"] = kh
        cache["vh"] = vh
        cache["scale"] = scale
        return self.wo.forward(self._merge(ctx), cache["co"])

    def backward(
        self, dy: np.ndarray, cache: dict, grads: Grads, need_dx: bool = True
    ) -> np.ndarray | None:
        att = cache["att"]
        dctx = self._split(self.wo.backward(dy, cache["co"], grads))
        datt = dctx @ cache["vh"].swapaxes(-1, -2)
        dvh = att.swapaxes(-1, -2) @ dctx
        row = np.sum(datt * att, axis=-1, keepdims=True)
        datt -= row
        datt *= att
        dscores = datt
        scale = cache["scale"]
        dqh = dscores @ cache["kh"]
        dqh *= scale
        dx = None

        def through(lin: Linear, d: np.ndarray, key: str) -> None:
            nonlocal dx
            if not (need_dx or lin.has_trainable()):
                return
            part = lin.backward(self._merge(d), cache[key], grads, need_dx=need_dx)
            if need_dx:
                dx = part if dx is None else dx + part

        through(self.wq, dqh, "cq")
        if need_dx or self.wk.has_trainable():
            dkh = dscores.swapaxes(-1, -2) @ cache["qh"]
            dkh *= scale
            through(self.wk, dkh, "ck")
        through(self.wv, dvh, "cv")
        return dx


class EncoderLayer:
    """Pre-norm block: x + attn(ln1(x)), then x + ff(ln2(x))."""

    def __init__(self, name: str, config: ModelConfig, rng: np.random.Generator):
        self.ln1 = LayerNorm(f"{name}.ln1", config.d_model)
        self.attn = MultiHeadAttention(f"{name}.attn", config, rng)
        self.ln2 = LayerNorm(f"{name}.ln2", config.d_model)
        self.ff = FeedForward(f"{name}.ff", config.d_model, config.d_ff, rng)

    def params(self) -> Iterable[Param]:
        yield from self.ln1.params()
        yield from self.attn.params()
        yield from self.ln2.params()
        yield from self.ff.params()

    def has_trainable(self) -> bool:
        return (
            self.ln1.has_trainable()
            or self.attn.has_trainable()
            or self.ln2.has_trainable()
            or self.ff.has_trainable()
        )

    def forward(
        self,
        x: np.ndarray,
        key_bias: np.ndarray | None,
        cache: dict,
        drop_masks: tuple[np.ndarray | None, np.ndarray | None],
    ) -> np.ndarray:
        cache["cl1"] = {}
        cache["ca"] = {}
        cache["cl2"] = {}
        cache["cf"] = {}
        a = self.attn.forward(self.ln1.forward(x, cache["cl1"]), key_bias, cache["ca"])
        if drop_masks[0] is not None:
            a *= drop_masks[0]
        a += x
        x = a
        f = self.ff.forward(self.ln2.forward(x, cache["cl2"]), cache["cf"])
        if drop_masks[1] is not None:
            f *= drop_masks[1]
        f += x
        cache["drop"] = drop_masks
        return f

    def backward(
        self, dy: np.ndarray, cache: dict, grads: Grads, need_input: bool = True
    ) -> np.ndarray | None:
        """Residual backward.  With need_input off, gradient flow stops at
        this layer's deepest trainable parameter instead of reaching x."""
        drop_attn, drop_ff = cache["drop"]
        attn_side = self.attn.has_trainable() or self.ln1.has_trainable()
        need_dx2 = need_input or attn_side

        dx2 = dy
        if need_dx2 or self.ff.has_trainable() or self.ln2.has_trainable():
            df = dy if drop_ff is None else dy * drop_ff
            dff = self.ff.backward(
                df, cache["cf"], grads, need_dx=need_dx2 or self.ln2.has_trainable()
            )
            if dff is not None:
                dln2 = self.ln2.backward(dff, cache["cl2"], grads, need_dx=need_dx2)
                if dln2 is not None:
                    dln2 += dy
                    dx2 = dln2
        if not (need_input or attn_side):
            return None

        da = dx2 if drop_attn is None else dx2 * drop_attn
        need_dh = need_input or self.ln1.has_trainable()
        if need_dh or self.attn.has_trainable():
            dh = self.attn.backward(da, cache["ca"], grads, need_dx=need_dh)
        else:
            dh = None
        if dh is None:
            return dx2 if need_input else None
        dln1 = self.ln1.backward(dh, cache["cl1"], grads, need_dx=need_input)
        if not need_input:
            return None
        dln1 += dx2
        return dln1


class TransformerClassifier:
    """Token ids in, class logits out.  Mean-pools real positions only."""

    def __init__(self, config: ModelConfig, rng: np.random.Generator):
        self.config = config
        self.tok_emb = Param(
            "tok_emb", rng.normal(0.0, _INIT_STD, size=(config.vocab_size, config.d_model))
        )
        self.pos_emb = Param(
            "pos_emb", rng.normal(0.0, _INIT_STD, size=(config.max_seq_len, config.d_model))
        )
        self.layers = [
            EncoderLayer(f"layers.{i}", config, rng) for i in range(config.n_layers)
        ]
        self.head = Linear("head", config.d_model, config.n_classes, rng)

    # -- parameter bookkeeping -------------------------------------------

    def params(self) -> list[Param]:
        out = [self.tok_emb, self.pos_emb]
        for layer in self.layers:
            out.extend(layer.params())
        out.extend(self.head.params())
        return out

    def param_map(self) -> dict[str, Param]:
        return {p.name: p for p in self.params()}

    def linears(self) -> dict[str, Linear]:
        """All projection layers that can host a low-rank adapter."""
        out: dict[str, Linear] = {}
        for layer in self.layers:
            attn = layer.attn
            for lin in (attn.wq, attn.wk, attn.wv, attn.wo):
                out[lin.name] = lin
            out[layer.ff.lin1.name] = layer.ff.lin1
            out[layer.ff.lin2.name] = layer.ff.lin2
        out[self.head.name] = self.head
        return out

    def has_adapters(self) -> bool:
        return any(lin.lora is not None for lin in self.linears().values())

    def set_trainable(self, trainable: bool) -> None:
        for p in self.params():
            p.trainable = trainable

    # -- forward / backward ----------------------------------------------

    def _check_ids(self, ids: np.ndarray) -> None:
        if ids.size and (ids.min() < 0 or ids.max() >= self.config.vocab_size):
            raise ValueError(
                f"token id out of range for vocab size {self.config.vocab_size}"
            )

    def forward_batch(
        self,
        ids: np.ndarray,
        mask: np.ndarray,
        train: bool = False,
        rng: np.random.Generator | None = None,
    ) -> tuple[np.ndarray, dict]:
        """Returns (logits, cache) for padded int ids (B,T) and bool mask (B,T)."""
        b, t = ids.shape
        if t > self.config.max_seq_len:
            raise ValueError(
                f"sequence length {t} exceeds max_seq_len {self.config.max_seq_len}"
            )
        if not mask.any(axis=1).all():
            raise ValueError("every sequence must contain at least one token")
        self._check_ids(ids)

        all_real = bool(mask.all())
        key_bias = None
        if not all_real:
            key_bias = np.where(mask, 0.0, _MASK_BIAS)[:, None, None, :]

        cache: dict = {"ids": ids, "mask": mask, "all_real": all_real, "layer_caches": []}
        x = self.tok_emb.value[ids]
        x += self.pos_emb.value[:t]
        rate = self.config.dropout
        for layer in self.layers:
            drop_masks: tuple[np.ndarray | None, np.ndarray | None] = (None, None)
            if train and rate > 0.0:
                if rng is None:
                    raise ValueError("dropout requires an rng in training mode")
                keep = 1.0 - rate
                drop_masks = (
                    (rng.random(x.shape) < keep) / keep,
                    (rng.random(x.shape) < keep) / keep,
                )
            lcache: dict = {}
            x = layer.forward(x, key_bias, lcache, drop_masks)
            cache["layer_caches"].append(lcache)

        lengths = mask.sum(axis=1, keepdims=True).astype(float)
        if all_real:
            pooled = x.mean(axis=1)
        else:
            pooled = (x * mask[:, :, None]).sum(axis=1) / lengths
        cache["lengths"] = lengths
        cache["chead"] = {}
        logits = self.head.forward(pooled, cache["chead"])
        return logits, cache

    def backward_batch(self, dlogits: np.ndarray, cache: dict) -> Grads:
        grads = Grads()
        mask = cache["mask"]
        emb_trainable = self.tok_emb.trainable or self.pos_emb.trainable
        # needs[i]: does anything beneath layer i still require a gradient?
        needs = []
        below = emb_trainable
        for layer in self.layers:
            needs.append(below)
            below = below or layer.has_trainable()

        dpooled = self.head.backward(
            dlogits, cache["chead"], grads, need_dx=below or emb_trainable
        )
        if dpooled is None:
            return grads
        t = mask.shape[1]
        if cache["all_real"]:
            scaled = dpooled / cache["lengths"]
            dx = np.broadcast_to(scaled[:, None, :], (mask.shape[0], t, scaled.shape[1]))
        else:
            dx = (dpooled[:, None, :] * mask[:, :, None]) / cache["lengths"][:, :, None]
        for layer, lcache, need in zip(
            reversed(self.layers), reversed(cache["layer_caches"]), reversed(needs)
        ):
            dx = layer.backward(dx, lcache, grads, need_input=need)
            if dx is None:
                return grads
        if self.pos_emb.trainable:
            g = np.zeros_like(self.pos_emb.value)
            g[: dx.shape[1]] = dx.sum(axis=0)
            grads.add(self.pos_emb.name, g)
        if self.tok_emb.trainable:
            g = np.zeros_like(self.tok_emb.value)
            np.add.at(g, cache["ids"], dx)
            grads.add(self.tok_emb.name, g)
        return grads


def init_model(config: ModelConfig, seed: int = 42) -> TransformerClassifier:
    """Fresh model: weights ~ N(0, 0.02), biases zero, layer-norm gains one."""
    rng = np.random.default_rng(seed)
    return TransformerClassifier(config, rng)


def pad_batch(
    sequences: Sequence[Sequence[int]], max_seq_len: int
) -> tuple[np.ndarray, np.ndarray]:
    """Left-aligned zero padding plus a boolean mask of real positions."""
    if not sequences:
        raise ValueError("empty batch")
    lengths = [len(s) for s in sequences]
    if min(lengths) == 0:
        raise ValueError("empty sequence in batch")
    t = max(lengths)
    if t > max_seq_len:
        raise ValueError(f"sequence length {t} exceeds max_seq_len {max_seq_len}")
    ids = np.zeros((len(sequences), t), dtype=np.int64)
    mask = np.zeros((len(sequences), t), dtype=bool)
    for i, seq in enumerate(sequences):
        ids[i, : lengths[i]] = seq
        mask[i, : lengths[i]] = True
    return ids, mask


def forward_logits(
    model: TransformerClassifier, token_ids: Sequence[int]
) -> np.ndarray:
    """Class logits for a single un-padded sequence."""
    ids, mask = pad_batch([list(token_ids)], model.config.max_seq_len)
    logits, _ = model.forward_batch(ids, mask)
    return logits[0]


def loss_and_grads_padded(
    model: TransformerClassifier,
    ids: np.ndarray,
    mask: np.ndarray,
    y: np.ndarray,
    train: bool = True,
    rng: np.random.Generator | None = None,
) -> tuple[float, Grads]:
    """Like loss_and_grads but on an already padded batch; y is int {0,1}."""
    logits, cache = model.forward_batch(ids, mask, train=train, rng=rng)
    shifted = logits - logits.max(axis=1, keepdims=True)
    logz = np.log(np.exp(shifted).sum(axis=1))
    n = y.shape[0]
    rows = np.arange(n)
    loss = float(np.mean(logz - shifted[rows, y]))

    dlogits = np.exp(shifted - logz[:, None])
    dlogits[rows, y] -= 1.0
    dlogits /= n
    grads = model.backward_batch(dlogits, cache)
    return loss, grads


def loss_and_grads(
    model: TransformerClassifier,
    sequences: Sequence[Sequence[int]],
    labels: Sequence[bool],
    train: bool = True,
    rng: np.random.Generator | None = None,
) -> tuple[float, Grads]:
    """Mean cross-entropy over the batch plus gradients for every
    trainable parameter.  Frozen parameters get no entry at all."""
    if len(sequences) != len(labels):
        raise ValueError("sequences and labels must have equal length")
    ids, mask = pad_batch(sequences, model.config.max_seq_len)
    y = np.asarray([int(bool(v)) for v in labels], dtype=np.int64)
    return loss_and_grads_padded(model, ids, mask, y, train=train, rng=rng)


def total_parameters(model: TransformerClassifier) -> int:
    return sum(p.size for p in model.params())


def trainable_parameters(model: TransformerClassifier) -> int:
    return sum(p.size for p in model.params() if p.trainable)
