"""Reward models with hand-written gradients and an Adam optimizer.

Both models expose their trainable tensors as a ``params`` dict so that
:func:`adam_step` and the finite-difference tests can treat them uniformly.
Losses are mean log-loss over a batch, computed on the logit scale
(``softplus(z) - r * z``), which is exact and needs no probability clipping.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .core import Batch, FieldLayout, RngStream

__all__ = [
    "LogisticGlm",
    "Mlp",
    "AdamState",
    "init_model",
    "predict",
    "grad_logloss",
    "logloss",
    "adam_step",
    "mc_dropout_predict",
    "save_checkpoint",
    "load_checkpoint",
]

EMBED_DIM = 8
HIDDEN = 128


def _softplus(z):
    return np.logaddexp(0.0, z)


class LogisticGlm:
    """One weight per categorical value per field, plus a bias."""

    kind = "glm"

    def __init__(self, layout: FieldLayout) -> None:
        self.layout = layout
        self._offsets = layout.offsets
        self.params = {
            "weights": np.zeros(layout.one_hot_dim),
            "bias": np.zeros(1),
        }

    def _index(self, x: np.ndarray) -> np.ndarray:
        return x + self._offsets

    def logits(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        return self.params["bias"][0] + self.params["weights"][self._index(x)].sum(axis=1)

    def predict_batch(self, x: np.ndarray) -> np.ndarray:
        return expit(self.logits(x))

    def loss_and_grad(self, batch: Batch, need_loss: bool = True, **_) -> tuple[float, dict[str, np.ndarray]]:
        z = self.logits(batch.features)
        r = batch.rewards
        n = len(batch)
        loss = float(np.mean(_softplus(z) - r * z)) if need_loss else math.nan
        d = (expit(z) - r) / n
        idx = self._index(batch.features)
        gw = np.bincount(
            idx.ravel(), weights=np.repeat(d, idx.shape[1]), minlength=self.layout.one_hot_dim
        )
        return loss, {"weights": gw, "bias": np.array([d.sum()])}


class Mlp:
    """Field embeddings -> two ReLU layers of 128 units -> sigmoid output.

    Dropout, when requested, acts on the second hidden layer only, with
    inverted scaling so that the expected pre-sigmoid output is unchanged.
    """

    kind = "mlp"

    def __init__(self, layout: FieldLayout, rng: RngStream | None = None,
                 embed_dim: int = EMBED_DIM, hidden: int = HIDDEN) -> None:
        self.layout = layout
        self.embed_dim = embed_dim
        self.hidden = hidden
        d_in = embed_dim * layout.n_fields
        g = rng.gen if rng is not None else None

        def glorot(fan_in, fan_out, shape):
            if g is None:
                return np.zeros(shape)
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            return g.uniform(-limit, limit, size=shape)

        self.params: dict[str, np.ndarray] = {}
        for j, card in enumerate(layout.cardinalities):
            self.params[f"emb{j}"] = glorot(card, embed_dim, (card, embed_dim))
        self.params["w1"] = glorot(d_in, hidden, (d_in, hidden))
        self.params["b1"] = np.zeros(hidden)
        self.params["w2"] = glorot(hidden, hidden, (hidden, hidden))
        self.params["b2"] = np.zeros(hidden)
        self.params["w3"] = glorot(hidden, 1, (hidden,))
        self.params["b3"] = np.zeros(1)

    def _forward(self, x: np.ndarray, mask: np.ndarray | None = None):
        x = np.atleast_2d(x)
        p = self.params
        e = np.concatenate([p[f"emb{j}"][x[:, j]] for j in range(x.shape[1])], axis=1)
        a1 = e @ p["w1"] + p["b1"]
        h1 = np.maximum(a1, 0.0)
        a2 = h1 @ p["w2"] + p["b2"]
        h2 = np.maximum(a2, 0.0)
        if mask is not None:
            h2 = h2 * mask
        z = h2 @ p["w3"] + p["b3"][0]
        return z, (x, e, a1, h1, a2, h2)

    def logits(self, x: np.ndarray, mask: np.ndarray | None = None) -> np.ndarray:
        return self._forward(x, mask)[0]

    def predict_batch(self, x: np.ndarray, mask: np.ndarray | None = None) -> np.ndarray:
        return expit(self.logits(x, mask))

    def dropout_mask(self, rate: float, rng: RngStream, size: int | None = None) -> np.ndarray:
        """Inverted-dropout mask for the last hidden layer; one row per sample if ``size``."""
        if not 0.0 <= rate < 1.0:
            raise ValueError(f"dropout rate must be in [0, 1), got {rate}")
        shape = (self.hidden,) if size is None else (size, self.hidden)
        if rate == 0.0:
            return np.ones(shape)
        return (rng.gen.random(shape) >= rate) / (1.0 - rate)

    def loss_and_grad(self, batch: Batch, dropout_rate: float = 0.0, rng: RngStream | None = None,
                      need_loss: bool = True) -> tuple[float, dict[str, np.ndarray]]:
        mask = None
        if dropout_rate > 0.0:
            if rng is None:
                raise ValueError("dropout training needs a random stream")
            mask = self.dropout_mask(dropout_rate, rng, size=len(batch))
        z, (x, e, a1, h1, a2, h2) = self._forward(batch.features, mask)
        r = batch.rewards
        n = len(batch)
        loss = float(np.mean(_softplus(z) - r * z)) if need_loss else math.nan
        p = self.params
        dz = (expit(z) - r) / n
        grads = {"w3": h2.T @ dz, "b3": np.array([dz.sum()])}
        dh2 = np.outer(dz, p["w3"])
        if mask is not None:
            dh2 *= mask
        da2 = dh2 * (a2 > 0)
        grads["w2"] = h1.T @ da2
        grads["b2"] = da2.sum(axis=0)
        dh1 = da2 @ p["w2"].T
        da1 = dh1 * (a1 > 0)
        grads["w1"] = e.T @ da1
        grads["b1"] = da1.sum(axis=0)
        de = da1 @ p["w1"].T
        k = self.embed_dim
        for j, card in enumerate(self.layout.cardinalities):
            g = np.zeros((card, k))
            np.add.at(g, x[:, j], de[:, j * k:(j + 1) * k])
            grads[f"emb{j}"] = g
        return loss, grads


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def init_model(kind: str, layout: FieldLayout, rng: RngStream | None = None):
    """Fresh reward model. GLMs start at zero; MLPs draw Glorot-uniform weights from ``rng``."""
    if kind == "glm":
        return LogisticGlm(layout)
    if kind == "mlp":
        if rng is None:
            raise ValueError("an MLP needs a random stream for initialization")
        return Mlp(layout, rng)
    raise ValueError(f"unknown model kind {kind!r}")


def predict(model, x) -> float:
    x = model.layout.check(x)
    if x.ndim != 1:
        raise ValueError("predict takes one feature vector; use predict_batch for sets")
    return float(model.predict_batch(x)[0])


def logloss(model, batch: Batch) -> float:
    z = model.logits(batch.features)
    return float(np.mean(_softplus(z) - batch.rewards * z))


def grad_logloss(model, batch: Batch, **kwargs) -> dict[str, np.ndarray]:
    """Mean log-loss gradient over ``batch`` for every parameter of ``model``."""
    if len(batch) == 0:
        raise ValueError("empty batch")
    return model.loss_and_grad(batch, **kwargs)[1]


def adam_step(model, grad: dict[str, np.ndarray], state: AdamState) -> None:
    """Bias-corrected Adam update, in place."""
    params = model.params
    if grad.keys() != params.keys():
        raise ValueError(f"gradient keys {sorted(grad)} do not match parameters {sorted(params)}")
    for k, g in grad.items():
        if g.shape != params[k].shape:
            raise ValueError(f"gradient for {k} has shape {g.shape}, expected {params[k].shape}")
    state.step += 1
    bc1 = 1.0 - state.beta1 ** state.step
    bc2 = 1.0 - state.beta2 ** state.step
    for k, g in grad.items():
        if k not in state.m:
            state.m[k] = np.zeros_like(params[k])
            state.v[k] = np.zeros_like(params[k])
        m, v = state.m[k], state.v[k]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        params[k] -= state.lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)


def mc_dropout_predict(model: Mlp, x, rate: float, rng: RngStream) -> float:
    x = model.layout.check(x)
    mask = model.dropout_mask(rate, rng)
    return float(model.predict_batch(x, mask)[0])


_CHECKPOINT_MAGIC = "guideboot-checkpoint v1"


def save_checkpoint(model, path) -> None:
    """Write parameters as an ``.npz`` archive with a versioned header entry."""
    meta = np.array([_CHECKPOINT_MAGIC, model.kind, ",".join(map(str, model.layout.cardinalities)),
                     str(model.layout.action_field)])
    buf = io.BytesIO()
    np.savez(buf, __meta__=meta, **model.params)
    with open(path, "wb") as fh:
        fh.write(buf.getvalue())


def load_checkpoint(path):
    with np.load(path) as data:
        meta = data["__meta__"]
        if meta[0] != _CHECKPOINT_MAGIC:
            raise ValueError(f"{path}: not a checkpoint ({meta[0]!r})")
        layout = FieldLayout(tuple(int(c) for c in meta[2].split(",")), int(meta[3]))
        model = LogisticGlm(layout) if meta[1] == "glm" else Mlp(layout)
        for k in model.params:
            model.params[k] = data[k].copy()
    return model
