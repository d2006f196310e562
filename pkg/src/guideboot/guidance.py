"""Count-based familiarity, the fake-sample probability, and batch construction.

The probability of injecting each fake sample for an input ``x`` is
``min(alpha / density(x), 1)``. Density is either the impression count of
the action value, or the unscaled harmonic average of the per-field value
counts. Unseen inputs have density 0 and therefore get probability 1.
``alpha = 0`` switches augmentation off entirely.
"""
from __future__ import annotations

import numpy as np

from .core import Batch, FieldLayout, RngStream

__all__ = [
    "GuidanceState",
    "update_counts",
    "density",
    "guidance_value",
    "augment_with_fakes",
    "bootstrap_resample",
    "shuffle_split",
]

DENSITY_KINDS = ("action_count", "harmonic")


class GuidanceState:
    """Per-field value counts plus the guidance strength ``alpha``."""

    def __init__(self, layout: FieldLayout, alpha: float = 1.0, kind: str = "harmonic") -> None:
        if kind not in DENSITY_KINDS:
            raise ValueError(f"density kind must be one of {DENSITY_KINDS}, got {kind!r}")
        if alpha < 0:
            raise ValueError("alpha must be nonnegative")
        self.layout = layout
        self.alpha = float(alpha)
        self.kind = kind
        self.counts = [np.zeros(c, dtype=np.int64) for c in layout.cardinalities]
        self._inverse: list[np.ndarray] | None = None

    @property
    def total(self) -> int:
        return int(self.counts[0].sum())

    def action_counts(self) -> np.ndarray:
        return self.counts[self.layout.action_field]

    def update(self, x) -> None:
        x = np.atleast_2d(np.asarray(x, dtype=np.int64))
        for j, table in enumerate(self.counts):
            table += np.bincount(x[:, j], minlength=table.shape[0])
        self._inverse = None

    def _inverse_tables(self) -> list[np.ndarray]:
        if self._inverse is None:
            with np.errstate(divide="ignore"):
                self._inverse = [1.0 / t for t in self.counts]
        return self._inverse

    def density(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.int64))
        if self.kind == "action_count":
            a = self.layout.action_field
            return self.counts[a][x[:, a]].astype(np.float64)
        inv = self._inverse_tables()
        total = inv[0][x[:, 0]]
        for j in range(1, len(inv)):
            total = total + inv[j][x[:, j]]
        # an unseen value contributes 1/0 = inf, so the density becomes 0
        return 1.0 / total

    def guidance(self, x) -> np.ndarray:
        rho = self.density(x)
        if self.alpha == 0.0:
            return np.zeros_like(rho)
        g = np.ones_like(rho)
        big = rho > self.alpha
        g[big] = self.alpha / rho[big]
        return g


def update_counts(state: GuidanceState, x) -> None:
    state.update(x)


def density(state: GuidanceState, x) -> float:
    return float(state.density(x)[0])


def guidance_value(state: GuidanceState, x) -> float:
    return float(state.guidance(x)[0])


def augment_with_fakes(batch: Batch, state: GuidanceState, rng: RngStream,
                       g: np.ndarray | None = None) -> Batch:
    """Append a fake positive and, independently, a fake negative per sample.

    Each coin succeeds with the sample's guidance probability. The output is
    the real batch followed by the fake positives and then the fake negatives.
    ``g`` may be passed to reuse precomputed guidance values.
    """
    n = len(batch)
    if n == 0:
        return batch
    if g is None:
        g = state.guidance(batch.features)
    coins = rng.gen.random((2, n)) < g
    pos = batch.features[coins[0]]
    neg = batch.features[coins[1]]
    return Batch(
        np.concatenate([batch.features, pos, neg]),
        np.concatenate([batch.rewards, np.ones(len(pos)), np.zeros(len(neg))]),
    )


def bootstrap_resample(buffer: Batch, b: int, rng: RngStream) -> Batch:
    """``b`` uniform draws with replacement."""
    if len(buffer) == 0:
        raise ValueError("cannot resample from an empty buffer")
    if b < 1:
        raise ValueError("bootstrap size must be at least 1")
    return buffer.take(rng.gen.integers(0, len(buffer), size=b))


def shuffle_split(buffer: Batch, n: int, rng: RngStream) -> list[Batch]:
    """Random permutation cut into ``n`` near-equal batches; the first ``len % n`` get one extra."""
    if n < 1:
        raise ValueError("need at least one batch")
    if len(buffer) < n:
        raise ValueError(f"cannot split {len(buffer)} samples into {n} batches")
    perm = rng.gen.permutation(len(buffer))
    return [buffer.take(idx) for idx in np.array_split(perm, n)]
