"""Shared domain types, labeled random streams and argmax selection.

Feature vectors are 1-D integer arrays of categorical codes, one per field.
Candidate sets are ``(m, J)`` integer arrays. Training data travels as a
columnar :class:`Batch` so that resampling and fake-sample augmentation stay
vectorized.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "FieldLayout",
    "Interaction",
    "Batch",
    "RngStream",
    "derive_stream",
    "argmax_tiebreak",
]


@dataclass(frozen=True)
class FieldLayout:
    """Cardinalities of the categorical fields and the index of the action field."""

    cardinalities: tuple[int, ...]
    action_field: int = 0

    def __post_init__(self) -> None:
        cards = tuple(int(c) for c in self.cardinalities)
        if not cards or min(cards) < 1:
            raise ValueError(f"cardinalities must be positive, got {cards}")
        if not 0 <= self.action_field < len(cards):
            raise ValueError(f"action_field {self.action_field} outside {len(cards)} fields")
        object.__setattr__(self, "cardinalities", cards)

    @property
    def n_fields(self) -> int:
        return len(self.cardinalities)

    @property
    def n_actions(self) -> int:
        return self.cardinalities[self.action_field]

    @property
    def offsets(self) -> np.ndarray:
        """Start of each field inside the concatenated one-hot encoding."""
        return np.concatenate([[0], np.cumsum(self.cardinalities)[:-1]]).astype(np.int64)

    @property
    def one_hot_dim(self) -> int:
        return int(sum(self.cardinalities))

    def check(self, codes) -> np.ndarray:
        """Validate a feature vector (1-D) or candidate set (2-D) and return it as int64."""
        arr = np.asarray(codes, dtype=np.int64)
        if arr.ndim not in (1, 2) or arr.shape[-1] != self.n_fields:
            raise ValueError(f"expected {self.n_fields} fields, got shape {arr.shape}")
        card = np.asarray(self.cardinalities)
        if np.any(arr < 0) or np.any(arr >= card):
            raise ValueError(f"code out of range for cardinalities {self.cardinalities}: {arr.tolist()}")
        return arr


@dataclass(frozen=True)
class Interaction:
    """One logged pull: the chosen features and the binary reward."""

    features: tuple[int, ...]
    reward: int
    step: int = 0

    def __post_init__(self) -> None:
        if self.reward not in (0, 1):
            raise ValueError(f"reward must be 0 or 1, got {self.reward!r}")
        if self.step < 0:
            raise ValueError("step must be nonnegative")
        object.__setattr__(self, "features", tuple(int(c) for c in self.features))


@dataclass
class Batch:
    """Columnar set of (features, reward) samples.

    ``features`` has shape ``(n, J)``; ``rewards`` has shape ``(n,)`` with
    values in {0, 1} stored as float64 for the loss computations.
    """

    features: np.ndarray
    rewards: np.ndarray

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=np.int64)
        self.rewards = np.asarray(self.rewards, dtype=np.float64)
        if self.features.ndim != 2 or self.rewards.shape != (self.features.shape[0],):
            raise ValueError(
                f"inconsistent batch shapes {self.features.shape} / {self.rewards.shape}"
            )

    def __len__(self) -> int:
        return self.rewards.shape[0]

    @classmethod
    def from_interactions(cls, items: Sequence[Interaction]) -> "Batch":
        if not items:
            raise ValueError("cannot build a batch from no interactions")
        return cls(np.array([it.features for it in items]), np.array([it.reward for it in items]))

    def to_interactions(self) -> list[Interaction]:
        return [Interaction(tuple(x), int(r)) for x, r in zip(self.features, self.rewards)]

    def take(self, idx) -> "Batch":
        return Batch(self.features[idx], self.rewards[idx])

    @classmethod
    def concat(cls, parts: Iterable["Batch"]) -> "Batch":
        parts = list(parts)
        return cls(
            np.concatenate([p.features for p in parts]),
            np.concatenate([p.rewards for p in parts]),
        )

    def equals(self, other: "Batch") -> bool:
        return np.array_equal(self.features, other.features) and np.array_equal(
            self.rewards, other.rewards
        )


def _label_key(label: str) -> int:
    return int.from_bytes(hashlib.blake2b(label.encode("utf-8"), digest_size=8).digest(), "little")


class RngStream:
    """A reproducible random stream identified by a root seed and a label path.

    Children depend only on the lineage, never on how much of the parent has
    been consumed, so ``derive_stream(s, "model-0")`` is the same stream no
    matter when it is requested. Each instance owns one numpy ``Generator``
    and must not be shared between concurrent consumers.
    """

    __slots__ = ("root", "labels", "_gen")

    def __init__(self, root: int, labels: tuple[str, ...] = ()) -> None:
        self.root = int(root)
        self.labels = tuple(labels)
        self._gen: np.random.Generator | None = None

    @property
    def gen(self) -> np.random.Generator:
        if self._gen is None:
            seq = np.random.SeedSequence(self.root, spawn_key=tuple(_label_key(s) for s in self.labels))
            self._gen = np.random.Generator(np.random.PCG64(seq))
        return self._gen

    def derive(self, label: str) -> "RngStream":
        return derive_stream(self, label)

    def __repr__(self) -> str:
        return f"RngStream(root={self.root}, labels={'/'.join(self.labels) or '-'})"


def derive_stream(parent: RngStream, label: str) -> RngStream:
    """Child stream keyed by ``(parent lineage, label)``."""
    if not label:
        raise ValueError("stream label must be nonempty")
    return RngStream(parent.root, parent.labels + (label,))


def argmax_tiebreak(scores) -> int:
    """Index of the maximum score; ties go to the lowest index."""
    arr = np.asarray(scores, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("scores must be a nonempty 1-D sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"non-finite score in {arr.tolist()}")
    # np.argmax returns the first occurrence of the maximum
    return int(np.argmax(arr))
