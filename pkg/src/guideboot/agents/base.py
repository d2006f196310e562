from __future__ import annotations

import numpy as np

from ..core import Batch, FieldLayout, RngStream, argmax_tiebreak
from ..guidance import bootstrap_resample, shuffle_split
from ..models import AdamState, adam_step, init_model

__all__ = ["Buffer", "Agent", "SingleModelAgent", "train_on", "greedy_online_flush"]


class Buffer:
    """Append-only interaction store backed by doubling arrays."""

    def __init__(self, n_fields: int, capacity: int = 256) -> None:
        self._x = np.empty((capacity, n_fields), dtype=np.int64)
        self._r = np.empty(capacity, dtype=np.float64)
        self._n = 0

    def __len__(self) -> int:
        return self._n

    def append(self, x, reward) -> None:
        if self._n == self._r.shape[0]:
            self._x = np.concatenate([self._x, np.empty_like(self._x)])
            self._r = np.concatenate([self._r, np.empty_like(self._r)])
        self._x[self._n] = x
        self._r[self._n] = reward
        self._n += 1

    def extend(self, batch: Batch) -> None:
        for x, r in zip(batch.features, batch.rewards):
            self.append(x, r)

    def batch(self) -> Batch:
        """View of the stored samples (no copy)."""
        return Batch(self._x[: self._n], self._r[: self._n])

    def clear(self) -> None:
        self._n = 0


def train_on(model, opt: AdamState, batch: Batch, **grad_kwargs) -> None:
    """One Adam step on the mean log-loss of ``batch``."""
    if len(batch) == 0:
        return
    _, grad = model.loss_and_grad(batch, need_loss=False, **grad_kwargs)
    adam_step(model, grad, opt)


def greedy_online_flush(model, opt: AdamState, buffer: Batch, n: int, rng: RngStream,
                        **grad_kwargs) -> None:
    """Shuffle ``buffer`` into ``n`` minibatches and take one Adam step on each."""
    if len(buffer) == 0:
        raise ValueError("flush on an empty buffer")
    for mb in shuffle_split(buffer, min(n, len(buffer)), rng):
        train_on(model, opt, mb, **grad_kwargs)


class Agent:
    """Decision policy driven by the harness.

    ``select`` sees the candidate set for step ``t`` (1-based) and returns a
    row index; ``observe`` receives the chosen features and the reward.
    """

    name = "agent"

    def __init__(self, layout: FieldLayout, horizon: int, rng: RngStream) -> None:
        self.layout = layout
        self.horizon = horizon
        self.rng = rng

    def select(self, candidates: np.ndarray, t: int) -> int:
        raise NotImplementedError

    def observe(self, x: np.ndarray, reward: int, t: int) -> None:
        raise NotImplementedError


class SingleModelAgent(Agent):
    """One reward model trained greedily, from replay or from an online buffer.

    Replay mode takes one Adam step per environment step on a size-``b``
    resample of the full history. Online mode collects ``c`` samples, then
    trains on ``n`` shuffled minibatches and clears the buffer. Subclasses
    override :meth:`scores` (and possibly :meth:`select`) to explore.
    """

    def __init__(self, layout, horizon, rng, *, model="glm", mode="replay", b=512, c=512, n=4,
                 learning_rate=1e-3) -> None:
        super().__init__(layout, horizon, rng)
        if mode not in ("replay", "online"):
            raise ValueError(f"mode must be 'replay' or 'online', got {mode!r}")
        self.mode = mode
        self.b, self.c, self.n = b, c, n
        stream = rng.derive("model-0")
        self.model = init_model(model, layout, stream.derive("init"))
        self.opt = AdamState(lr=learning_rate)
        self._resample_rng = stream.derive("resample")
        self._shuffle_rng = stream.derive("shuffle")
        self._select_rng = rng.derive("select")
        self.buffer = Buffer(layout.n_fields)

    def grad_kwargs(self) -> dict:
        return {}

    def scores(self, candidates: np.ndarray, t: int) -> np.ndarray:
        return self.model.predict_batch(candidates)

    def select(self, candidates, t):
        return argmax_tiebreak(self.scores(candidates, t))

    def record(self, x, reward, t) -> None:
        """Hook for count-keeping subclasses."""

    def observe(self, x, reward, t):
        self.record(x, reward, t)
        self.buffer.append(x, reward)
        if self.mode == "replay":
            batch = bootstrap_resample(self.buffer.batch(), self.b, self._resample_rng)
            train_on(self.model, self.opt, batch, **self.grad_kwargs())
        elif len(self.buffer) >= self.c:
            self.flush()

    def flush(self) -> None:
        greedy_online_flush(self.model, self.opt, self.buffer.batch(), self.n,
                            self._shuffle_rng, **self.grad_kwargs())
        self.buffer.clear()
