"""Ensemble agents: K reward models, one drawn uniformly per decision.

``GuideBootAgent`` and ``OnlineGuideBootAgent`` perturb every training
batch with guided fake samples. ``BootstrapAgent``, ``GiroAgent`` and
``ObbAgent`` are the unguided baselines.

Every model ``k`` owns the streams ``model-k/init``, ``model-k/resample``,
``model-k/shuffle``, ``model-k/fakes`` and ``model-k/poisson``. Keeping
resampling and fake coins on separate streams means that switching the
guidance off leaves the resampled batches untouched.
"""
from __future__ import annotations

import numpy as np

from ..core import Batch, FieldLayout, RngStream, argmax_tiebreak
from ..guidance import GuidanceState, augment_with_fakes, bootstrap_resample, shuffle_split
from ..models import AdamState, init_model
from .base import Agent, Buffer, train_on

__all__ = [
    "EnsembleAgent",
    "GuideBootAgent",
    "BootstrapAgent",
    "GiroAgent",
    "OnlineGuideBootAgent",
    "ObbAgent",
    "guideboot_select",
    "guideboot_train_step",
    "online_guideboot_flush",
]


class EnsembleAgent(Agent):
    def __init__(self, layout: FieldLayout, horizon: int, rng: RngStream, *, K: int = 5,
                 model: str = "glm", learning_rate: float = 1e-3) -> None:
        super().__init__(layout, horizon, rng)
        if K < 1:
            raise ValueError("K must be at least 1")
        self.K = K
        self.streams = [rng.derive(f"model-{k}") for k in range(K)]
        self.models = [init_model(model, layout, s.derive("init")) for s in self.streams]
        self.opts = [AdamState(lr=learning_rate) for _ in range(K)]
        self._rngs = {
            kind: [s.derive(kind) for s in self.streams]
            for kind in ("resample", "shuffle", "fakes", "poisson")
        }
        self._select_rng = rng.derive("select")
        self.last_model = -1

    def select(self, candidates, t):
        k = int(self._select_rng.gen.integers(self.K))
        self.last_model = k
        return argmax_tiebreak(self.models[k].predict_batch(candidates))


class GuideBootAgent(EnsembleAgent):
    """Experience-replay GuideBoot.

    After every step each model takes one Adam step on its own size-``b``
    resample of the full history, augmented with guided fake samples.
    """

    name = "guideboot"

    def __init__(self, layout, horizon, rng, *, K=5, alpha=1.0, b=512, density="harmonic",
                 model="glm", learning_rate=1e-3) -> None:
        super().__init__(layout, horizon, rng, K=K, model=model, learning_rate=learning_rate)
        self.b = b
        self.guidance = GuidanceState(layout, alpha, density)
        self.buffer = Buffer(layout.n_fields)

    def augment(self, batch: Batch, k: int) -> Batch:
        return augment_with_fakes(batch, self.guidance, self._rngs["fakes"][k])

    def insert(self, x, reward, t) -> None:
        self.buffer.append(x, reward)
        self.guidance.update(x)

    def training_batches(self) -> list[Batch]:
        """One augmented resample per model, in model order."""
        history = self.buffer.batch()
        return [
            self.augment(bootstrap_resample(history, self.b, self._rngs["resample"][k]), k)
            for k in range(self.K)
        ]

    def train_step(self) -> None:
        for model, opt, batch in zip(self.models, self.opts, self.training_batches()):
            train_on(model, opt, batch)

    def observe(self, x, reward, t):
        self.insert(x, reward, t)
        self.train_step()


class BootstrapAgent(GuideBootAgent):
    """Vanilla bootstrap: the replay ensemble without fake samples."""

    name = "bootstrap"

    def __init__(self, layout, horizon, rng, *, K=5, b=512, model="glm", learning_rate=1e-3):
        super().__init__(layout, horizon, rng, K=K, alpha=0.0, b=b, model=model,
                         learning_rate=learning_rate)

    def augment(self, batch, k):
        return batch


class GiroAgent(GuideBootAgent):
    """Replay ensemble over a perturbed history.

    Each inserted sample brings along the pseudo pair ``(x, 1), (x, 0)`` with
    probability ``alpha``, decided by a single coin.
    """

    name = "giro"

    def __init__(self, layout, horizon, rng, *, K=5, alpha=0.5, b=512, model="glm",
                 learning_rate=1e-3):
        super().__init__(layout, horizon, rng, K=K, alpha=0.0, b=b, model=model,
                         learning_rate=learning_rate)
        self.pair_prob = alpha
        self._pair_rng = rng.derive("pseudo-pairs")

    def insert(self, x, reward, t):
        self.buffer.append(x, reward)
        if self._pair_rng.gen.random() < self.pair_prob:
            self.buffer.append(x, 1)
            self.buffer.append(x, 0)

    def augment(self, batch, k):
        return batch


class OnlineGuideBootAgent(EnsembleAgent):
    """GuideBoot on streaming data.

    Samples accumulate in an online buffer of capacity ``c``. When it fills,
    the counts absorb the whole buffer, then each model gets its own shuffle
    into ``n`` minibatches, each augmented with fakes, and takes one Adam step
    per minibatch. The buffer is then cleared.
    """

    name = "online_guideboot"

    def __init__(self, layout, horizon, rng, *, K=5, alpha=1.0, c=512, n=4,
                 density="harmonic", model="glm", learning_rate=1e-3):
        super().__init__(layout, horizon, rng, K=K, model=model, learning_rate=learning_rate)
        if c < n:
            raise ValueError(f"buffer capacity c={c} smaller than minibatch count n={n}")
        self.c, self.n = c, n
        self.guidance = GuidanceState(layout, alpha, density)
        self.buffer = Buffer(layout.n_fields, capacity=c)

    def observe(self, x, reward, t):
        self.buffer.append(x, reward)
        if len(self.buffer) >= self.c:
            self.flush()

    def flush(self) -> None:
        data = self.buffer.batch()
        if len(data) == 0:
            raise ValueError("flush on an empty online buffer")
        self.guidance.update(data.features)
        g = self.guidance.guidance(data.features)
        for k in range(self.K):
            for idx in np.array_split(self._rngs["shuffle"][k].gen.permutation(len(data)), self.n):
                mb = data.take(idx)
                mb = augment_with_fakes(mb, self.guidance, self._rngs["fakes"][k], g=g[idx])
                train_on(self.models[k], self.opts[k], mb)
        self.buffer.clear()


class ObbAgent(EnsembleAgent):
    """Online bootstrap: each buffered sample enters model ``k``'s data ``Poisson(1)`` times."""

    name = "obb"

    def __init__(self, layout, horizon, rng, *, K=5, c=512, n=4, model="glm", learning_rate=1e-3):
        super().__init__(layout, horizon, rng, K=K, model=model, learning_rate=learning_rate)
        self.c, self.n = c, n
        self.buffer = Buffer(layout.n_fields, capacity=c)

    def observe(self, x, reward, t):
        self.buffer.append(x, reward)
        if len(self.buffer) >= self.c:
            self.flush()

    def flush(self) -> None:
        data = self.buffer.batch()
        for k in range(self.K):
            w = self._rngs["poisson"][k].gen.poisson(1.0, size=len(data))
            weighted = data.take(np.repeat(np.arange(len(data)), w))
            if len(weighted) == 0:
                continue
            for mb in shuffle_split(weighted, min(self.n, len(weighted)), self._rngs["shuffle"][k]):
                train_on(self.models[k], self.opts[k], mb)
        self.buffer.clear()


def guideboot_select(agent: EnsembleAgent, candidates: np.ndarray, t: int = 0) -> int:
    return agent.select(candidates, t)


def guideboot_train_step(agent: GuideBootAgent) -> None:
    if len(agent.buffer) == 0:
        raise ValueError("train step on an empty replay buffer")
    agent.train_step()


def online_guideboot_flush(agent: OnlineGuideBootAgent) -> None:
    agent.flush()
