"""Single-model policies: greedy, epsilon-greedy, count-based UCB1 and Beta
Thompson sampling on top of a learned model, MC dropout, and uniform play."""
from __future__ import annotations

import math

import numpy as np

from ..core import RngStream, argmax_tiebreak
from ..models import Mlp
from .base import Agent, SingleModelAgent

__all__ = [
    "CountBanditState",
    "GreedyAgent",
    "EpsilonGreedyAgent",
    "DecayingEpsilonGreedyAgent",
    "DeepUcb1Agent",
    "DeepTsBetaAgent",
    "McDropoutAgent",
    "UniformAgent",
    "epsilon_greedy_select",
    "epsilon_schedule",
    "deep_ucb1_score",
    "deep_ts_beta_sample",
    "mc_dropout_select",
]


class CountBanditState:
    """Impressions and successes keyed by action value."""

    def __init__(self, n_actions: int) -> None:
        self.impressions = np.zeros(n_actions, dtype=np.int64)
        self.successes = np.zeros(n_actions, dtype=np.int64)
        self.t = 0

    def update(self, action: int, reward: int) -> None:
        self.impressions[action] += 1
        self.successes[action] += reward
        self.t += 1


def epsilon_schedule(t: float, T: float, start: float = 0.1) -> float:
    """Linear decay from ``start`` at ``t = 0`` to zero at ``t = T``."""
    if not 0 <= t <= T:
        raise ValueError(f"need 0 <= t <= T, got t={t}, T={T}")
    return start * (1.0 - t / T)


def epsilon_greedy_select(model, candidates, epsilon: float, rng: RngStream) -> int:
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    g = rng.gen
    if g.random() < epsilon:
        return int(g.integers(len(candidates)))
    return argmax_tiebreak(model.predict_batch(candidates))


def deep_ucb1_score(p_hat, t: int, count, alpha: float = 0.1):
    """``p_hat + alpha * sqrt(2 ln t / count)``; unseen actions score ``+inf``."""
    p_hat = np.asarray(p_hat, dtype=np.float64)
    count = np.asarray(count, dtype=np.float64)
    if t < 1:
        raise ValueError("t must be at least 1")
    with np.errstate(divide="ignore", invalid="ignore"):
        bonus = alpha * np.sqrt(2.0 * math.log(t) / count)
    out = np.where(count > 0, p_hat + bonus, np.inf)
    return out if out.ndim else float(out)


def deep_ts_beta_sample(p_hat, count, shaping: float, rng: RngStream):
    """Beta draw with mean ``p_hat`` and pseudo-count ``count``, both parameters
    scaled by ``shaping`` and floored at 1. Unseen actions draw from Beta(1, 1)."""
    p_hat = np.asarray(p_hat, dtype=np.float64)
    count = np.asarray(count, dtype=np.float64)
    a = np.maximum(p_hat * count * shaping, 1.0)
    b = np.maximum((1.0 - p_hat) * count * shaping, 1.0)
    out = rng.gen.beta(a, b)
    return out if np.ndim(out) else float(out)


def mc_dropout_select(model: Mlp, candidates, rate: float, rng: RngStream) -> int:
    """Score every candidate under one shared dropout mask."""
    mask = model.dropout_mask(rate, rng)
    return argmax_tiebreak(model.predict_batch(candidates, mask))


class GreedyAgent(SingleModelAgent):
    """Pure exploitation; in online mode this is the conventional streaming learner."""

    name = "greedy"


class EpsilonGreedyAgent(SingleModelAgent):
    name = "epsilon_greedy"

    def __init__(self, layout, horizon, rng, *, epsilon=0.1, **kw):
        super().__init__(layout, horizon, rng, **kw)
        if not 0.0 <= epsilon <= 1.0:
            raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
        self.epsilon = epsilon

    def current_epsilon(self, t: int) -> float:
        return self.epsilon

    def select(self, candidates, t):
        return epsilon_greedy_select(self.model, candidates, self.current_epsilon(t), self._select_rng)


class DecayingEpsilonGreedyAgent(EpsilonGreedyAgent):
    name = "epsilon_greedy_decay"

    def current_epsilon(self, t):
        return epsilon_schedule(min(t, self.horizon), self.horizon, self.epsilon)


class _CountingAgent(SingleModelAgent):
    def __init__(self, layout, horizon, rng, **kw):
        super().__init__(layout, horizon, rng, **kw)
        self.counts = CountBanditState(layout.n_actions)

    def record(self, x, reward, t):
        self.counts.update(int(x[self.layout.action_field]), int(reward))

    def _action_counts(self, candidates):
        return self.counts.impressions[candidates[:, self.layout.action_field]]


class DeepUcb1Agent(_CountingAgent):
    name = "deep_ucb1"

    def __init__(self, layout, horizon, rng, *, alpha=0.1, **kw):
        super().__init__(layout, horizon, rng, **kw)
        self.alpha = alpha

    def select(self, candidates, t):
        scores = deep_ucb1_score(self.model.predict_batch(candidates), max(t, 1),
                                 self._action_counts(candidates), self.alpha)
        unseen = np.flatnonzero(np.isinf(scores))
        if unseen.size:
            return int(unseen[0])
        return argmax_tiebreak(scores)


class DeepTsBetaAgent(_CountingAgent):
    name = "deep_ts_beta"

    def __init__(self, layout, horizon, rng, *, shaping=0.25, **kw):
        super().__init__(layout, horizon, rng, **kw)
        self.shaping = shaping

    def select(self, candidates, t):
        p_hat = self.model.predict_batch(candidates)
        return argmax_tiebreak(
            deep_ts_beta_sample(p_hat, self._action_counts(candidates), self.shaping, self._select_rng)
        )


class McDropoutAgent(SingleModelAgent):
    """Dropout on the last hidden layer at training and decision time."""

    name = "mc_dropout"

    def __init__(self, layout, horizon, rng, *, dropout_rate=0.1, **kw):
        super().__init__(layout, horizon, rng, **kw)
        if not isinstance(self.model, Mlp):
            raise ValueError("mc_dropout needs the mlp reward model")
        if not 0.0 <= dropout_rate < 1.0:
            raise ValueError(f"dropout rate must be in [0, 1), got {dropout_rate}")
        self.rate = dropout_rate
        self._train_mask_rng = rng.derive("model-0").derive("dropout")

    def grad_kwargs(self):
        return {"dropout_rate": self.rate, "rng": self._train_mask_rng}

    def select(self, candidates, t):
        return mc_dropout_select(self.model, candidates, self.rate, self._select_rng)


class UniformAgent(Agent):
    name = "uniform"

    def __init__(self, layout, horizon, rng):
        super().__init__(layout, horizon, rng)
        self._select_rng = rng.derive("select")

    def select(self, candidates, t):
        return int(self._select_rng.gen.integers(len(candidates)))

    def observe(self, x, reward, t):
        pass
