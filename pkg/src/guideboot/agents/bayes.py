"""Bayesian logistic regression on the one-hot encoding, and the two
policies built on it (GLM-UCB and Thompson sampling).

The posterior is a Laplace approximation: a ridge-regularized MAP estimate
refined by Newton steps, with covariance equal to the inverse Hessian.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import expit

from ..core import FieldLayout, RngStream, argmax_tiebreak
from .base import Agent, Buffer

__all__ = ["BayesGlmState", "GlmUcbAgent", "TsBlrAgent", "glm_ucb_select", "sample_weights",
           "ts_blr_sample_select"]


class BayesGlmState:
    """Gaussian posterior ``N(mean, cov)`` over one-hot logistic weights.

    A fresh state is the prior ``N(0, I / ridge)``.
    """

    def __init__(self, layout: FieldLayout, ridge: float = 1.0) -> None:
        if ridge <= 0:
            raise ValueError("ridge must be positive")
        self.layout = layout
        self.ridge = ridge
        d = layout.one_hot_dim
        self.mean = np.zeros(d)
        self.precision = ridge * np.eye(d)
        self.cov = np.eye(d) / ridge
        self._offsets = layout.offsets

    def index(self, candidates) -> np.ndarray:
        return np.atleast_2d(candidates) + self._offsets

    def linear(self, candidates, weights=None) -> np.ndarray:
        w = self.mean if weights is None else weights
        return w[self.index(candidates)].sum(axis=1)

    def width(self, candidates) -> np.ndarray:
        """``sqrt(x' cov x)`` for each one-hot row."""
        idx = self.index(candidates)
        quad = self.cov[idx[:, :, None], idx[:, None, :]].sum(axis=(1, 2))
        return np.sqrt(np.maximum(quad, 0.0))

    def fit(self, features, rewards, newton_steps: int = 5, tol: float = 1e-8) -> None:
        """Refresh the MAP estimate (warm-started) and the Laplace covariance."""
        features = np.asarray(features, dtype=np.int64)
        rewards = np.asarray(rewards, dtype=np.float64)
        rows, inverse = np.unique(features, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        counts = np.bincount(inverse, minlength=len(rows)).astype(np.float64)
        succ = np.bincount(inverse, weights=rewards, minlength=len(rows))
        d = self.layout.one_hot_dim
        phi = np.zeros((len(rows), d))
        np.put_along_axis(phi, rows + self._offsets, 1.0, axis=1)
        w = self.mean.copy()
        eye = np.eye(d)
        for _ in range(newton_steps):
            p = expit(phi @ w)
            grad = phi.T @ (counts * p - succ) + self.ridge * w
            hess = (phi.T * (counts * p * (1.0 - p))) @ phi + self.ridge * eye
            step = np.linalg.solve(hess, grad)
            w -= step
            if np.max(np.abs(step)) < tol:
                break
        p = expit(phi @ w)
        self.mean = w
        self.precision = (phi.T * (counts * p * (1.0 - p))) @ phi + self.ridge * eye
        self.cov = np.linalg.inv(self.precision)
        self.cov = 0.5 * (self.cov + self.cov.T)


def glm_ucb_select(state: BayesGlmState, candidates, t: float) -> int:
    """Optimistic choice on the linear-predictor scale with bonus ``sqrt(log(t + 1))``."""
    if not np.all(np.isfinite(state.cov)):
        raise ValueError("posterior covariance is not finite")
    alpha_t = math.sqrt(math.log(t + 1.0))
    return argmax_tiebreak(state.linear(candidates) + alpha_t * state.width(candidates))


def sample_weights(state: BayesGlmState, rng: RngStream, size: int | None = None) -> np.ndarray:
    """Weight vector(s) drawn from ``N(mean, cov)``; shape ``(d,)`` or ``(size, d)``."""
    try:
        chol = np.linalg.cholesky(state.cov)
    except np.linalg.LinAlgError:
        raise ValueError("posterior covariance is not positive definite") from None
    d = state.mean.shape[0]
    if size is None:
        return state.mean + chol @ rng.gen.standard_normal(d)
    return state.mean + rng.gen.standard_normal((size, d)) @ chol.T


def ts_blr_sample_select(state: BayesGlmState, candidates, rng: RngStream) -> int:
    """Draw weights from the Laplace posterior and act greedily on them."""
    return argmax_tiebreak(state.linear(candidates, sample_weights(state, rng)))


class _BayesGlmAgent(Agent):
    def __init__(self, layout, horizon, rng, *, refit_period=50, ridge=1.0):
        super().__init__(layout, horizon, rng)
        if refit_period < 1:
            raise ValueError("refit period must be at least 1")
        self.refit_period = refit_period
        self.state = BayesGlmState(layout, ridge)
        self.buffer = Buffer(layout.n_fields)
        self._select_rng = rng.derive("select")

    def observe(self, x, reward, t):
        self.buffer.append(x, reward)
        if len(self.buffer) % self.refit_period == 0:
            data = self.buffer.batch()
            self.state.fit(data.features, data.rewards)


class GlmUcbAgent(_BayesGlmAgent):
    name = "glm_ucb"

    def select(self, candidates, t):
        return glm_ucb_select(self.state, candidates, t)


class TsBlrAgent(_BayesGlmAgent):
    name = "ts_blr"

    def select(self, candidates, t):
        return ts_blr_sample_select(self.state, candidates, self._select_rng)
