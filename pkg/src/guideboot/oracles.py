"""Moments of single-arm estimators under Bernoulli feedback.

For one action pulled ``n`` times with ``n_s`` successes:

* ``beta_posterior_stats`` -- Beta(alpha + n_s, alpha + n - n_s) posterior.
* ``bootstrap_estimator_stats`` -- mean of an n-out-of-n resample.
* ``guideboot_estimator_stats`` -- closed-form moments of the resample
  with symmetric fake rewards of total weight ``alpha`` on each side.

``mc_guideboot_estimator`` simulates the procedure the agents actually run
(resample, then add each fake with probability ``alpha / n``, then average
every reward in the union). ``exact_guideboot_estimator`` enumerates the
distribution of that same procedure, so the closed form can be checked
against both a sampler and an exact computation. The closed form is exact
for ``mc_prior_bootstrap_estimator`` (fakes placed in the data with weight
``alpha`` before resampling) and only asymptotic for resample-then-augment.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .core import RngStream

__all__ = [
    "MomentPair",
    "beta_posterior_stats",
    "bootstrap_estimator_stats",
    "guideboot_estimator_stats",
    "mc_guideboot_estimator",
    "exact_guideboot_estimator",
    "mc_prior_bootstrap_estimator",
]


@dataclass(frozen=True)
class MomentPair:
    mean: float
    variance: float

    def __post_init__(self) -> None:
        if self.variance < 0:
            raise ValueError(f"negative variance {self.variance}")

    @property
    def std(self) -> float:
        return float(np.sqrt(self.variance))


def _check(alpha: float, n: int, n_s: int, *, need_alpha: bool = True) -> None:
    if need_alpha and not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not 0 <= n_s <= n:
        raise ValueError(f"need 0 <= n_s <= n, got n={n}, n_s={n_s}")


def _prior_mean(alpha: float, n: int, n_s: int) -> float:
    return (alpha + n_s) / (2 * alpha + n)


def beta_posterior_stats(alpha: float, n: int, n_s: int) -> MomentPair:
    _check(alpha, n, n_s)
    a, b = alpha + n_s, alpha + n - n_s
    s = a + b
    return MomentPair(_prior_mean(alpha, n, n_s), a * b / (s * s * (s + 1)))


def bootstrap_estimator_stats(n: int, n_s: int) -> MomentPair:
    if n < 1:
        raise ValueError("bootstrap needs at least one observation")
    _check(0.0, n, n_s, need_alpha=False)
    return MomentPair(n_s / n, n_s * (n - n_s) / n**3)


def guideboot_estimator_stats(alpha: float, n: int, n_s: int) -> MomentPair:
    _check(alpha, n, n_s)
    s = 2 * alpha + n
    return MomentPair(_prior_mean(alpha, n, n_s), (alpha + n_s) * (alpha + n - n_s) / s**3)


def mc_guideboot_estimator(alpha: float, n: int, n_s: int, trials: int, rng: RngStream,
                           chunk: int = 200_000) -> MomentPair:
    """Empirical moments of resample-then-augment over ``trials`` repetitions.

    Each trial draws ``n`` points with replacement from ``n_s`` ones and
    ``n - n_s`` zeros, adds a fake 1 and a fake 0 independently per drawn
    point with probability ``alpha / n`` each, and returns the mean reward of
    the combined set. Only the per-trial totals matter, so the draws are
    taken as binomial counts.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    _check(alpha, n, n_s, need_alpha=False)
    if n < 1:
        raise ValueError("need at least one observation")
    g = rng.gen
    p_fake = min(alpha / n, 1.0)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < trials:
        k = min(chunk, trials - done)
        real = g.binomial(n, n_s / n, size=k)
        ones = g.binomial(n, p_fake, size=k)
        zeros = g.binomial(n, p_fake, size=k)
        est = (real + ones) / (n + ones + zeros)
        total += est.sum()
        total_sq += np.dot(est, est)
        done += k
    mean = total / trials
    var = max(total_sq / trials - mean * mean, 0.0)
    return MomentPair(float(mean), float(var))


def exact_guideboot_estimator(alpha: float, n: int, n_s: int) -> MomentPair:
    """Exact moments of the quantity sampled by :func:`mc_guideboot_estimator`."""
    _check(alpha, n, n_s, need_alpha=False)
    if n < 1:
        raise ValueError("need at least one observation")
    k = np.arange(n + 1)
    p_real = binom.pmf(k, n, n_s / n)
    p_fake = binom.pmf(k, n, min(alpha / n, 1.0))
    s, f1, f0 = np.meshgrid(k, k, k, indexing="ij", sparse=True)
    w = p_real[:, None, None] * p_fake[None, :, None] * p_fake[None, None, :]
    est = (s + f1) / (n + f1 + f0)
    mean = float(np.sum(w * est))
    var = float(np.sum(w * est * est) - mean * mean)
    return MomentPair(mean, max(var, 0.0))


def mc_prior_bootstrap_estimator(alpha: float, n: int, n_s: int, trials: int,
                                 rng: RngStream) -> MomentPair:
    """Resample ``2 alpha + n`` points from the data plus a fake 1 and a fake 0
    of weight ``alpha`` each, and average. ``2 alpha + n`` must be an integer."""
    _check(alpha, n, n_s)
    size = 2 * alpha + n
    if abs(size - round(size)) > 1e-9:
        raise ValueError("2 * alpha + n must be an integer")
    size = int(round(size))
    g = rng.gen
    # category draws: fake 1, fake 0, real
    counts = g.multinomial(size, [alpha / size, alpha / size, n / size], size=trials)
    ones = counts[:, 0] + g.binomial(counts[:, 2], n_s / n if n else 0.0)
    est = ones / size
    return MomentPair(float(est.mean()), float(est.var()))
