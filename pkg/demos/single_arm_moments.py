"""
Uncertainty of a rarely clicked arm
===================================

An arm shown 50 times with a single click. The plain bootstrap mean of such
an arm has tiny spread, and with zero clicks it has none at all, so a greedy
ensemble never revisits it. Adding symmetric fake rewards restores a spread
close to the Beta posterior.
"""

from guideboot.core import RngStream
from guideboot.oracles import (
    beta_posterior_stats,
    bootstrap_estimator_stats,
    exact_guideboot_estimator,
    guideboot_estimator_stats,
    mc_guideboot_estimator,
    mc_prior_bootstrap_estimator,
)

alpha, n = 1.0, 50
rng = RngStream(0).derive("demo")

print(f"{'clicks':>6} {'estimator':<28} {'mean':>9} {'std':>9}")
for n_s in (0, 1, 25):
    rows = [
        ("Beta posterior", beta_posterior_stats(alpha, n, n_s)),
        ("bootstrap", bootstrap_estimator_stats(n, n_s)),
        ("guided, closed form", guideboot_estimator_stats(alpha, n, n_s)),
        # fakes placed before resampling: the closed form is exact here
        ("guided, prior weighted (MC)", mc_prior_bootstrap_estimator(alpha, n, n_s, 200_000, rng.derive(f"p{n_s}"))),
        # fakes added after resampling, as the agents train
        ("guided, after resample (MC)", mc_guideboot_estimator(alpha, n, n_s, 200_000, rng.derive(f"g{n_s}"))),
        ("guided, after resample exact", exact_guideboot_estimator(alpha, n, n_s)),
    ]
    for name, m in rows:
        print(f"{n_s:>6} {name:<28} {m.mean:9.5f} {m.std:9.5f}")
    print()

# the variance gap to the posterior closes like (2a + n + 1) / (2a + n)
for n in (20, 50, 200, 1000):
    ratio = guideboot_estimator_stats(1, n, n // 5).variance / beta_posterior_stats(1, n, n // 5).variance
    print(f"n={n:5d}  guided / posterior variance = {ratio:.5f}")
