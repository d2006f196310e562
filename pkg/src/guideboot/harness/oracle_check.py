"""Verification of the single-arm estimator moments, printable as pass/fail lines."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import RngStream
from ..oracles import (
    beta_posterior_stats,
    bootstrap_estimator_stats,
    exact_guideboot_estimator,
    guideboot_estimator_stats,
    mc_guideboot_estimator,
    mc_prior_bootstrap_estimator,
)

__all__ = ["Check", "run_oracle_checks"]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def closed_form_checks() -> list[Check]:
    out = []
    b = beta_posterior_stats(1, 50, 1)
    out.append(Check("beta posterior (1, 50, 1)",
                     math.isclose(b.mean, 2 / 52) and math.isclose(b.variance, 100 / 143312),
                     f"mean={b.mean:.7g} var={b.variance:.4g}"))
    g = guideboot_estimator_stats(1, 50, 1)
    out.append(Check("guideboot closed form (1, 50, 1)",
                     math.isclose(g.mean, 2 / 52) and math.isclose(g.variance, 100 / 140608),
                     f"mean={g.mean:.7g} var={g.variance:.4g}"))
    boot = bootstrap_estimator_stats(50, 0)
    g0 = guideboot_estimator_stats(1, 50, 0)
    out.append(Check("degenerate arm repaired (n=50, n_s=0)",
                     boot.variance == 0.0 and math.isclose(g0.mean, 1 / 52) and g0.variance > 0,
                     f"bootstrap var={boot.variance}, guideboot mean={g0.mean:.6g} var={g0.variance:.3g}"))
    ratios = []
    ok = True
    for n in (20, 50, 200):
        r = guideboot_estimator_stats(1, n, n // 5).variance / beta_posterior_stats(1, n, n // 5).variance
        ratios.append(r)
        ok &= math.isclose(r, (2 + n + 1) / (2 + n), rel_tol=1e-12) and r < 1.05
    out.append(Check("variance ratio (2a+n+1)/(2a+n), n in {20,50,200}", ok,
                     ", ".join(f"{r:.5f}" for r in ratios)))
    return out


def monte_carlo_checks(trials: int = 1_000_000, seed: int = 0,
                       cases=((1.0, 50, 1), (1.0, 50, 0), (1.0, 50, 25))) -> list[Check]:
    """Sampler against the closed form (4 standard errors on the mean, 2% on the
    variance), and against exact enumeration of the same sampler."""
    out = []
    root = RngStream(seed).derive("oracle-check")
    for alpha, n, n_s in cases:
        mc = mc_guideboot_estimator(alpha, n, n_s, trials, root.derive(f"{alpha}-{n}-{n_s}"))
        cf = guideboot_estimator_stats(alpha, n, n_s)
        ex = exact_guideboot_estimator(alpha, n, n_s)
        se = cf.std / math.sqrt(trials)
        z = (mc.mean - cf.mean) / se
        rel = abs(mc.variance / cf.variance - 1.0)
        out.append(Check(f"sampler vs closed form ({alpha:g}, {n}, {n_s})",
                         abs(z) <= 4.0 and rel <= 0.02,
                         f"mean {mc.mean:.6g} vs {cf.mean:.6g} ({z:+.1f} se), "
                         f"variance {mc.variance:.4g} vs {cf.variance:.4g} ({100 * rel:.1f}%)"))
        se_ex = ex.std / math.sqrt(trials)
        z_ex = (mc.mean - ex.mean) / se_ex if se_ex > 0 else 0.0
        rel_ex = abs(mc.variance / ex.variance - 1.0) if ex.variance > 0 else 0.0
        out.append(Check(f"sampler vs exact enumeration ({alpha:g}, {n}, {n_s})",
                         abs(z_ex) <= 4.0 and rel_ex <= 0.02,
                         f"mean {mc.mean:.6g} vs {ex.mean:.6g} ({z_ex:+.1f} se), "
                         f"variance {100 * rel_ex:.2f}% off"))
        if float(2 * alpha + n).is_integer():
            pb = mc_prior_bootstrap_estimator(alpha, n, n_s, trials, root.derive(f"prior-{alpha}-{n}-{n_s}"))
            z_pb = (pb.mean - cf.mean) / se
            rel_pb = abs(pb.variance / cf.variance - 1.0)
            out.append(Check(f"prior-weighted bootstrap vs closed form ({alpha:g}, {n}, {n_s})",
                             abs(z_pb) <= 4.0 and rel_pb <= 0.02,
                             f"mean {pb.mean:.6g} ({z_pb:+.1f} se), variance {100 * rel_pb:.2f}% off"))
    return out


def mean_identity_check(samples: int = 1000, seed: int = 0) -> Check:
    g = np.random.default_rng(seed)
    bad = 0
    for _ in range(samples):
        alpha = float(g.uniform(0.01, 10))
        n = int(g.integers(0, 500))
        n_s = int(g.integers(0, n + 1))
        if guideboot_estimator_stats(alpha, n, n_s).mean != beta_posterior_stats(alpha, n, n_s).mean:
            bad += 1
    return Check("guideboot mean == Beta posterior mean", bad == 0, f"{samples - bad}/{samples} equal")


def run_oracle_checks(trials: int = 1_000_000, seed: int = 0) -> list[Check]:
    return closed_form_checks() + [mean_identity_check(seed=seed)] + monte_carlo_checks(trials, seed)
