"""
Guided versus unguided ensembles on a logistic environment
==========================================================

Twenty-five actions with two categorical context fields and logistic
rewards. Every agent sees the same contexts and reward coins for a given
seed, so per-seed differences in regret can be compared directly. The full
comparison uses ``configs/synthetic_glm.cfg`` (50 seeds, 10,000 steps);
this script runs a shorter version.
"""

from dataclasses import replace
from pathlib import Path

import numpy as np
from scipy.stats import ttest_rel

from guideboot.harness import parse_config, run_experiment

cfg = parse_config(Path(__file__).resolve().parent.parent / "configs" / "synthetic_glm.cfg")
horizon, seeds = 3000, tuple(range(6))
cfg = replace(cfg, seeds=seeds, env=replace(cfg.env, horizon=horizon),
              output=replace(cfg.output, stride=horizon))

records = run_experiment(cfg)
final = {}
for r in records:
    final.setdefault(r.agent, []).append(r.cum_regret)
final = {a: np.array(v) for a, v in final.items()}

print(f"cumulative regret after {horizon} steps, {len(seeds)} seeds")
for agent, regret in final.items():
    print(f"  {agent:<18} {regret.mean():8.1f} +/- {regret.std(ddof=1):6.1f}")

print("\npaired one-sided tests (first agent has lower regret)")
for a, b in (("guideboot", "bootstrap"), ("guideboot", "giro"), ("online_guideboot", "obb")):
    p = ttest_rel(final[a], final[b], alternative="less").pvalue
    print(f"  {a} vs {b}: p = {p:.3g}")
