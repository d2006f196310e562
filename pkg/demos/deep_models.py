"""
Neural reward models with a context interaction
===============================================

The reward here depends on a pairwise interaction between the two context
fields, which a model with one weight per field value cannot express. Two
streaming learners share an MLP architecture: one explores through guided
fake samples across an ensemble, the other through random actions.
"""

from dataclasses import replace
from pathlib import Path

from guideboot.harness import aggregate, parse_config, run_experiment

cfg = parse_config(Path(__file__).resolve().parent.parent / "configs" / "deep_smoke.cfg")
horizon = 8000
cfg = replace(cfg, seeds=(0, 1, 2), env=replace(cfg.env, horizon=horizon),
              output=replace(cfg.output, stride=horizon))

for row in aggregate(run_experiment(cfg), cfg.agents):
    print(f"{row.agent:<18} {row.metric:<17} {row.mean:9.4f}  (std {row.std:.4f}, {row.seeds} seeds)")
