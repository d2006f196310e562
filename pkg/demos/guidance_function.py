"""
From impression counts to fake samples
======================================

Each training sample of input ``x`` draws a fake positive and a fake
negative, each with probability ``min(alpha / density(x), 1)``. Density is a
per-field harmonic average of value counts, so an input is treated as
familiar only when every one of its field values is.
"""

import numpy as np

from guideboot.core import Batch, FieldLayout, RngStream
from guideboot.guidance import GuidanceState, augment_with_fakes

layout = FieldLayout((4, 3))
state = GuidanceState(layout, alpha=1.0, kind="harmonic")

# a skewed history: action 0 is shown a lot, action 3 never
g = np.random.default_rng(0)
actions = g.choice(3, size=200, p=[0.8, 0.15, 0.05])
context = g.integers(0, 3, size=200)
state.update(np.stack([actions, context], axis=1))
print("action counts :", state.counts[0].tolist())
print("context counts:", state.counts[1].tolist())

grid = np.array([[a, c] for a in range(4) for c in range(3)])
rho = state.density(grid)
prob = state.guidance(grid)
for (a, c), r, p in zip(grid, rho, prob):
    print(f"action {a} context {c}:  density {r:7.2f}  fake probability {p:.3f}")

# one augmented batch: rare inputs come back with extra 0/1 labels
batch = Batch(grid, np.zeros(len(grid)))
aug = augment_with_fakes(batch, state, RngStream(1).derive("fakes"))
print(f"\n{len(batch)} real samples -> {len(aug)} after augmentation")

# the harmonic average collapses to zero if any field value is unseen
state.update(np.array([[3, 0]]))
print("density of (3, 0) after one impression:", float(state.density([3, 0])[0]))
