"""
Where PVSSA looks
=================

A tour of the predictor-bounded search rectangle on one synthetic pair.
"""

# %%
# A 96x80 clip whose content drifts 3 pixels right and 2 down per frame.
import numpy as np

import blockmatch as bm

seq = bm.synth(bm.SynthSpec("random-texture-translate", (3, 2), 96, 80, 4, seed=1))
print(seq)

# %%
# Estimate frame 1 with full search. Every block of frame 1 is scored
# against frame 0, and every displacement in the +-15 window is tried.
fs = bm.EstimatorConfig(algo="fs")
fs_field, fs_stats = bm.estimate_frame(seq[1], seq[0], None, fs)
print(fs_field.vectors()[..., 0])  # horizontal components
print("FS points per block:", fs_stats.mean_nsp)

# %%
# The predictors of a block are its left, upper-left, upper and
# upper-right neighbours plus the co-located block one frame back.
# With frame 1's field in hand we can look at block (2, 2) of frame 2.
pv = bm.EstimatorConfig(algo="pvssa", d=2)
field2, _ = bm.estimate_frame(seq[2], seq[1], fs_field, pv)
preds = bm.gather_predictors(field2, fs_field, 2, 2)
print(preds)

# %%
# The search rectangle is their bounding box grown by d on every side.
rect = bm.pvssa_rect(preds, 2)
print(rect, "->", rect.count, "points")

# %%
# Spread the predictors out and the rectangle grows with them.
scattered = bm.PredictorSet.of((3, 2), (-4, 1), (3, 2), (6, 5), (3, -1))
wide = bm.pvssa_rect(scattered, 2)
print(wide, "->", wide.count, "points")

# %%
# Near the frame edge the rectangle is also clipped so the displaced block
# stays inside the reference frame.
corner = bm.BlockRef(0, 0, 16)
print(bm.pvssa_candidates(corner, scattered, pv, 96, 80)[:5], "...")

# %%
# How much work did PVSSA save over the sequence?
fields, stats = bm.estimate_sequence(seq, pv)
mean_nsp = np.mean([s.mean_nsp for s in stats])
print(f"PVSSA d=2: {mean_nsp:.1f} points/block, saving {bm.speedup(fs_stats.mean_nsp, mean_nsp):.1f}%")
