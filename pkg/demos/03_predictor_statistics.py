"""
How often do the neighbours know the answer?
============================================

Pr(d) measures how often the true (full-search) vector falls inside the
predictor rectangle grown by d. The D table counts how far outside it lands.
"""

import numpy as np

import blockmatch as bm

# %%
# Full-search fields with the mean-absolute-error criterion.
seq = bm.synth(bm.SynthSpec("translate", (2, 1), 128, 96, 6, seed=2))
cfg = bm.EstimatorConfig(algo="fs", criterion="mae")
fields, _ = bm.estimate_sequence(seq, cfg)

# %%
# One record per block, reused for every d.
records = bm.containment_records(fields)
for d, p in bm.pr_table(records, range(0, 6)).items():
    print(f"Pr({d}) = {100 * p:6.2f}%")

# %%
# A static clip against a random one: predictors only help when motion is coherent.
rng = np.random.default_rng(3)
noise = bm.Sequence.from_arrays([rng.integers(0, 256, (96, 128), dtype=np.uint8) for _ in range(4)])
noise_fields, _ = bm.estimate_sequence(noise, cfg)
print("noise Pr(3) =", round(bm.pr_of_d(noise_fields, 3), 3))

# %%
# The D distribution, accumulated. It runs to 2W because a vector and its
# predictors can sit at opposite edges of the window.
table = bm.chung_probabilities([fields, noise_fields], cfg.w_max)
for d, (p, acc) in enumerate(zip(table.prob, table.accumulated)):
    if d <= 5 or d == table.d_max:
        print(f"D={d:<2}  {100 * p:6.2f}%  accumulated {100 * acc:6.2f}%")
