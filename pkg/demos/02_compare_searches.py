"""
Six searches, one clip
======================

Quality against cost for every estimator on a clip with two motions.
"""

import numpy as np
from scipy.ndimage import gaussian_filter

import blockmatch as bm


def smooth_noise(rng, shape, sigma):
    t = gaussian_filter(rng.integers(0, 256, shape).astype(float), sigma)
    return np.rint((t - t.min()) * 255 / np.ptp(t)).astype(np.uint8)


# %%
# A panning background with an object crossing it in the opposite direction.
rng = np.random.default_rng(0)
bg = smooth_noise(rng, (204, 236), 2.0)
obj = smooth_noise(rng, (40, 48), 1.0)
frames = []
for k in range(8):
    f = bg[10 + k : 154 + k, 20 + 2 * k : 196 + 2 * k].copy()
    f[40 + 2 * k : 80 + 2 * k, 100 - 3 * k : 148 - 3 * k] = obj
    frames.append(f)
clip = bm.Sequence.from_arrays(frames, "two-motions")

# %%
# Full search is the yardstick for both PSNR and points examined.
fs_cfg = bm.EstimatorConfig(algo="fs")
fs_nsp = bm.fs_mean_nsp(clip.width, clip.height, fs_cfg)

runs = [fs_cfg] + [fs_cfg.with_(algo=a) for a in ("3ss", "4ss", "ds", "psa")]
runs += [fs_cfg.with_(algo="pvssa", d=d) for d in (1, 2, 3)]

print(f"{'algo':<10}{'PSNR dB':>9}{'points':>9}{'saved %':>9}")
for cfg in runs:
    fields, _ = bm.estimate_sequence(clip, cfg)
    rep = bm.sequence_report(clip, fields, cfg, fs_nsp=fs_nsp)
    name = cfg.algo.label + (f" d={cfg.d}" if cfg.algo is bm.Algo.PVSSA else "")
    print(f"{name:<10}{rep.mean_psnr_db:9.3f}{rep.mean_nsp:9.1f}{rep.sur_pct:9.2f}")

# %%
# Step searches are cheap but can lock onto a local minimum. PVSSA spends
# its points where the neighbours already point, so at d=3 it matches the
# full-search quality here for a small fraction of the cost.
