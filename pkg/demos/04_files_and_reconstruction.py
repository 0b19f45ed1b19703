"""
From a YUV file to reconstructed frames
=======================================
"""

import tempfile
from pathlib import Path

import blockmatch as bm

work = Path(tempfile.mkdtemp())

# %%
# Write a synthetic clip as raw 4:2:0 and as Y4M, then read both back.
seq = bm.synth(bm.SynthSpec("translate", (-2, 3), 160, 128, 4, seed=5))
bm.save_yuv420(seq, work / "clip.yuv")
bm.save_y4m(seq, work / "clip.y4m")

raw = bm.load_yuv420(work / "clip.yuv", 160, 128)
y4m = bm.load_y4m(work / "clip.y4m")
print(raw, y4m, sep="\n")

# %%
# Estimate with diamond search and predict each frame from its predecessor.
cfg = bm.EstimatorConfig(algo="ds", w_max=7)
fields, _ = bm.estimate_sequence(raw, cfg)
for k, fld in enumerate(fields, start=1):
    pred = bm.reconstruct(raw[k - 1], fld, cfg.block_n)
    q = bm.frame_quality(raw[k], pred, k)
    print(f"frame {k}: mse {q.mse:8.3f}  psnr {q.psnr_db:6.2f} dB")

# %%
# The error sits in the border blocks: their true match would start outside
# the reference frame, so no search can find it. Leave out the left column
# and the bottom row of blocks and the prediction is exact.
err = (pred.luma.astype(int) - raw[3].luma.astype(int)) ** 2
print("interior mse:", err[:112, 16:].mean())

# %%
# The same run through the command line writes CSV files and a manifest:
#
#   blockmatch reconstruct --input clip.y4m --algo fs,ds --w 7 --out recon/
print("files in", work)
