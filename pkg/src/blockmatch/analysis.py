"""Reconstruction, quality metrics and motion-vector prediction statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .predictors import MotionField, PredictorSet, displacement_D, gather_predictors
from .video_io import Frame

PEAK = 255


def reconstruct(ref, mfield: MotionField, block_n: int) -> Frame:
    """Motion-compensated prediction: copy each block's matched region from ``ref``."""
    if not mfield.complete:
        raise ValueError("cannot reconstruct from an incomplete motion field")
    src = getattr(ref, "luma", ref)
    h, w = src.shape
    if (mfield.rows * block_n, mfield.cols * block_n) != (h, w):
        raise ValueError("motion field grid does not cover the reference frame")
    out = np.empty_like(src)
    for (r, c), e in zip(mfield.positions(), mfield.entries):
        x0, y0 = c * block_n, r * block_n
        mx, my = e.mv
        sx, sy = x0 + mx, y0 + my
        if not (0 <= sx <= w - block_n and 0 <= sy <= h - block_n):
            raise ValueError(f"vector {e.mv} of block ({r},{c}) leaves the reference frame")
        out[y0 : y0 + block_n, x0 : x0 + block_n] = src[sy : sy + block_n, sx : sx + block_n]
    return Frame(out, mfield.frame_index)


@dataclass(frozen=True)
class FrameQuality:
    frame_index: int
    mse: float
    psnr_db: float  # math.inf when mse == 0

    @property
    def lossless(self) -> bool:
        return self.mse == 0


def psnr_from_mse(mse: float) -> float:
    if mse < 0:
        raise ValueError("mse must be non-negative")
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(PEAK * PEAK / mse)


def frame_quality(a, b, frame_index=None) -> FrameQuality:
    la = getattr(a, "luma", a)
    lb = getattr(b, "luma", b)
    if la.shape != lb.shape:
        raise ValueError(f"frame shapes differ: {la.shape} vs {lb.shape}")
    diff = la.astype(np.int64) - lb.astype(np.int64)
    mse = float((diff * diff).sum()) / diff.size
    if frame_index is None:
        frame_index = getattr(a, "index", 0)
    return FrameQuality(frame_index, mse, psnr_from_mse(mse))


def speedup(nsp_fs: float, nsp_alg: float) -> float:
    """Percentage of full-search points saved."""
    if nsp_fs == 0:
        raise ZeroDivisionError("full-search NSP is zero")
    return (nsp_fs - nsp_alg) / nsp_fs * 100


# --- rectangle containment ------------------------------------------------


@dataclass(frozen=True)
class ContainmentRecord:
    diff_min_x: int
    diff_max_x: int
    diff_min_y: int
    diff_max_y: int


def containment_record(preds: PredictorSet, mv_c) -> ContainmentRecord:
    xs = [v[0] for v in preds.mvs]
    ys = [v[1] for v in preds.mvs]
    cx, cy = mv_c
    return ContainmentRecord(min(xs) - cx, cx - max(xs), min(ys) - cy, cy - max(ys))


def p_of_d(record: ContainmentRecord, d: int) -> int:
    return int(
        record.diff_min_x <= d and record.diff_max_x <= d and record.diff_min_y <= d and record.diff_max_y <= d
    )


def _predictor_walk(fields):
    """Yield ``(preds, mv)`` for every block of consecutive-frame fields."""
    prev = None
    for fld in fields:
        for (r, c), e in zip(fld.positions(), fld.entries):
            yield gather_predictors(fld, prev, r, c), e.mv
        prev = fld


def containment_records(fields) -> list[ContainmentRecord]:
    """Records for every block of a run of consecutive full-search fields."""
    return [containment_record(p, mv) for p, mv in _predictor_walk(fields)]


def pr_of_d(records, d: int) -> float:
    """Fraction of blocks whose vector lies in its ``d``-grown predictor rectangle.

    Accepts either containment records or the motion fields themselves.
    """
    records = list(records)
    if records and isinstance(records[0], MotionField):
        records = containment_records(records)
    if not records:
        raise ValueError("no blocks to average over")
    return sum(p_of_d(r, d) for r in records) / len(records)


def pr_table(records, d_values) -> dict:
    records = list(records)
    if records and isinstance(records[0], MotionField):
        records = containment_records(records)
    return {d: pr_of_d(records, d) for d in d_values}


# --- D statistic over sequences ---------------------------------------------


@dataclass
class ChungTable:
    d_max: int
    prob: list  # prob[d] = averaged P(D = d)
    per_sequence: list = field(default_factory=list)

    @property
    def accumulated(self) -> list:
        return list(np.cumsum(self.prob))


def d_histogram(fld: MotionField, prev: MotionField | None, d_max: int) -> np.ndarray:
    """Per-frame empirical distribution of D over ``0..d_max``."""
    counts = np.zeros(d_max + 1)
    for (r, c), e in zip(fld.positions(), fld.entries):
        dv = displacement_D(gather_predictors(fld, prev, r, c), e.mv)
        counts[min(dv, d_max)] += 1
    return counts / counts.sum()


def chung_probabilities(sequences_fields, w_max: int) -> ChungTable:
    """Average and accumulated D probabilities across sequences.

    ``sequences_fields`` holds, per sequence, the full-search fields of its
    estimated frames (frame 1 onward). Each sequence's distribution is the
    mean over its frames; sequences are then weighted equally.
    D between two in-window vectors never exceeds ``2 * w_max``, so the
    table runs over ``0..2*w_max`` and the accumulated column ends at 1.
    """
    d_max = 2 * w_max
    per_seq = []
    for fields in sequences_fields:
        fields = list(fields)
        if not fields:
            raise ValueError("each sequence needs at least two frames")
        hists = []
        prev = None
        for fld in fields:
            hists.append(d_histogram(fld, prev, d_max))
            prev = fld
        per_seq.append(np.mean(hists, axis=0))
    if not per_seq:
        raise ValueError("no sequences given")
    prob = np.mean(per_seq, axis=0)
    return ChungTable(d_max, list(map(float, prob)), [list(map(float, p)) for p in per_seq])


# --- sequence reports ---------------------------------------------------------


@dataclass
class SequenceReport:
    sequence: str
    config: dict
    frames: list  # FrameQuality
    frame_nsp: list  # total NSP per frame
    blocks_per_frame: int
    fs_mean_nsp: float | None = None
    pr: dict = field(default_factory=dict)

    @property
    def algo(self) -> str:
        return self.config["algo"]

    @property
    def lossless_frames(self) -> int:
        return sum(1 for q in self.frames if q.lossless)

    @property
    def mean_psnr_db(self) -> float:
        """Mean of finite per-frame PSNR; ``inf`` if every frame is lossless."""
        vals = [q.psnr_db for q in self.frames if not q.lossless]
        if not vals:
            return math.inf if self.frames else math.nan
        return sum(vals) / len(vals)

    @property
    def mean_mse(self) -> float:
        return sum(q.mse for q in self.frames) / len(self.frames) if self.frames else math.nan

    @property
    def mean_nsp(self) -> float:
        blocks = self.blocks_per_frame * len(self.frame_nsp)
        return sum(self.frame_nsp) / blocks if blocks else math.nan

    @property
    def sur_pct(self) -> float | None:
        if self.fs_mean_nsp is None:
            return None
        return speedup(self.fs_mean_nsp, self.mean_nsp)


def sequence_report(seq, fields, cfg, fs_nsp: float | None = None, pr_d=()) -> SequenceReport:
    """Quality and cost summary for one estimator run over ``seq``.

    ``fields[k]`` belongs to frame ``k+1``. ``pr_d`` optionally lists ``d``
    values whose containment probability is measured on these fields.
    """
    frames = list(seq)
    quality, nsp = [], []
    for k, fld in enumerate(fields):
        f = k + 1
        rec = reconstruct(frames[f - 1], fld, cfg.block_n)
        quality.append(frame_quality(frames[f], rec, f))
        nsp.append(sum(e.nsp for e in fld.entries))
    blocks = fields[0].rows * fields[0].cols if fields else 0
    pr = pr_table(fields, pr_d) if pr_d and fields else {}
    return SequenceReport(getattr(seq, "name", "sequence"), cfg.echo(), quality, nsp, blocks, fs_nsp, pr)
