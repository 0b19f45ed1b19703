"""Motion fields and the neighbour vectors used to steer predictive searches."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matching import MatchResult, SearchRect

# Slot order: B1 left, B2 upper-left, B3 upper, B4 upper-right (spatial,
# causal in raster order), B5 co-located block of the previous field.
SPATIAL_OFFSETS = ((0, -1), (-1, -1), (-1, 0), (-1, 1))


@dataclass
class MotionField:
    """Per-block match results of one frame, stored in raster order.

    Filled incrementally while a frame is being estimated.
    """

    rows: int
    cols: int
    frame_index: int = 0
    entries: list = field(default_factory=list)

    def __len__(self):
        return len(self.entries)

    @property
    def complete(self) -> bool:
        return len(self.entries) == self.rows * self.cols

    def append(self, result: MatchResult) -> None:
        if self.complete:
            raise ValueError("motion field is already complete")
        self.entries.append(result)

    def at(self, row: int, col: int) -> MatchResult:
        k = row * self.cols + col
        if k >= len(self.entries):
            raise LookupError(f"block ({row},{col}) has not been estimated yet")
        return self.entries[k]

    def mv(self, row: int, col: int) -> tuple:
        return self.at(row, col).mv

    def vectors(self) -> np.ndarray:
        """``(rows, cols, 2)`` int array of ``(x, y)`` vectors."""
        if not self.complete:
            raise ValueError("motion field is incomplete")
        return np.array([e.mv for e in self.entries], dtype=np.int64).reshape(self.rows, self.cols, 2)

    def positions(self):
        for k in range(len(self.entries)):
            yield divmod(k, self.cols)


@dataclass(frozen=True)
class PredictorSet:
    mvs: tuple
    available: tuple

    def __post_init__(self):
        if len(self.mvs) != 5 or len(self.available) != 5:
            raise ValueError("a predictor set has exactly five slots")

    @property
    def spatial(self) -> tuple:
        return self.mvs[:4]

    @classmethod
    def of(cls, *mvs) -> "PredictorSet":
        """Build from explicit vectors (all marked available); used in tests and examples."""
        if len(mvs) == 4:
            mvs = mvs + ((0, 0),)
        return cls(tuple(tuple(map(int, v)) for v in mvs), (True,) * 5)


def gather_predictors(current: MotionField, previous: MotionField | None, row: int, col: int) -> PredictorSet:
    """Collect B1..B5 for the block at ``(row, col)``; missing slots become ``(0, 0)``."""
    if row * current.cols + col > len(current.entries):
        raise LookupError(f"raster predecessors of block ({row},{col}) are missing")
    mvs, avail = [], []
    for dr, dc in SPATIAL_OFFSETS:
        r, c = row + dr, col + dc
        if 0 <= r < current.rows and 0 <= c < current.cols:
            mvs.append(current.mv(r, c))
            avail.append(True)
        else:
            mvs.append((0, 0))
            avail.append(False)
    if previous is not None:
        mvs.append(previous.mv(row, col))
        avail.append(True)
    else:
        mvs.append((0, 0))
        avail.append(False)
    return PredictorSet(tuple(mvs), tuple(avail))


def pvssa_rect(preds: PredictorSet, d: int) -> SearchRect:
    """Bounding box of all five predictors grown by ``d`` on every side (unclamped)."""
    if d < 0:
        raise ValueError("d must be >= 0")
    xs = [v[0] for v in preds.mvs]
    ys = [v[1] for v in preds.mvs]
    return SearchRect(min(xs) - d, max(xs) + d, min(ys) - d, max(ys) + d)


def psa_region_list(preds: PredictorSet, r: int = 2) -> list[tuple[int, int]]:
    """Every point of the four ``(2r+1)^2`` squares around B1..B4, overlaps included."""
    pts = []
    for px, py in preds.spatial:
        pts.extend(SearchRect.square(r, px, py).points())
    return pts


def psa_regions(preds: PredictorSet, region_half_width: int = 2) -> list[tuple[int, int]]:
    """Deduplicated union of the four predictor squares, row-major by ``(y, x)``."""
    pts = set(psa_region_list(preds, region_half_width))
    return sorted(pts, key=lambda p: (p[1], p[0]))


def displacement_D(preds: PredictorSet, mv_c) -> int:
    """Chebyshev distance from ``mv_c`` to the nearest spatial predictor."""
    cx, cy = mv_c
    return min(max(abs(cx - x), abs(cy - y)) for x, y in preds.spatial)
