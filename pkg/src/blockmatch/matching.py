"""Block-difference criteria, search-window geometry and exhaustive matching.

Displacements are ``(x, y)`` pairs with ``x`` horizontal (column) and ``y``
vertical (row). Costs are exact: plain ints for the sum criteria, and
:class:`fractions.Fraction` with denominator ``n*n`` for the mean criteria.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


class CriterionKind(Enum):
    """Criterion family ``(1/N^2)^beta * sum |cur - ref|^delta``."""

    SAE = (0, 1)
    MAE = (1, 1)
    SSE = (0, 2)
    MSE = (1, 2)

    @property
    def beta(self) -> int:
        return self.value[0]

    @property
    def delta(self) -> int:
        return self.value[1]

    @classmethod
    def parse(cls, name) -> "CriterionKind":
        if isinstance(name, cls):
            return name
        try:
            return cls[str(name).upper()]
        except KeyError:
            raise ValueError(f"unknown criterion {name!r}") from None

    def scale(self, raw: int, n: int):
        """Turn an integer sum into the criterion value for an ``n x n`` block."""
        return Fraction(int(raw), n * n) if self.beta else int(raw)


@dataclass(frozen=True)
class BlockRef:
    x0: int
    y0: int
    n: int

    def check(self, width: int, height: int) -> None:
        if self.x0 % self.n or self.y0 % self.n:
            raise ValueError(f"block origin ({self.x0},{self.y0}) is not on the {self.n}-grid")
        if not (0 <= self.x0 <= width - self.n and 0 <= self.y0 <= height - self.n):
            raise ValueError(f"block at ({self.x0},{self.y0}) exceeds {width}x{height} frame")


@dataclass(frozen=True)
class SearchRect:
    """Inclusive rectangle of integer displacements."""

    x_min: int
    x_max: int
    y_min: int
    y_max: int

    def __post_init__(self):
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(f"empty search rect {self}")

    @classmethod
    def square(cls, w: int, cx: int = 0, cy: int = 0) -> "SearchRect":
        return cls(cx - w, cx + w, cy - w, cy + w)

    @property
    def count(self) -> int:
        return (self.x_max - self.x_min + 1) * (self.y_max - self.y_min + 1)

    def __contains__(self, disp) -> bool:
        x, y = disp
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def points(self) -> list[tuple[int, int]]:
        """Row-major enumeration: ``y`` ascending outer, ``x`` ascending inner."""
        xs = range(self.x_min, self.x_max + 1)
        return [(x, y) for y in range(self.y_min, self.y_max + 1) for x in xs]

    def corners(self):
        return (
            (self.x_min, self.y_min),
            (self.x_min, self.y_max),
            (self.x_max, self.y_min),
            (self.x_max, self.y_max),
        )


ZERO_RECT = SearchRect(0, 0, 0, 0)


def clamp_rect(rect: SearchRect, block: BlockRef, frame_w: int, frame_h: int, w_max: int) -> SearchRect:
    """Intersect ``rect`` with the ``+-w_max`` window and the in-frame set.

    Falls back to the single zero displacement when nothing is left.
    """
    x_lo = max(rect.x_min, -w_max, -block.x0)
    x_hi = min(rect.x_max, w_max, frame_w - block.n - block.x0)
    y_lo = max(rect.y_min, -w_max, -block.y0)
    y_hi = min(rect.y_max, w_max, frame_h - block.n - block.y0)
    if x_lo > x_hi or y_lo > y_hi:
        return ZERO_RECT
    return SearchRect(x_lo, x_hi, y_lo, y_hi)


def criterion(cur, ref, block: BlockRef, disp, kind: CriterionKind = CriterionKind.SAE):
    """Cost of matching ``block`` of ``cur`` against ``ref`` displaced by ``disp``."""
    cur = getattr(cur, "luma", cur)
    ref = getattr(ref, "luma", ref)
    dx, dy = disp
    n = block.n
    h, w = ref.shape
    rx, ry = block.x0 + dx, block.y0 + dy
    if not (0 <= rx <= w - n and 0 <= ry <= h - n):
        raise IndexError(f"displacement {disp} moves block ({block.x0},{block.y0}) outside the reference")
    a = cur[block.y0 : block.y0 + n, block.x0 : block.x0 + n].astype(np.int64)
    b = ref[ry : ry + n, rx : rx + n].astype(np.int64)
    diff = np.abs(a - b)
    raw = int((diff**kind.delta).sum())
    return kind.scale(raw, n)


@dataclass(frozen=True)
class MatchResult:
    mv: tuple
    cost: object
    nsp: int


class BlockMatcher:
    """Batched cost evaluation for one (current, reference) frame pair.

    Raw integer sums are returned; the criterion's ``1/N^2`` factor is a
    positive rescaling applied only when results are reported.
    """

    def __init__(self, cur, ref, n: int, kind: CriterionKind = CriterionKind.SAE):
        cur = getattr(cur, "luma", cur)
        ref = getattr(ref, "luma", ref)
        if cur.shape != ref.shape:
            raise ValueError(f"frame shapes differ: {cur.shape} vs {ref.shape}")
        self.cur = cur.astype(np.int32)
        self.ref = ref.astype(np.int32)
        self.n = n
        self.kind = CriterionKind.parse(kind)
        self.height, self.width = cur.shape
        self._windows = sliding_window_view(self.ref, (n, n))

    def raw_costs(self, block: BlockRef, disps) -> np.ndarray:
        """Integer criterion sums for each displacement in ``disps`` (order kept)."""
        d = np.asarray(disps, dtype=np.intp).reshape(-1, 2)
        rx = block.x0 + d[:, 0]
        ry = block.y0 + d[:, 1]
        if d.size and (
            rx.min() < 0 or ry.min() < 0 or rx.max() > self.width - self.n or ry.max() > self.height - self.n
        ):
            raise IndexError(f"candidate displacement leaves the reference frame for block {block}")
        cand = self._windows[ry, rx]
        cb = self.cur[block.y0 : block.y0 + self.n, block.x0 : block.x0 + self.n]
        diff = cand - cb
        if self.kind.delta == 1:
            err = np.abs(diff)
        else:
            err = diff * diff
        return err.reshape(len(d), -1).sum(axis=1, dtype=np.int64)

    def best(self, block: BlockRef, candidates, nsp: int | None = None) -> MatchResult:
        """First minimum over ``candidates`` in the order given."""
        candidates = list(candidates)
        if not candidates:
            raise ValueError("best_match needs at least one candidate")
        costs = self.raw_costs(block, candidates)
        i = int(np.argmin(costs))
        mv = (int(candidates[i][0]), int(candidates[i][1]))
        count = len(dict.fromkeys(candidates)) if nsp is None else nsp
        return MatchResult(mv, self.kind.scale(costs[i], self.n), count)


def best_match(cur, ref, block: BlockRef, candidates, kind: CriterionKind = CriterionKind.SAE) -> MatchResult:
    """Exhaustive first-minimum search over an ordered candidate set.

    Duplicate candidates are evaluated once; ``nsp`` is the number of
    distinct displacements.
    """
    candidates = list(dict.fromkeys((int(x), int(y)) for x, y in candidates))
    return BlockMatcher(cur, ref, block.n, kind).best(block, candidates)
