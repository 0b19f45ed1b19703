"""Block-matching estimators: full search, three/four-step, diamond, PSA, PVSSA.

Every estimator reduces to a candidate stream evaluated by a
:class:`~blockmatch.matching.BlockMatcher`. Points are clamped to the
``+-w_max`` window and to the frame, and each distinct point is evaluated
once per block; ``nsp`` counts those evaluations.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from .matching import BlockMatcher, BlockRef, CriterionKind, MatchResult, SearchRect, clamp_rect
from .predictors import MotionField, PredictorSet, gather_predictors, psa_region_list, psa_regions, pvssa_rect


class Algo(str, Enum):
    FS = "fs"
    TSS = "3ss"
    FSS = "4ss"
    DS = "ds"
    PSA = "psa"
    PVSSA = "pvssa"

    @classmethod
    def parse(cls, name) -> "Algo":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        aliases = {"tss": "3ss", "fss": "4ss"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise ValueError(f"unknown algorithm {name!r}") from None

    @property
    def label(self) -> str:
        return self.name


MAX_ROUNDS = 64


@dataclass(frozen=True)
class EstimatorConfig:
    algo: Algo = Algo.PVSSA
    w_max: int = 15
    block_n: int = 16
    d: int = 3
    criterion: CriterionKind = CriterionKind.SAE
    psa_count_overlaps: bool = False

    def __post_init__(self):
        object.__setattr__(self, "algo", Algo.parse(self.algo))
        object.__setattr__(self, "criterion", CriterionKind.parse(self.criterion))
        if self.w_max < 0:
            raise ValueError("w_max must be >= 0")
        if self.block_n < 2:
            raise ValueError("block_n must be >= 2")
        if self.d < 0:
            raise ValueError("d must be >= 0")

    def with_(self, **kw) -> "EstimatorConfig":
        return replace(self, **kw)

    def echo(self) -> dict:
        return {
            "algo": self.algo.value,
            "w": self.w_max,
            "n": self.block_n,
            "d": self.d,
            "criterion": self.criterion.name,
            "psa_count_overlaps": self.psa_count_overlaps,
        }


@dataclass
class FrameStats:
    frame_index: int
    results: list = field(default_factory=list)

    @property
    def total_nsp(self) -> int:
        return sum(r.nsp for r in self.results)

    @property
    def mean_nsp(self) -> float:
        return self.total_nsp / len(self.results) if self.results else 0.0


# --- candidate generators -------------------------------------------------


def _window(block: BlockRef, cfg: EstimatorConfig, width: int, height: int) -> SearchRect:
    return clamp_rect(SearchRect.square(cfg.w_max), block, width, height, cfg.w_max)


def fs_candidates(block: BlockRef, cfg: EstimatorConfig, width: int, height: int) -> list:
    return _window(block, cfg, width, height).points()


def pvssa_candidates(block: BlockRef, preds: PredictorSet, cfg: EstimatorConfig, width: int, height: int) -> list:
    return clamp_rect(pvssa_rect(preds, cfg.d), block, width, height, cfg.w_max).points()


def psa_candidates(block: BlockRef, preds: PredictorSet, cfg: EstimatorConfig, width: int, height: int):
    """Clamped PSA points and their NSP.

    Points outside the clamped window are dropped rather than projected.
    With ``psa_count_overlaps`` the NSP counts every surviving region point,
    duplicates included; otherwise it is the number of distinct points.
    """
    win = _window(block, cfg, width, height)
    pts = [p for p in psa_regions(preds, 2) if p in win]
    if not pts:
        return [(0, 0)], 1
    if cfg.psa_count_overlaps:
        return pts, sum(1 for p in psa_region_list(preds, 2) if p in win)
    return pts, len(pts)


def _ladder(w_max: int) -> list[int]:
    """Halving step sizes starting at the largest power of two not above ``(w_max+1)/2``."""
    if w_max <= 0:
        return []
    s = 1
    while s * 2 <= (w_max + 1) // 2:
        s *= 2
    steps = []
    while s >= 1:
        steps.append(s)
        s //= 2
    return steps


def _square_pattern(step: int) -> list[tuple[int, int]]:
    return [(i * step, j * step) for j in (-1, 0, 1) for i in (-1, 0, 1)]


LDSP = sorted([(0, 0), (0, -2), (0, 2), (-2, 0), (2, 0), (-1, -1), (1, -1), (-1, 1), (1, 1)], key=lambda p: (p[1], p[0]))
SDSP = sorted([(0, 0), (0, -1), (0, 1), (-1, 0), (1, 0)], key=lambda p: (p[1], p[0]))


class _CachedSearch:
    """Running first-minimum over a growing set of distinct evaluated points."""

    def __init__(self, matcher: BlockMatcher, block: BlockRef, window: SearchRect):
        self.matcher = matcher
        self.block = block
        self.window = window
        self.visited: dict = {}
        self.best = None
        self.best_cost = None
        self.rounds = 0
        self.evaluate([(0, 0)], (0, 0))

    def evaluate(self, offsets, center) -> tuple:
        self.rounds += 1
        if self.rounds > MAX_ROUNDS:
            raise RuntimeError(f"search for block {self.block} exceeded {MAX_ROUNDS} rounds")
        cx, cy = center
        new = []
        for ox, oy in offsets:
            p = (cx + ox, cy + oy)
            if p in self.window and p not in self.visited and p not in new:
                new.append(p)
        if new:
            costs = self.matcher.raw_costs(self.block, new)
            for p, c in zip(new, costs):
                c = int(c)
                self.visited[p] = c
                if self.best_cost is None or c < self.best_cost:
                    self.best, self.best_cost = p, c
        return self.best

    def result(self) -> MatchResult:
        return MatchResult(self.best, self.matcher.kind.scale(self.best_cost, self.block.n), len(self.visited))


def _three_step(s: _CachedSearch, w_max: int) -> None:
    center = (0, 0)
    for step in _ladder(w_max):
        center = s.evaluate(_square_pattern(step), center)


def _four_step(s: _CachedSearch, w_max: int) -> None:
    center = (0, 0)
    while True:
        best = s.evaluate(_square_pattern(2), center)
        if best == center:
            break
        center = best
    s.evaluate(_square_pattern(1), center)


def _diamond(s: _CachedSearch, w_max: int) -> None:
    center = (0, 0)
    while True:
        best = s.evaluate(LDSP, center)
        if best == center:
            break
        center = best
    s.evaluate(SDSP, center)


_STEP_SEARCHES = {Algo.TSS: _three_step, Algo.FSS: _four_step, Algo.DS: _diamond}


def step_search(matcher: BlockMatcher, block: BlockRef, cfg: EstimatorConfig, variant=None):
    """Run an iterative pattern search; returns ``(result, evaluated points)``."""
    variant = Algo.parse(variant or cfg.algo)
    s = _CachedSearch(matcher, block, _window(block, cfg, matcher.width, matcher.height))
    _STEP_SEARCHES[variant](s, cfg.w_max)
    return s.result(), list(s.visited)


def search_block(matcher: BlockMatcher, block: BlockRef, preds: PredictorSet, cfg: EstimatorConfig):
    """Estimate one block. Returns ``(MatchResult, evaluated displacement list)``."""
    w, h = matcher.width, matcher.height
    algo = cfg.algo
    if algo in _STEP_SEARCHES:
        return step_search(matcher, block, cfg, algo)
    if algo is Algo.FS:
        cands = fs_candidates(block, cfg, w, h)
        return matcher.best(block, cands, len(cands)), cands
    if algo is Algo.PVSSA:
        cands = pvssa_candidates(block, preds, cfg, w, h)
        return matcher.best(block, cands, len(cands)), cands
    if algo is Algo.PSA:
        cands, nsp = psa_candidates(block, preds, cfg, w, h)
        return matcher.best(block, cands, nsp), cands
    raise ValueError(f"unsupported algorithm {algo}")


def block_grid(width: int, height: int, n: int) -> tuple[int, int]:
    if width % n or height % n:
        raise ValueError(f"frame {width}x{height} is not divisible into {n}x{n} blocks")
    return height // n, width // n


def estimate_frame(cur, ref, prev_field: MotionField | None, cfg: EstimatorConfig):
    """Raster-order estimation of every block of ``cur`` against ``ref``."""
    cur_l = getattr(cur, "luma", cur)
    ref_l = getattr(ref, "luma", ref)
    if cur_l.shape != ref_l.shape:
        raise ValueError(f"current {cur_l.shape} and reference {ref_l.shape} differ in size")
    height, width = cur_l.shape
    n = cfg.block_n
    rows, cols = block_grid(width, height, n)
    if prev_field is not None and (prev_field.rows, prev_field.cols) != (rows, cols):
        raise ValueError("previous motion field has a different block grid")

    index = getattr(cur, "index", 0)
    field_ = MotionField(rows, cols, index)
    matcher = BlockMatcher(cur_l, ref_l, n, cfg.criterion)
    for r in range(rows):
        for c in range(cols):
            preds = gather_predictors(field_, prev_field, r, c)
            res, _ = search_block(matcher, BlockRef(c * n, r * n, n), preds, cfg)
            field_.append(res)
    return field_, FrameStats(index, list(field_.entries))


def estimate_sequence(seq, cfg: EstimatorConfig):
    """Estimate frames ``1..len-1``, each against its predecessor.

    The previous frame's field supplies the temporal predictor; the first
    estimated frame has none.
    """
    fields, stats = [], []
    prev = None
    frames = list(seq)
    for f in range(1, len(frames)):
        fld, st = estimate_frame(frames[f], frames[f - 1], prev, cfg)
        fields.append(fld)
        stats.append(st)
        prev = fld
    return fields, stats


def fs_mean_nsp(width: int, height: int, cfg: EstimatorConfig) -> float:
    """Average clamped full-search point count per block, from geometry alone."""
    rows, cols = block_grid(width, height, cfg.block_n)
    n = cfg.block_n
    total = sum(
        _window(BlockRef(c * n, r * n, n), cfg, width, height).count for r in range(rows) for c in range(cols)
    )
    return total / (rows * cols)
