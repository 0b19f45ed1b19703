"""Block-matching motion estimation with predictor-bounded adaptive search areas.

Six estimators share one interface (see :mod:`blockmatch.algorithms`):
exhaustive full search, three-step, four-step and diamond search, the
four-region predictive search (PSA), and PVSSA, which searches the
``d``-grown bounding rectangle of five neighbour vectors.
"""

__version__ = "0.1.0"

from .algorithms import (
    Algo,
    EstimatorConfig,
    FrameStats,
    estimate_frame,
    estimate_sequence,
    fs_candidates,
    fs_mean_nsp,
    psa_candidates,
    pvssa_candidates,
    search_block,
    step_search,
)
from .analysis import (
    ChungTable,
    ContainmentRecord,
    FrameQuality,
    SequenceReport,
    chung_probabilities,
    containment_record,
    containment_records,
    frame_quality,
    p_of_d,
    pr_of_d,
    pr_table,
    psnr_from_mse,
    reconstruct,
    sequence_report,
    speedup,
)
from .matching import (
    BlockMatcher,
    BlockRef,
    CriterionKind,
    MatchResult,
    SearchRect,
    best_match,
    clamp_rect,
    criterion,
)
from .predictors import (
    MotionField,
    PredictorSet,
    displacement_D,
    gather_predictors,
    psa_regions,
    pvssa_rect,
)
from .video_io import (
    Frame,
    Sequence,
    SynthSpec,
    VideoFormatError,
    load_y4m,
    load_yuv420,
    save_y4m,
    save_yuv420,
    synth,
)
