"""softpq: graded instance-segmentation metrics with dual IoU thresholds.

The soft panoptic quality score keeps classic PQ's matching at the upper
threshold but grants penalty-weighted partial credit to overlaps above a
lower threshold, so fragmented or near-miss predictions degrade the score
smoothly instead of cliff-dropping. Baselines (PQ, F1, mAP, pixel IoU, Dice),
controlled perturbation generators, and experiment runners are included.
"""

from ._kernels import available_backends, kernel_backend
from .experiments import (
    CurveTable,
    emit,
    erosion_curve,
    overseg_curve,
    penalty_ablation,
    threshold_sweep,
)
from .labelgrid import (
    LabelFormatError,
    LabelGrid,
    LabelStats,
    ShapeMismatchError,
    read_label_image,
    relabel_sequential,
    stats,
    write_label_image,
)
from .metrics import (
    DEFAULT_MAP_THRESHOLDS,
    MatchResult,
    ScoreReport,
    SoftPQConfig,
    classify_matches,
    detection_scores,
    evaluate_all,
    f1_from_matches,
    modified_iou,
    panoptic_quality,
    penalty_weight,
    softpq,
)
from .overlap import IoUPairs, OverlapMatrix, iou_pairs, joint_histogram, pixel_binary_scores
from .perturb import (
    DiskGridSpec,
    PerturbSpec,
    PlacementError,
    add_ghosts,
    apply_perturbation,
    make_disk_grid,
    morph_instances,
    partial_mask,
    split_instances,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "available_backends",
    "kernel_backend",
    "LabelGrid",
    "LabelStats",
    "LabelFormatError",
    "ShapeMismatchError",
    "read_label_image",
    "write_label_image",
    "relabel_sequential",
    "stats",
    "OverlapMatrix",
    "IoUPairs",
    "joint_histogram",
    "iou_pairs",
    "pixel_binary_scores",
    "SoftPQConfig",
    "MatchResult",
    "ScoreReport",
    "DEFAULT_MAP_THRESHOLDS",
    "penalty_weight",
    "classify_matches",
    "modified_iou",
    "f1_from_matches",
    "softpq",
    "panoptic_quality",
    "detection_scores",
    "evaluate_all",
    "DiskGridSpec",
    "PerturbSpec",
    "PlacementError",
    "make_disk_grid",
    "morph_instances",
    "split_instances",
    "add_ghosts",
    "partial_mask",
    "apply_perturbation",
    "CurveTable",
    "erosion_curve",
    "threshold_sweep",
    "overseg_curve",
    "penalty_ablation",
    "emit",
]
