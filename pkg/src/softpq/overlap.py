"""Sparse GT x prediction overlap counts, per-pair IoU, and binary pixel scores.

The joint histogram is the single full pass over pixels; everything above it
(IoU pairs, matching, every metric) works on the sparse result. Intersections
and areas are exact integer counts; IoU is formed in double precision from
those integers, so identical inputs give identical floats on any backend.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import pair_counts
from .labelgrid import LabelGrid, require_same_shape

__all__ = ["OverlapMatrix", "IoUPairs", "joint_histogram", "iou_pairs", "pixel_binary_scores"]


@dataclass(frozen=True)
class OverlapMatrix:
    """Sparse intersection counts keyed by (gt_id, pred_id), plus per-id areas."""

    pairs: dict[tuple[int, int], int] = field(default_factory=dict)
    gt_areas: dict[int, int] = field(default_factory=dict)
    pred_areas: dict[int, int] = field(default_factory=dict)


@dataclass(frozen=True)
class IoUPairs:
    """Sparse IoU values keyed by (gt_id, pred_id); absent pairs have IoU 0."""

    entries: dict[tuple[int, int], float] = field(default_factory=dict)


def joint_histogram(gt: LabelGrid, pred: LabelGrid) -> OverlapMatrix:
    """Exact intersection counts for every co-occurring nonzero label pair.

    One pass over the pixels; background rows/columns feed only the area
    totals. Raises ShapeMismatchError when the grids disagree on dimensions.
    """
    require_same_shape(gt, pred)
    keys, counts = pair_counts(gt.labels.ravel(), pred.labels.ravel())
    g_ids = (keys >> np.uint64(32)).astype(np.int64)
    p_ids = (keys & np.uint64(0xFFFFFFFF)).astype(np.int64)

    pairs: dict[tuple[int, int], int] = {}
    gt_areas: dict[int, int] = {}
    pred_areas: dict[int, int] = {}
    for g, p, c in zip(g_ids.tolist(), p_ids.tolist(), counts.tolist()):
        if g != 0:
            gt_areas[g] = gt_areas.get(g, 0) + c
        if p != 0:
            pred_areas[p] = pred_areas.get(p, 0) + c
        if g != 0 and p != 0:
            pairs[(g, p)] = c
    return OverlapMatrix(pairs=pairs, gt_areas=gt_areas, pred_areas=dict(sorted(pred_areas.items())))


def iou_pairs(m: OverlapMatrix) -> IoUPairs:
    """IoU = intersection / (area_gt + area_pred - intersection) per stored pair."""
    entries = {
        (g, p): inter / (m.gt_areas[g] + m.pred_areas[p] - inter)
        for (g, p), inter in m.pairs.items()
    }
    return IoUPairs(entries=entries)


def pixel_binary_scores(gt: LabelGrid, pred: LabelGrid) -> tuple[float, float]:
    """Foreground-vs-foreground (pixel IoU, Dice), ignoring instance identity.

    Both scores are 1.0 when both foregrounds are empty (vacuous agreement)
    and 0.0 when exactly one is empty.
    """
    require_same_shape(gt, pred)
    fg_g = gt.labels != 0
    fg_p = pred.labels != 0
    inter = int(np.count_nonzero(fg_g & fg_p))
    a = int(np.count_nonzero(fg_g))
    b = int(np.count_nonzero(fg_p))
    union = a + b - inter
    if union == 0:
        return 1.0, 1.0
    return inter / union, 2 * inter / (a + b)
