"""Graded panoptic quality with dual IoU thresholds, plus baseline metrics.

The scoring pipeline:

1. ``classify_matches`` splits IoU pairs into a one-to-one matching (IoU at or
   above the upper threshold, greedy by descending IoU) and soft entries
   (strictly between the thresholds, anchored on the GT segment in ``over``
   mode or on the prediction in ``under`` mode).
2. ``modified_iou`` credits each anchor with its match IoU plus a penalty-
   weighted sum of its soft IoUs; the weight shrinks with the soft count.
3. ``softpq`` normalizes: by GT count when no matches exist, otherwise by the
   match count times the detection F1.

With both thresholds at 0.5 the soft interval is empty and the score
reduces to classic PQ. Note on mAP: scores carry no confidence ranking here,
so "average precision" at each threshold is the TP/(TP+FP+FN) form common in
cell-segmentation benchmarks, averaged over IoU thresholds 0.50..0.95 --
not the COCO ranked-precision integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .labelgrid import LabelGrid, LabelStats, require_same_shape
from .labelgrid import stats as grid_stats
from .overlap import IoUPairs, iou_pairs, joint_histogram, pixel_binary_scores

__all__ = [
    "PENALTY_KINDS",
    "DEFAULT_MAP_THRESHOLDS",
    "SoftPQConfig",
    "MatchResult",
    "ScoreReport",
    "penalty_weight",
    "classify_matches",
    "modified_iou",
    "f1_from_matches",
    "softpq",
    "panoptic_quality",
    "detection_scores",
    "evaluate_all",
]

PENALTY_KINDS = ("sqrt", "linear", "log")
MODES = ("over", "under")

# IoU thresholds 0.50, 0.55, ..., 0.95
DEFAULT_MAP_THRESHOLDS = tuple(i / 100 for i in range(50, 100, 5))


@dataclass(frozen=True)
class SoftPQConfig:
    """Thresholds and aggregation knobs.

    lower/upper bound the soft interval (strict on both sides); upper is also
    the full-match threshold and must stay >= 0.5 so matches are unique.
    mode picks the soft-anchor side: 'over' credits GT segments (tolerates
    splits), 'under' credits predictions (tolerates merges).
    """

    lower: float = 0.05
    upper: float = 0.5
    penalty: str = "sqrt"
    mode: str = "over"

    def __post_init__(self) -> None:
        if not 0.0 <= self.lower <= self.upper <= 1.0:
            raise ValueError(
                f"need 0 <= lower <= upper <= 1, got lower={self.lower}, upper={self.upper}"
            )
        if self.upper < 0.5:
            raise ValueError(f"upper threshold must be >= 0.5, got {self.upper}")
        if self.penalty not in PENALTY_KINDS:
            raise ValueError(f"penalty must be one of {PENALTY_KINDS}, got {self.penalty!r}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class MatchResult:
    """Outcome of threshold classification over the IoU pairs.

    matched_pairs is a one-to-one matching; soft_sets maps each anchor id to
    its (other-side id, IoU) soft entries. tp/fp/fn come from the matching
    alone -- soft entries still count as FP/FN.
    """

    matched_pairs: tuple[tuple[int, int, float], ...]
    soft_sets: dict[int, tuple[tuple[int, float], ...]] = field(default_factory=dict)
    tp: int = 0
    fp: int = 0
    fn: int = 0
    gt_count: int = 0
    pred_count: int = 0


@dataclass(frozen=True)
class ScoreReport:
    """Per-image scores from one shared overlap pass."""

    softpq: float
    pq: float
    sq: float
    rq_f1: float
    map_score: float
    pixel_iou: float
    dice: float
    config: SoftPQConfig
    per_anchor_modified: dict[int, float] = field(default_factory=dict)

    def as_dict(self) -> dict[str, float]:
        """Flat score mapping; key 'map' is the threshold-averaged detection score."""
        return {
            "softpq": self.softpq,
            "pq": self.pq,
            "sq": self.sq,
            "rq_f1": self.rq_f1,
            "map": self.map_score,
            "pixel_iou": self.pixel_iou,
            "dice": self.dice,
        }


def penalty_weight(kind: str, n: int) -> float:
    """Weight applied to a summed soft-match IoU given n soft entries.

    sqrt -> 1/sqrt(n+1), linear -> 1/(n+1), log -> 1/ln(n+1). Only defined
    for n >= 1 (the soft term vanishes at n = 0, and ln(1) = 0 would blow up).
    Beware: 1/ln(2) > 1, so 'log' up-weights a lone soft match.
    """
    if n < 1:
        raise ValueError(f"penalty_weight needs n >= 1, got {n}")
    if kind == "sqrt":
        return 1.0 / math.sqrt(n + 1)
    if kind == "linear":
        return 1.0 / (n + 1)
    if kind == "log":
        return 1.0 / math.log(n + 1)
    raise ValueError(f"unknown penalty kind {kind!r}")


def _greedy_match(
    entries: dict[tuple[int, int], float], threshold: float
) -> tuple[list[tuple[int, int, float]], list[tuple[int, int, float]]]:
    """One-to-one matching among pairs with IoU >= threshold.

    Greedy by descending IoU, ties broken by smaller gt id then pred id.
    Returns (matched, demoted) where demoted pairs cleared the threshold but
    lost their gt or pred to a better pair.
    """
    candidates = sorted(
        ((g, p, v) for (g, p), v in entries.items() if v >= threshold),
        key=lambda t: (-t[2], t[0], t[1]),
    )
    used_g: set[int] = set()
    used_p: set[int] = set()
    matched: list[tuple[int, int, float]] = []
    demoted: list[tuple[int, int, float]] = []
    for g, p, v in candidates:
        if g in used_g or p in used_p:
            demoted.append((g, p, v))
        else:
            used_g.add(g)
            used_p.add(p)
            matched.append((g, p, v))
    matched.sort(key=lambda t: (t[0], t[1]))
    return matched, demoted


def classify_matches(
    pairs: IoUPairs,
    gt_stats: LabelStats,
    pred_stats: LabelStats,
    config: SoftPQConfig,
) -> MatchResult:
    """Split IoU pairs into the hard matching and the soft sets.

    Soft entries are pairs strictly inside (lower, upper) plus any pair at or
    above upper that lost the greedy uniqueness tie-break; both kinds are
    anchored per config.mode. IoU exactly equal to lower is excluded.

    A demoted tie can only exist at upper == 0.5 (two pairs >= upper sharing a
    segment force both IoUs to exactly 0.5), and with a degenerate interval
    (lower == upper) it is dropped rather than folded in: that keeps the
    score identical to classic PQ, which ignores the losing tie.
    """
    matched, demoted = _greedy_match(pairs.entries, config.upper)

    soft: dict[int, list[tuple[int, float]]] = {}

    def add_soft(g: int, p: int, v: float) -> None:
        anchor, other = (g, p) if config.mode == "over" else (p, g)
        soft.setdefault(anchor, []).append((other, v))

    if config.lower < config.upper:
        for g, p, v in demoted:
            add_soft(g, p, v)
    for (g, p), v in pairs.entries.items():
        if config.lower < v < config.upper:
            add_soft(g, p, v)

    soft_sets = {
        anchor: tuple(sorted(items, key=lambda t: (-t[1], t[0])))
        for anchor, items in sorted(soft.items())
    }
    tp = len(matched)
    return MatchResult(
        matched_pairs=tuple(matched),
        soft_sets=soft_sets,
        tp=tp,
        fp=pred_stats.instance_count - tp,
        fn=gt_stats.instance_count - tp,
        gt_count=gt_stats.instance_count,
        pred_count=pred_stats.instance_count,
    )


def modified_iou(match: MatchResult, config: SoftPQConfig) -> tuple[dict[int, float], float]:
    """Per-anchor graded IoU and its total.

    Each anchor earns its matched IoU (if any) plus penalty_weight(kind, n)
    times the sum of its n soft IoUs. Anchors with no soft entries contribute
    the match term alone.
    """
    anchor_index = 0 if config.mode == "over" else 1
    per_anchor: dict[int, float] = {}
    for pair in match.matched_pairs:
        per_anchor[pair[anchor_index]] = pair[2]
    for anchor, items in match.soft_sets.items():
        soft_sum = math.fsum(v for _, v in items)
        weight = penalty_weight(config.penalty, len(items))
        per_anchor[anchor] = per_anchor.get(anchor, 0.0) + weight * soft_sum
    total = math.fsum(per_anchor.values())
    return dict(sorted(per_anchor.items())), total


def f1_from_matches(match: MatchResult) -> tuple[float, int, int, int]:
    """Detection F1 = 2tp/(2tp+fp+fn) with the vacuous both-empty case as 1."""
    tp, fp, fn = match.tp, match.fp, match.fn
    if match.gt_count == 0 and match.pred_count == 0:
        return 1.0, tp, fp, fn
    if tp == 0:
        return 0.0, tp, fp, fn
    return 2 * tp / (2 * tp + fp + fn), tp, fp, fn


def _softpq_from_match(match: MatchResult, config: SoftPQConfig) -> tuple[float, dict[int, float]]:
    per_anchor, total = modified_iou(match, config)
    m = match.tp
    if m == 0:
        if match.gt_count == 0:
            score = 1.0 if match.pred_count == 0 else 0.0
        else:
            score = total / match.gt_count
    else:
        f1, _, _, _ = f1_from_matches(match)
        score = total * f1 / m
    return score, per_anchor


def softpq(gt: LabelGrid, pred: LabelGrid, config: SoftPQConfig | None = None) -> float:
    """Soft panoptic quality of a prediction against ground truth."""
    config = config or SoftPQConfig()
    require_same_shape(gt, pred)
    piou = iou_pairs(joint_histogram(gt, pred))
    match = classify_matches(piou, grid_stats(gt), grid_stats(pred), config)
    score, _ = _softpq_from_match(match, config)
    return score


def _pq_from_pairs(piou: IoUPairs, gt_stats: LabelStats, pred_stats: LabelStats) -> tuple[float, float, float]:
    matched, _ = _greedy_match(piou.entries, 0.5)
    tp = len(matched)
    fp = pred_stats.instance_count - tp
    fn = gt_stats.instance_count - tp
    if gt_stats.instance_count == 0 and pred_stats.instance_count == 0:
        return 1.0, 1.0, 1.0
    if tp == 0:
        return 0.0, 0.0, 0.0
    sq = math.fsum(v for _, _, v in matched) / tp
    rq = tp / (tp + 0.5 * fp + 0.5 * fn)
    return sq * rq, sq, rq


def panoptic_quality(gt: LabelGrid, pred: LabelGrid) -> tuple[float, float, float]:
    """Classic (PQ, SQ, RQ) with greedy matching at IoU >= 0.5.

    IoU strictly above 0.5 is unique on disjoint masks; exact 0.5 ties are
    resolved by the same greedy rule the soft classifier uses.
    """
    require_same_shape(gt, pred)
    return _pq_from_pairs(iou_pairs(joint_histogram(gt, pred)), grid_stats(gt), grid_stats(pred))


def _detection_from_pairs(
    piou: IoUPairs,
    gt_stats: LabelStats,
    pred_stats: LabelStats,
    thresholds: tuple[float, ...],
) -> tuple[float, float]:
    n_gt = gt_stats.instance_count
    n_pred = pred_stats.instance_count
    both_empty = n_gt == 0 and n_pred == 0

    def tp_at(tau: float) -> int:
        matched, _ = _greedy_match(piou.entries, tau)
        return len(matched)

    tp_half = tp_at(0.5)
    if both_empty:
        f1_at_half = 1.0
    elif tp_half == 0:
        f1_at_half = 0.0
    else:
        f1_at_half = 2 * tp_half / (n_gt + n_pred)

    aps = []
    for tau in thresholds:
        if both_empty:
            aps.append(1.0)
            continue
        tp = tp_at(tau)
        aps.append(tp / (n_gt + n_pred - tp) if tp else 0.0)
    return f1_at_half, math.fsum(aps) / len(aps) if aps else 0.0


def detection_scores(
    gt: LabelGrid,
    pred: LabelGrid,
    thresholds: tuple[float, ...] = DEFAULT_MAP_THRESHOLDS,
) -> tuple[float, float]:
    """(F1 at IoU 0.5, mean AP over the threshold grid).

    AP at each threshold is TP/(TP+FP+FN) under greedy one-to-one matching;
    see the module docstring for why this is not COCO mAP.
    """
    require_same_shape(gt, pred)
    return _detection_from_pairs(
        iou_pairs(joint_histogram(gt, pred)), grid_stats(gt), grid_stats(pred), thresholds
    )


def evaluate_all(
    gt: LabelGrid,
    pred: LabelGrid,
    config: SoftPQConfig | None = None,
    thresholds: tuple[float, ...] = DEFAULT_MAP_THRESHOLDS,
) -> ScoreReport:
    """Every score from a single overlap pass.

    The joint histogram is computed once and shared across soft PQ, classic
    PQ, detection scores, and the binary pixel scores. `thresholds` feeds the
    mAP average only.
    """
    config = config or SoftPQConfig()
    require_same_shape(gt, pred)
    gt_stats = grid_stats(gt)
    pred_stats = grid_stats(pred)
    piou = iou_pairs(joint_histogram(gt, pred))

    match = classify_matches(piou, gt_stats, pred_stats, config)
    soft_score, per_anchor = _softpq_from_match(match, config)
    pq, sq, _ = _pq_from_pairs(piou, gt_stats, pred_stats)
    f1_half, map_score = _detection_from_pairs(piou, gt_stats, pred_stats, thresholds)
    pixel_iou, dice = pixel_binary_scores(gt, pred)

    return ScoreReport(
        softpq=soft_score,
        pq=pq,
        sq=sq,
        rq_f1=f1_half,
        map_score=map_score,
        pixel_iou=pixel_iou,
        dice=dice,
        config=config,
        per_anchor_modified=per_anchor,
    )
