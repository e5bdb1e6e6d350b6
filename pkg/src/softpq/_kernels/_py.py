"""Pure numpy implementations of the hot kernels.

These are the reference semantics; the compiled backend in ``_core.pyx`` must
produce bit-identical outputs. All functions take/return C-contiguous uint32
arrays (uint64 for packed pair keys).
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"

_SENTINEL = np.uint64(0xFFFFFFFFFFFFFFFF)


def pair_counts(gt: np.ndarray, pred: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Count co-occurrences of (gt, pred) label pairs over aligned flat arrays.

    Returns (keys, counts) where key = gt_id << 32 | pred_id, keys ascending.
    Background (0) pairs are included; callers filter as needed.
    """
    keys = (gt.astype(np.uint64) << np.uint64(32)) | pred.astype(np.uint64)
    uniq, counts = np.unique(keys, return_counts=True)
    return uniq, counts.astype(np.int64)


def erode_once(labels: np.ndarray) -> np.ndarray:
    """One per-instance erosion step with the 3x3 cross element.

    A pixel survives iff all four edge-neighbours carry the same label;
    out-of-image neighbours count as outside the instance.
    """
    h, w = labels.shape
    padded = np.zeros((h + 2, w + 2), dtype=labels.dtype)
    padded[1:-1, 1:-1] = labels
    c = padded[1:-1, 1:-1]
    keep = (
        (padded[:-2, 1:-1] == c)
        & (padded[2:, 1:-1] == c)
        & (padded[1:-1, :-2] == c)
        & (padded[1:-1, 2:] == c)
    )
    return np.where((c != 0) & keep, c, 0).astype(labels.dtype)


def dilate_once(labels: np.ndarray) -> np.ndarray:
    """One per-instance dilation step with the 3x3 cross element.

    Instances grow into background only; where several instances reach the
    same background pixel in one step, the smallest label id wins.
    """
    h, w = labels.shape
    padded = np.full((h + 2, w + 2), _SENTINEL, dtype=np.uint64)
    padded[1:-1, 1:-1] = labels
    # background neighbours are not growth candidates
    padded[padded == 0] = _SENTINEL
    nmin = np.minimum.reduce(
        [padded[:-2, 1:-1], padded[2:, 1:-1], padded[1:-1, :-2], padded[1:-1, 2:]]
    )
    grown = np.where((labels == 0) & (nmin != _SENTINEL), nmin, labels)
    return grown.astype(labels.dtype)
