"""Independent brute-force oracles and fuzz-corpus generators.

Everything here is deliberately naive (per-pair boolean masks, per-pixel
loops) so the fast paths in the library are checked against arithmetic that
shares no code with them.
"""

from __future__ import annotations

import numpy as np

from softpq import DiskGridSpec, LabelGrid, make_disk_grid, morph_instances, split_instances


def naive_pair_counts(gt: np.ndarray, pred: np.ndarray) -> dict[tuple[int, int], int]:
    """O(H*W*|G|*|P|) intersection counts over nonzero label pairs."""
    out: dict[tuple[int, int], int] = {}
    for g in np.unique(gt):
        if g == 0:
            continue
        gmask = gt == g
        for p in np.unique(pred):
            if p == 0:
                continue
            inter = int(np.count_nonzero(gmask & (pred == p)))
            if inter:
                out[(int(g), int(p))] = inter
    return out


def naive_iou(gt: np.ndarray, pred: np.ndarray) -> dict[tuple[int, int], float]:
    ious = {}
    for (g, p), inter in naive_pair_counts(gt, pred).items():
        a = int(np.count_nonzero(gt == g))
        b = int(np.count_nonzero(pred == p))
        ious[(g, p)] = inter / (a + b - inter)
    return ious


def naive_erode(labels: np.ndarray) -> np.ndarray:
    """Per-pixel 4-connected erosion, no vectorization."""
    h, w = labels.shape
    out = np.zeros_like(labels)
    for i in range(h):
        for j in range(w):
            v = labels[i, j]
            if v == 0:
                continue
            ok = True
            for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                ni, nj = i + di, j + dj
                if not (0 <= ni < h and 0 <= nj < w) or labels[ni, nj] != v:
                    ok = False
                    break
            if ok:
                out[i, j] = v
    return out


def naive_dilate(labels: np.ndarray) -> np.ndarray:
    """Per-pixel 4-connected dilation into background; smallest id wins."""
    h, w = labels.shape
    out = labels.copy()
    for i in range(h):
        for j in range(w):
            if labels[i, j] != 0:
                continue
            best = 0
            for di, dj in ((-1, 0), (1, 0), (0, -1), (0, 1)):
                ni, nj = i + di, j + dj
                if 0 <= ni < h and 0 <= nj < w and labels[ni, nj] != 0:
                    if best == 0 or labels[ni, nj] < best:
                        best = labels[ni, nj]
            out[i, j] = best
    return out


# ---------------------------------------------------------------------------
# Fuzz corpus


def random_blob_grid(rng: np.random.Generator, h: int, w: int, n_blobs: int) -> np.ndarray:
    """Disjoint-by-overwrite rectangles and disks; later ids win."""
    labels = np.zeros((h, w), dtype=np.uint32)
    for idx in range(1, n_blobs + 1):
        if rng.random() < 0.5:
            r0, c0 = int(rng.integers(0, h)), int(rng.integers(0, w))
            r1 = int(rng.integers(r0, min(h, r0 + max(2, h // 2)))) + 1
            c1 = int(rng.integers(c0, min(w, c0 + max(2, w // 2)))) + 1
            labels[r0:r1, c0:c1] = idx
        else:
            cy, cx = int(rng.integers(0, h)), int(rng.integers(0, w))
            rad = int(rng.integers(1, max(2, min(h, w) // 3)))
            yy, xx = np.ogrid[:h, :w]
            labels[(yy - cy) ** 2 + (xx - cx) ** 2 <= rad * rad] = idx
    return labels


def fuzz_pair(rng: np.random.Generator, max_side: int = 32, max_id: int = 8) -> tuple[LabelGrid, LabelGrid]:
    """One diverse (gt, pred) pair: noise, blobs, perturbed disks, or empties."""
    h = int(rng.integers(1, max_side + 1))
    w = int(rng.integers(1, max_side + 1))
    style = rng.integers(0, 4)
    if style == 0:  # uniform label noise
        gt = rng.integers(0, max_id + 1, (h, w)).astype(np.uint32)
        pred = rng.integers(0, max_id + 1, (h, w)).astype(np.uint32)
    elif style == 1:  # blobs vs blobs
        gt = random_blob_grid(rng, h, w, int(rng.integers(1, max_id + 1)))
        pred = random_blob_grid(rng, h, w, int(rng.integers(1, max_id + 1)))
    elif style == 2:  # perturbed copy
        gt = random_blob_grid(rng, h, w, int(rng.integers(1, max_id + 1)))
        pred = gt.copy()
        flips = rng.random((h, w)) < rng.uniform(0.02, 0.3)
        pred[flips] = rng.integers(0, max_id + 1, int(flips.sum()))
        pred = pred.astype(np.uint32)
    else:  # possibly empty sides
        gt = np.zeros((h, w), dtype=np.uint32)
        pred = np.zeros((h, w), dtype=np.uint32)
        if rng.random() < 0.7:
            gt = random_blob_grid(rng, h, w, 2)
        if rng.random() < 0.7:
            pred = random_blob_grid(rng, h, w, 2)
    return LabelGrid(gt), LabelGrid(pred)


def disk_pair(rng: np.random.Generator) -> tuple[LabelGrid, LabelGrid]:
    """Small disk lattice against a structured perturbation of itself."""
    spec = DiskGridSpec(rows=int(rng.integers(1, 3)), cols=int(rng.integers(1, 3)),
                        radius=5, spacing=12)
    gt = make_disk_grid(spec)
    roll = int(rng.integers(0, 3))
    if roll == 0:
        pred = morph_instances(gt, "erode", int(rng.integers(0, 4)))
    elif roll == 1:
        pred = morph_instances(gt, "dilate", int(rng.integers(0, 4)))
    else:
        pred, _ = split_instances(gt, int(rng.integers(2, 4)), float(rng.random()),
                                  gap=int(rng.integers(0, 2)), seed=int(rng.integers(0, 2**31)))
    return gt, pred
