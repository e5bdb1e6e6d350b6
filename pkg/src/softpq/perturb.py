"""Synthetic ground truths and controlled error generators.

The disk grid is the standard ground truth: rows x cols disks on a regular
lattice, disjoint by construction. The perturbation families cover the usual
failure taxonomy: under-segmentation proxies (erode/dilate), over-segmentation
(split), ghost predictions, and partial masks. Everything is pure and fully
determined by (input grid, parameters, seed); morphology uses the 3x3 cross
(4-connected) structuring element throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import dilate_once, erode_once
from .labelgrid import LabelGrid

__all__ = [
    "DiskGridSpec",
    "PerturbSpec",
    "PlacementError",
    "make_disk_grid",
    "morph_instances",
    "split_instances",
    "add_ghosts",
    "partial_mask",
    "apply_perturbation",
]

PERTURB_KINDS = ("erode", "dilate", "split", "ghost", "partial")


class PlacementError(RuntimeError):
    """No room left to place a ghost segment in the background."""


@dataclass(frozen=True)
class DiskGridSpec:
    """Regular lattice of equal disks; image is (rows*spacing+1) x (cols*spacing+1)."""

    rows: int = 5
    cols: int = 5
    radius: int = 18
    spacing: int = 51

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError("need at least a 1x1 disk lattice")
        if self.radius < 1:
            raise ValueError("radius must be >= 1")
        if self.spacing <= 2 * self.radius:
            raise ValueError(
                f"spacing {self.spacing} must exceed disk diameter {2 * self.radius} "
                "so instances never touch"
            )


@dataclass(frozen=True)
class PerturbSpec:
    """One perturbation request; seed pins every randomized choice."""

    kind: str
    iterations: int = 1
    fragments: int = 2
    fraction: float = 1.0
    gap: int = 1
    ghost_count: int = 3
    ghost_radius: int = 6
    keep_fraction: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in PERTURB_KINDS:
            raise ValueError(f"kind must be one of {PERTURB_KINDS}, got {self.kind!r}")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if not 1 <= self.fragments <= 5:
            raise ValueError("fragments must be in 1..5")
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError("fraction must be in [0, 1]")
        if self.gap not in (0, 1):
            raise ValueError("gap must be 0 or 1 pixels")
        if self.ghost_count < 0 or self.ghost_radius < 1:
            raise ValueError("ghost_count must be >= 0 and ghost_radius >= 1")
        if not 0.0 <= self.keep_fraction <= 1.0:
            raise ValueError("keep_fraction must be in [0, 1]")


def make_disk_grid(spec: DiskGridSpec = DiskGridSpec()) -> LabelGrid:
    """Disks with ids 1..rows*cols in row-major placement order.

    A disk holds the pixels whose squared distance from its center is at most
    radius**2; all instances have identical area by translation.
    """
    height = spec.rows * spec.spacing + 1
    width = spec.cols * spec.spacing + 1
    labels = np.zeros((height, width), dtype=np.uint32)
    offset = (spec.spacing + 1) // 2
    yy, xx = np.ogrid[-spec.radius : spec.radius + 1, -spec.radius : spec.radius + 1]
    disk = (yy * yy + xx * xx) <= spec.radius * spec.radius
    next_id = 1
    for r in range(spec.rows):
        for c in range(spec.cols):
            cy = r * spec.spacing + offset
            cx = c * spec.spacing + offset
            block = labels[
                cy - spec.radius : cy + spec.radius + 1,
                cx - spec.radius : cx + spec.radius + 1,
            ]
            block[disk] = next_id
            next_id += 1
    return LabelGrid(labels)


def morph_instances(grid: LabelGrid, kind: str, iterations: int) -> LabelGrid:
    """Per-instance erosion or dilation, `iterations` applications of the cross.

    Erosion drops any pixel with a 4-neighbour outside its instance (image
    borders count as outside); instances may vanish entirely. Dilation grows
    into background only, and when two instances reach the same pixel in one
    step the smaller id wins, so masks stay disjoint.
    """
    if kind not in ("erode", "dilate"):
        raise ValueError(f"kind must be 'erode' or 'dilate', got {kind!r}")
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    out = grid.labels
    step = erode_once if kind == "erode" else dilate_once
    for _ in range(iterations):
        out = step(out)
    return LabelGrid(out) if iterations else grid


def _round_half_away(x: float) -> int:
    return int(np.floor(x + 0.5)) if x >= 0 else -int(np.floor(-x + 0.5))


def split_instances(
    grid: LabelGrid,
    fragments: int,
    fraction: float,
    gap: int = 1,
    seed: int = 0,
) -> tuple[LabelGrid, list[str]]:
    """Cut a seeded selection of instances into vertical-strip fragments.

    round-half-away(fraction * N) instances, chosen by a seeded shuffle of the
    id order, are cut by equally spaced vertical lines across their bounding
    boxes. gap=1 blanks the one-pixel column at each cut; gap=0 keeps every
    pixel so the fragments partition the instance. Fragments get fresh ids
    (allocated in ascending parent id, then left to right); instances narrower
    than the fragment count are left alone and reported in the notes list.
    """
    if fragments < 1:
        raise ValueError("fragments must be >= 1")
    if not 0.0 <= fraction <= 1.0:
        raise ValueError("fraction must be in [0, 1]")
    if gap not in (0, 1):
        raise ValueError("gap must be 0 or 1")
    ids = sorted(int(i) for i in np.unique(grid.labels) if i != 0)
    if fragments == 1 or fraction == 0.0 or not ids:
        return grid, []

    n_split = min(len(ids), _round_half_away(fraction * len(ids)))
    rng = np.random.default_rng(seed)
    chosen = sorted(int(i) for i in rng.permutation(np.array(ids, dtype=np.int64))[:n_split])

    labels = grid.labels.copy()
    next_id = (max(ids) if ids else 0) + 1
    notes: list[str] = []
    for inst in chosen:
        mask = grid.labels == inst
        cols = np.flatnonzero(mask.any(axis=0))
        c0, c1 = int(cols[0]), int(cols[-1])
        width = c1 - c0 + 1
        if fragments > width:
            notes.append(
                f"instance {inst} left unsplit: {fragments} fragments exceed width {width}"
            )
            continue
        # strip k covers bounding-box columns [w*k/f, w*(k+1)/f)
        bounds = [c0 + (width * k) // fragments for k in range(fragments + 1)]
        for k in range(fragments):
            lo, hi = bounds[k], bounds[k + 1]
            if gap == 1 and k > 0:
                lo += 1
            if lo >= hi:
                continue
            piece = mask.copy()
            piece[:, : lo] = False
            piece[:, hi:] = False
            if not piece.any():
                continue
            labels[piece] = next_id
            next_id += 1
        if gap == 1:
            for k in range(1, fragments):
                cut = mask.copy()
                cut[:, : bounds[k]] = False
                cut[:, bounds[k] + 1 :] = False
                labels[cut] = 0
    return LabelGrid(labels), notes


def add_ghosts(grid: LabelGrid, count: int, radius: int, seed: int = 0) -> LabelGrid:
    """Place `count` disks of the given radius entirely in background.

    Fresh ids continue after the current maximum. Each ghost gets up to 1000
    seeded placement attempts before PlacementError.
    """
    if count < 0:
        raise ValueError("count must be >= 0")
    if radius < 1:
        raise ValueError("radius must be >= 1")
    if count == 0:
        return grid
    h, w = grid.labels.shape
    if h < 2 * radius + 1 or w < 2 * radius + 1:
        raise PlacementError(f"grid {h}x{w} cannot hold a radius-{radius} ghost")
    labels = grid.labels.copy()
    yy, xx = np.ogrid[-radius : radius + 1, -radius : radius + 1]
    disk = (yy * yy + xx * xx) <= radius * radius
    rng = np.random.default_rng(seed)
    next_id = int(labels.max()) + 1
    for _ in range(count):
        for attempt in range(1000):
            cy = int(rng.integers(radius, h - radius))
            cx = int(rng.integers(radius, w - radius))
            window = labels[cy - radius : cy + radius + 1, cx - radius : cx + radius + 1]
            if not window[disk].any():
                window[disk] = next_id
                next_id += 1
                break
        else:
            raise PlacementError(
                f"no background room for ghost {next_id} after 1000 attempts"
            )
    return LabelGrid(labels)


def partial_mask(grid: LabelGrid, keep_fraction: float, seed: int = 0) -> LabelGrid:
    """Keep only the ceil(keep_fraction * area) pixels nearest each centroid.

    Ties in squared distance fall back to row-major order, so the result is
    fully deterministic; the seed parameter exists for interface symmetry with
    the other generators and is unused.
    """
    if not 0.0 <= keep_fraction <= 1.0:
        raise ValueError("keep_fraction must be in [0, 1]")
    if keep_fraction == 1.0:
        return grid
    labels = np.zeros_like(grid.labels)
    for inst in (int(i) for i in np.unique(grid.labels) if i != 0):
        ys, xs = np.nonzero(grid.labels == inst)
        area = ys.size
        keep = int(np.ceil(keep_fraction * area))
        if keep == 0:
            continue
        cy = ys.mean()
        cx = xs.mean()
        d2 = (ys - cy) ** 2 + (xs - cx) ** 2
        order = np.lexsort((xs, ys, d2))[:keep]
        labels[ys[order], xs[order]] = inst
    return LabelGrid(labels)


def apply_perturbation(grid: LabelGrid, spec: PerturbSpec) -> tuple[LabelGrid, list[str]]:
    """Dispatch one PerturbSpec; returns (grid, notes)."""
    if spec.kind in ("erode", "dilate"):
        return morph_instances(grid, spec.kind, spec.iterations), []
    if spec.kind == "split":
        return split_instances(grid, spec.fragments, spec.fraction, spec.gap, spec.seed)
    if spec.kind == "ghost":
        return add_ghosts(grid, spec.ghost_count, spec.ghost_radius, spec.seed), []
    return partial_mask(grid, spec.keep_fraction, spec.seed), []
