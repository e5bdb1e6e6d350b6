"""Micro-benchmark of the hot kernels across available backends.

Times the sparse pair histogram and one morphology step on a synthetic label
grid, for the numpy fallback and (when built) the compiled extension, and
reports the speedup. Wall-clock best-of-N to keep the numbers stable.
"""

from __future__ import annotations

import time

import numpy as np

from ._kernels import available_backends, kernel_backend


def _make_grid(size: int, n_labels: int = 64, seed: int = 1234) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.integers(0, n_labels, size=(size, size), dtype=np.uint32)


def _best_of(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_benchmark(size: int = 1024, repeats: int = 5) -> str:
    """Format a timing table; safe to run with only the fallback installed."""
    backends = available_backends()
    gt = _make_grid(size, seed=1)
    pred = _make_grid(size, seed=2)
    flat_gt, flat_pred = gt.ravel(), pred.ravel()

    kernels = {
        "pair_counts": lambda mod: mod.pair_counts(flat_gt, flat_pred),
        "erode_once": lambda mod: mod.erode_once(gt),
        "dilate_once": lambda mod: mod.dilate_once(gt),
    }
    timings: dict[str, dict[str, float]] = {k: {} for k in kernels}
    for name, mod in backends.items():
        for kernel, call in kernels.items():
            timings[kernel][name] = _best_of(lambda: call(mod), repeats)

    lines = [
        f"kernel benchmark: {size}x{size} grid, best of {repeats} (active backend: {kernel_backend()})",
        f"{'kernel':<14}" + "".join(f"{name + ' [ms]':>14}" for name in backends)
        + ("       speedup" if len(backends) > 1 else ""),
    ]
    for kernel, per_backend in timings.items():
        row = f"{kernel:<14}" + "".join(f"{per_backend[n] * 1e3:>14.3f}" for n in backends)
        if "cython" in per_backend and "numpy" in per_backend:
            row += f"{per_backend['numpy'] / per_backend['cython']:>13.2f}x"
        lines.append(row)
    return "\n".join(lines) + "\n"
