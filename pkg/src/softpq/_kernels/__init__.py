"""Kernel backend selection.

The compiled Cython backend is preferred when importable; the numpy fallback
is always available and bit-identical. Set SOFTPQ_BACKEND=python (or =cython)
to force a choice; forcing cython raises if the extension is not built.
"""

from __future__ import annotations

import os

from . import _py

_requested = os.environ.get("SOFTPQ_BACKEND", "auto").strip().lower()

if _requested in ("auto", "", "cython", "c", "compiled"):
    try:
        from . import _core as _impl
    except ImportError:
        if _requested in ("cython", "c", "compiled"):
            raise ImportError(
                "SOFTPQ_BACKEND requested the compiled backend but "
                "softpq._kernels._core is not built"
            )
        _impl = _py
elif _requested in ("python", "numpy", "py"):
    _impl = _py
else:
    raise ValueError(f"unknown SOFTPQ_BACKEND value: {_requested!r}")

pair_counts = _impl.pair_counts
erode_once = _impl.erode_once
dilate_once = _impl.dilate_once


def kernel_backend() -> str:
    """Name of the active kernel backend: 'cython' or 'numpy'."""
    return _impl.BACKEND_NAME


def available_backends() -> dict[str, object]:
    """Importable backend modules keyed by name (for benchmarks/tests)."""
    found = {"numpy": _py}
    try:
        from . import _core
        found["cython"] = _core
    except ImportError:
        pass
    return found
