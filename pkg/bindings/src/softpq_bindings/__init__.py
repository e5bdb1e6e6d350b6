"""Array-in, scores-out bindings over the softpq metrics core.

Two functions, keyword names mirroring the CLI flags:

* ``py_evaluate(gt, pred, lower, upper, penalty, mode)`` scores one pair of
  in-memory 2D integer arrays.
* ``py_batch(pairs, ...)`` scores a list of (gt_path, pred_path) files,
  reporting per-pair failures in the result instead of aborting the batch.

The native shim is preferred when built (zero-copy buffer intake); the
pure-Python fallback is behaviourally identical. No math happens here --
every value is produced by the core library.
"""

import softpq as _core

try:
    from . import _shim as _impl
except ImportError:
    from . import _pyshim as _impl

__version__ = "0.1.0"

if _core.__version__ != __version__:  # version pinned to the core
    raise ImportError(
        f"softpq-bindings {__version__} requires softpq {__version__}, "
        f"found {_core.__version__}"
    )

py_evaluate = _impl.py_evaluate
py_batch = _impl.py_batch


def shim_backend() -> str:
    """Which shim is active: 'cython' (native) or 'python' (fallback)."""
    return _impl.BACKEND_NAME


__all__ = ["py_evaluate", "py_batch", "shim_backend", "__version__"]
