# cython: language_level=3
"""Native shim: buffer-protocol array intake, core delegation, no math.

Any object exporting a 2D unsigned-integer buffer (numpy arrays, memoryviews,
array wrappers from other frameworks) is acquired zero-copy through a typed
memoryview; everything else goes through numpy conversion, copied as needed.
The heavy pixel passes run inside the softpq core, whose compiled kernels
drop the interpreter lock while they work.
"""

from pathlib import Path

import numpy as np

import softpq

from libc.stdint cimport uint32_t

BACKEND_NAME = "cython"


cdef object _as_grid(object obj):
    cdef const uint32_t[:, :] view
    try:
        view = obj  # zero-copy buffer acquisition for uint32 2D sources
        return softpq.LabelGrid(np.asarray(view))
    except (ValueError, TypeError):
        pass
    return softpq.LabelGrid(np.asarray(obj))


def py_evaluate(gt, pred, double lower=0.05, double upper=0.5,
                str penalty="sqrt", str mode="over"):
    """Score one in-memory array pair; keys {softpq, pq, sq, rq_f1, map, pixel_iou, dice}.

    Accepts any 2D non-negative-integer array-likes of equal shape. Keyword
    names mirror the CLI flags. Raises with the core error message on shape
    mismatch or invalid thresholds.
    """
    config = softpq.SoftPQConfig(lower=lower, upper=upper, penalty=penalty, mode=mode)
    return softpq.evaluate_all(_as_grid(gt), _as_grid(pred), config).as_dict()


def py_batch(pairs, double lower=0.05, double upper=0.5,
             str penalty="sqrt", str mode="over"):
    """Score (gt_path, pred_path) pairs; per-pair errors are reported in-result.

    Each result carries the gt file's name plus either the score mapping or
    an 'error' entry; the batch always continues. With pairs listed in
    filename order the output matches the CLI's directory mode.
    """
    config = softpq.SoftPQConfig(lower=lower, upper=upper, penalty=penalty, mode=mode)
    results = []
    for gt_path, pred_path in pairs:
        name = Path(gt_path).name
        try:
            grids = []
            for path in (gt_path, pred_path):
                data = Path(path).read_bytes()
                fmt = "pgm" if data[:2] == b"P5" else "ascii"
                grids.append(softpq.read_label_image(data, fmt))
            report = softpq.evaluate_all(grids[0], grids[1], config)
            results.append({"name": name, **report.as_dict()})
        except Exception as exc:
            results.append({"name": name, "error": str(exc)})
    return results
