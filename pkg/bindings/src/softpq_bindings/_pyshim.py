"""Pure-Python shim: the reference behaviour the native module must match.

No math lives here; every number comes from the softpq core.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

import softpq

BACKEND_NAME = "python"


def _as_grid(obj) -> softpq.LabelGrid:
    arr = np.asarray(obj)  # zero-copy for compatible arrays, copied otherwise
    return softpq.LabelGrid(arr)


def py_evaluate(gt, pred, lower=0.05, upper=0.5, penalty="sqrt", mode="over"):
    """Score one in-memory array pair; keys {softpq, pq, sq, rq_f1, map, pixel_iou, dice}.

    Accepts any 2D non-negative-integer array-likes of equal shape. Keyword
    names mirror the CLI flags. Raises with the core error message on shape
    mismatch or invalid thresholds.
    """
    config = softpq.SoftPQConfig(lower=lower, upper=upper, penalty=penalty, mode=mode)
    return softpq.evaluate_all(_as_grid(gt), _as_grid(pred), config).as_dict()


def py_batch(pairs, lower=0.05, upper=0.5, penalty="sqrt", mode="over"):
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
                grids.append(softpq.read_label_image(data, _sniff(data)))
            report = softpq.evaluate_all(grids[0], grids[1], config)
            results.append({"name": name, **report.as_dict()})
        except Exception as exc:
            results.append({"name": name, "error": str(exc)})
    return results


def _sniff(data: bytes) -> str:
    return "pgm" if data[:2] == b"P5" else "ascii"
