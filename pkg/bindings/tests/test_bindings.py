from __future__ import annotations

import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

import softpq
from softpq_bindings import py_batch, py_evaluate, shim_backend

SCORE_KEYS = ("softpq", "pq", "sq", "rq_f1", "map", "pixel_iou", "dice")
FIXTURE_SOFTPQ = 0.875 / math.sqrt(3)


def fixture_arrays() -> tuple[np.ndarray, np.ndarray]:
    gt = np.zeros((8, 8), dtype=np.uint32)
    gt[2:6, 2:6] = 1
    pred = np.zeros((8, 8), dtype=np.uint32)
    pred[2:6, 2:4] = 1
    pred[2, 2] = 0
    pred[2:6, 4:6] = 2
    pred[2, 5] = 0
    return gt, pred


def random_pair(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    h = int(rng.integers(2, 28))
    w = int(rng.integers(2, 28))
    if rng.random() < 0.5:
        gt = rng.integers(0, 7, (h, w)).astype(np.uint32)
        pred = rng.integers(0, 7, (h, w)).astype(np.uint32)
    else:
        gt = np.zeros((h, w), dtype=np.uint32)
        pred = np.zeros((h, w), dtype=np.uint32)
        for idx in range(1, int(rng.integers(1, 5))):
            r0, c0 = int(rng.integers(0, h)), int(rng.integers(0, w))
            r1, c1 = int(rng.integers(r0, h)) + 1, int(rng.integers(c0, w)) + 1
            gt[r0:r1, c0:c1] = idx
            if rng.random() < 0.8:
                pred[r0:r1, c0:c1] = idx
        flips = rng.random((h, w)) < 0.1
        pred[flips] = rng.integers(0, 7, int(flips.sum()))
    return gt, pred


def run_cmd_eval(gt_dir: Path, pred_dir: Path) -> dict:
    proc = subprocess.run(
        [sys.executable, "-m", "softpq.cli", "eval", str(gt_dir), str(pred_dir)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)


# ---------------------------------------------------------------------------
# py_evaluate


def test_identical_arrays_score_one():
    gt, _ = fixture_arrays()
    scores = py_evaluate(gt, gt)
    assert set(scores) == set(SCORE_KEYS)
    assert all(v == 1.0 for v in scores.values())


def test_fixture_value():
    gt, pred = fixture_arrays()
    scores = py_evaluate(gt, pred)
    assert scores["softpq"] == pytest.approx(FIXTURE_SOFTPQ, abs=1e-9)
    assert scores["pq"] == 0.0


def test_reduction_kwargs():
    gt, pred = fixture_arrays()
    scores = py_evaluate(gt, pred, lower=0.5, upper=0.5)
    assert scores["softpq"] == scores["pq"]


def test_plain_lists_accepted():
    scores = py_evaluate([[0, 1], [1, 0]], [[0, 1], [1, 0]])
    assert scores["softpq"] == 1.0


def test_non_numpy_buffer_accepted():
    gt, pred = fixture_arrays()
    scores = py_evaluate(memoryview(gt), memoryview(pred))
    assert scores["softpq"] == pytest.approx(FIXTURE_SOFTPQ, abs=1e-9)


def test_caller_array_stays_writable():
    gt, pred = fixture_arrays()
    py_evaluate(gt, pred)
    assert gt.flags.writeable
    gt[0, 0] = 3  # must not raise


def test_shape_mismatch_uses_core_message():
    with pytest.raises(ValueError, match="dimensions"):
        py_evaluate(np.zeros((2, 2), np.uint32), np.zeros((2, 3), np.uint32))


def test_invalid_thresholds_use_core_message():
    gt, _ = fixture_arrays()
    with pytest.raises(ValueError, match="upper"):
        py_evaluate(gt, gt, lower=0.9, upper=0.5)


def test_matches_direct_library_call():
    rng = np.random.default_rng(3)
    for _ in range(20):
        gt, pred = random_pair(rng)
        want = softpq.evaluate_all(softpq.LabelGrid(gt), softpq.LabelGrid(pred)).as_dict()
        assert py_evaluate(gt, pred) == want


# ---------------------------------------------------------------------------
# py_batch


def test_batch_empty():
    assert py_batch([]) == []


def test_batch_single_identical_pair(tmp_path):
    gt, _ = fixture_arrays()
    path = tmp_path / "a.pgm"
    path.write_bytes(softpq.write_label_image(softpq.LabelGrid(gt), "pgm"))
    (result,) = py_batch([(path, path)])
    assert result["name"] == "a.pgm"
    assert all(result[k] == 1.0 for k in SCORE_KEYS)


def test_batch_error_reported_in_result(tmp_path):
    gt, _ = fixture_arrays()
    good = tmp_path / "good.pgm"
    good.write_bytes(softpq.write_label_image(softpq.LabelGrid(gt), "pgm"))
    results = py_batch([(tmp_path / "missing.pgm", good), (good, good)])
    assert "error" in results[0]
    assert results[1]["softpq"] == 1.0  # the batch continued


# ---------------------------------------------------------------------------
# parity with the CLI (the external-interface check)


def test_fixture_matches_cmd_eval_json(tmp_path):
    gt, pred = fixture_arrays()
    gt_dir = tmp_path / "gt"
    pred_dir = tmp_path / "pred"
    gt_dir.mkdir()
    pred_dir.mkdir()
    (gt_dir / "fix.pgm").write_bytes(softpq.write_label_image(softpq.LabelGrid(gt), "pgm"))
    (pred_dir / "fix.pgm").write_bytes(softpq.write_label_image(softpq.LabelGrid(pred), "pgm"))
    report = run_cmd_eval(gt_dir, pred_dir)
    cli_scores = report["images"][0]
    mine = py_evaluate(gt, pred)
    for key in SCORE_KEYS:
        assert abs(mine[key] - cli_scores[key]) <= 1e-12


def test_fifty_fuzzed_pairs_match_cmd_eval_json(tmp_path):
    rng = np.random.default_rng(1234)
    gt_dir = tmp_path / "gt"
    pred_dir = tmp_path / "pred"
    gt_dir.mkdir()
    pred_dir.mkdir()
    arrays = {}
    for i in range(50):
        gt, pred = random_pair(rng)
        name = f"case{i:03d}.pgm"
        (gt_dir / name).write_bytes(softpq.write_label_image(softpq.LabelGrid(gt), "pgm"))
        (pred_dir / name).write_bytes(softpq.write_label_image(softpq.LabelGrid(pred), "pgm"))
        arrays[name] = (gt, pred)

    report = run_cmd_eval(gt_dir, pred_dir)
    assert len(report["images"]) == 50
    for entry in report["images"]:
        gt, pred = arrays[entry["name"]]
        mine = py_evaluate(gt, pred)
        for key in SCORE_KEYS:
            assert abs(mine[key] - entry[key]) <= 1e-12, (entry["name"], key)

    # py_batch over the same files, in filename order, matches entry for entry
    pairs = [(gt_dir / e["name"], pred_dir / e["name"]) for e in report["images"]]
    batched = py_batch(pairs)
    for got, entry in zip(batched, report["images"]):
        assert got["name"] == entry["name"]
        for key in SCORE_KEYS:
            assert abs(got[key] - entry[key]) <= 1e-12


def test_backend_is_reported():
    assert shim_backend() in ("cython", "python")
