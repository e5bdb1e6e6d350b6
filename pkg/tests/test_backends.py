"""Parity between the compiled kernels and the numpy fallback.

The compiled extension is optional; these tests skip when it is absent so the
suite stays green on a pure-Python install.
"""

from __future__ import annotations

import numpy as np
import pytest

from softpq._kernels import _py, available_backends, kernel_backend

_core = available_backends().get("cython")
needs_core = pytest.mark.skipif(_core is None, reason="compiled kernels not built")


def test_active_backend_is_reported():
    assert kernel_backend() in ("cython", "numpy")


@needs_core
def test_pair_counts_bit_identical():
    rng = np.random.default_rng(17)
    for _ in range(200):
        n = int(rng.integers(0, 2000))
        gt = rng.integers(0, 50, n).astype(np.uint32)
        pred = rng.integers(0, 50, n).astype(np.uint32)
        k1, c1 = _py.pair_counts(gt, pred)
        k2, c2 = _core.pair_counts(gt, pred)
        assert np.array_equal(k1, k2)
        assert np.array_equal(c1, c2)


@needs_core
def test_pair_counts_wide_ids():
    gt = np.array([0, 2**32 - 1, 2**32 - 1, 7], dtype=np.uint32)
    pred = np.array([5, 2**32 - 1, 0, 7], dtype=np.uint32)
    k1, c1 = _py.pair_counts(gt, pred)
    k2, c2 = _core.pair_counts(gt, pred)
    assert np.array_equal(k1, k2)
    assert np.array_equal(c1, c2)


@needs_core
def test_morphology_bit_identical():
    rng = np.random.default_rng(23)
    for _ in range(150):
        h = int(rng.integers(1, 40))
        w = int(rng.integers(1, 40))
        arr = rng.integers(0, 6, (h, w)).astype(np.uint32)
        assert np.array_equal(_py.erode_once(arr), _core.erode_once(arr))
        assert np.array_equal(_py.dilate_once(arr), _core.dilate_once(arr))


@needs_core
def test_morphology_single_row_and_column():
    for arr in (np.array([[1, 1, 1]], dtype=np.uint32),
                np.array([[1], [1], [1]], dtype=np.uint32),
                np.array([[4]], dtype=np.uint32)):
        assert np.array_equal(_py.erode_once(arr), _core.erode_once(arr))
        assert np.array_equal(_py.dilate_once(arr), _core.dilate_once(arr))


def test_benchmark_smoke():
    from softpq.bench import run_benchmark

    table = run_benchmark(size=64, repeats=1)
    assert "pair_counts" in table
    assert "numpy" in table


def test_forced_python_backend_matches_scores(fixture_pair, monkeypatch):
    """Spawn a fresh interpreter with SOFTPQ_BACKEND=python and diff a score."""
    import json
    import subprocess
    import sys

    gt, pred = fixture_pair
    code = (
        "import json, numpy as np, softpq\n"
        "gt = np.array(%s, dtype=np.uint32)\n"
        "pred = np.array(%s, dtype=np.uint32)\n"
        "rep = softpq.evaluate_all(softpq.LabelGrid(gt), softpq.LabelGrid(pred))\n"
        "print(json.dumps({'backend': softpq.kernel_backend(), **rep.as_dict()}))\n"
    ) % (gt.labels.tolist(), pred.labels.tolist())
    out = {}
    for backend in ("python", "auto"):
        env = {"SOFTPQ_BACKEND": backend, "PATH": "/usr/bin:/bin"}
        proc = subprocess.run([sys.executable, "-c", code], capture_output=True,
                              text=True, env=env)
        assert proc.returncode == 0, proc.stderr
        out[backend] = json.loads(proc.stdout)
    assert out["python"].pop("backend") == "numpy"
    out["auto"].pop("backend")
    assert out["python"] == out["auto"]
