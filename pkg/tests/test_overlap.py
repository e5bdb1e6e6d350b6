from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from softpq import LabelGrid, ShapeMismatchError, iou_pairs, joint_histogram, pixel_binary_scores

from oracles import naive_iou, naive_pair_counts

small_grids = arrays(
    dtype=np.uint32,
    shape=st.tuples(st.integers(1, 16), st.integers(1, 16)),
    elements=st.integers(0, 5),
)


def test_identity_grids_pair_only_with_themselves():
    arr = np.array([[1, 1, 2], [1, 2, 2], [0, 0, 0]], dtype=np.uint32)
    g = LabelGrid(arr)
    m = joint_histogram(g, g)
    assert m.pairs == {(1, 1): 3, (2, 2): 3}
    assert m.gt_areas == {1: 3, 2: 3}
    assert m.pred_areas == {1: 3, 2: 3}


def test_empty_prediction_has_no_pairs():
    gt = LabelGrid(np.array([[1, 2]], dtype=np.uint32))
    pred = LabelGrid(np.zeros((1, 2), dtype=np.uint32))
    m = joint_histogram(gt, pred)
    assert m.pairs == {}
    assert m.gt_areas == {1: 1, 2: 1}
    assert m.pred_areas == {}


def test_dimension_mismatch_names_both_shapes():
    a = LabelGrid(np.zeros((2, 3), dtype=np.uint32))
    b = LabelGrid(np.zeros((3, 2), dtype=np.uint32))
    with pytest.raises(ShapeMismatchError, match=r"2x3.*3x2"):
        joint_histogram(a, b)


def test_matches_naive_oracle_on_random_grids():
    rng = np.random.default_rng(11)
    for _ in range(50):
        gt = rng.integers(0, 9, (32, 32)).astype(np.uint32)
        pred = rng.integers(0, 9, (32, 32)).astype(np.uint32)
        m = joint_histogram(LabelGrid(gt), LabelGrid(pred))
        assert m.pairs == naive_pair_counts(gt, pred)


@given(small_grids, small_grids)
@settings(max_examples=60, deadline=None)
def test_histogram_invariants(gt_arr, pred_arr):
    h = min(gt_arr.shape[0], pred_arr.shape[0])
    w = min(gt_arr.shape[1], pred_arr.shape[1])
    gt = LabelGrid(gt_arr[:h, :w])
    pred = LabelGrid(pred_arr[:h, :w])
    m = joint_histogram(gt, pred)
    assert all(c >= 1 for c in m.pairs.values())
    for (g, p), c in m.pairs.items():
        assert c <= min(m.gt_areas[g], m.pred_areas[p])
    for g in m.gt_areas:
        assert sum(c for (gg, _), c in m.pairs.items() if gg == g) <= m.gt_areas[g]


def test_iou_values():
    # identical 16-px squares
    sq = np.zeros((6, 6), dtype=np.uint32)
    sq[1:5, 1:5] = 1
    g = LabelGrid(sq)
    assert iou_pairs(joint_histogram(g, g)).entries == {(1, 1): 1.0}

    # 7-px fragment inside a 16-px square
    frag = np.zeros((6, 6), dtype=np.uint32)
    frag[1:5, 1:3] = 1
    frag[1, 1] = 0
    entries = iou_pairs(joint_histogram(g, LabelGrid(frag))).entries
    assert entries == {(1, 1): 7 / 16}
    assert entries[(1, 1)] == 0.4375

    # disjoint labels produce no entry
    off = np.zeros((6, 6), dtype=np.uint32)
    off[5, 5] = 1
    assert iou_pairs(joint_histogram(g, LabelGrid(off))).entries == {}


@given(small_grids, small_grids)
@settings(max_examples=60, deadline=None)
def test_iou_row_and_column_sums_bounded(gt_arr, pred_arr):
    h = min(gt_arr.shape[0], pred_arr.shape[0])
    w = min(gt_arr.shape[1], pred_arr.shape[1])
    gt = LabelGrid(gt_arr[:h, :w])
    pred = LabelGrid(pred_arr[:h, :w])
    entries = iou_pairs(joint_histogram(gt, pred)).entries
    assert entries == pytest.approx(naive_iou(gt.labels, pred.labels), abs=0)
    by_g: dict[int, float] = {}
    by_p: dict[int, float] = {}
    for (g, p), v in entries.items():
        assert 0.0 < v <= 1.0
        by_g[g] = by_g.get(g, 0.0) + v
        by_p[p] = by_p.get(p, 0.0) + v
    assert all(s <= 1 + 1e-12 for s in by_g.values())
    assert all(s <= 1 + 1e-12 for s in by_p.values())


def test_pixel_scores_fixture(fixture_pair):
    gt, pred = fixture_pair
    piou, dice = pixel_binary_scores(gt, pred)
    assert piou == 14 / 16
    assert dice == pytest.approx(28 / 30, abs=1e-15)


def test_pixel_scores_edge_cases():
    a = LabelGrid(np.zeros((3, 3), dtype=np.uint32))
    assert pixel_binary_scores(a, a) == (1.0, 1.0)
    b = LabelGrid(np.ones((3, 3), dtype=np.uint32))
    assert pixel_binary_scores(a, b) == (0.0, 0.0)
    assert pixel_binary_scores(b, b) == (1.0, 1.0)


@given(small_grids, small_grids)
@settings(max_examples=60, deadline=None)
def test_dice_iou_relation(gt_arr, pred_arr):
    h = min(gt_arr.shape[0], pred_arr.shape[0])
    w = min(gt_arr.shape[1], pred_arr.shape[1])
    piou, dice = pixel_binary_scores(LabelGrid(gt_arr[:h, :w]), LabelGrid(pred_arr[:h, :w]))
    assert dice >= piou
    assert math.isclose(dice, 2 * piou / (1 + piou), rel_tol=1e-12, abs_tol=1e-12)
