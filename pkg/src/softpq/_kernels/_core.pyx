# cython: language_level=3
"""Compiled hot kernels: sparse pair histogram and per-instance morphology.

Outputs must stay bit-identical to softpq._kernels._py; the test suite
enforces parity whenever this module is importable.
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint32_t, uint64_t
from libcpp.unordered_map cimport unordered_map

cnp.import_array()

BACKEND_NAME = "cython"

cdef uint64_t SENTINEL = 0xFFFFFFFFFFFFFFFFULL


def pair_counts(gt, pred):
    """Count co-occurrences of (gt, pred) label pairs over aligned flat arrays.

    Returns (keys, counts) with key = gt_id << 32 | pred_id, keys ascending.
    """
    cdef const uint32_t[::1] g = gt
    cdef const uint32_t[::1] p = pred
    cdef Py_ssize_t n = g.shape[0]
    cdef Py_ssize_t i
    cdef unordered_map[uint64_t, int64_t] acc
    cdef uint64_t key

    with nogil:
        for i in range(n):
            key = (<uint64_t> g[i] << 32) | <uint64_t> p[i]
            acc[key] += 1

    cdef Py_ssize_t m = acc.size()
    keys = np.empty(m, dtype=np.uint64)
    counts = np.empty(m, dtype=np.int64)
    cdef uint64_t[::1] kv = keys
    cdef int64_t[::1] cv = counts
    cdef Py_ssize_t j = 0
    for item in acc:
        kv[j] = item.first
        cv[j] = item.second
        j += 1
    order = np.argsort(keys, kind="stable")
    return keys[order], counts[order]


def erode_once(labels):
    """One per-instance erosion step with the 3x3 cross element."""
    cdef const uint32_t[:, ::1] a = labels
    cdef Py_ssize_t h = a.shape[0]
    cdef Py_ssize_t w = a.shape[1]
    out_arr = np.zeros((h, w), dtype=np.uint32)
    cdef uint32_t[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef uint32_t v

    with nogil:
        for i in range(h):
            for j in range(w):
                v = a[i, j]
                if v == 0:
                    continue
                if i == 0 or i == h - 1 or j == 0 or j == w - 1:
                    continue  # image border neighbours are outside the instance
                if (a[i - 1, j] == v and a[i + 1, j] == v
                        and a[i, j - 1] == v and a[i, j + 1] == v):
                    out[i, j] = v
    return out_arr


def dilate_once(labels):
    """One per-instance dilation step; smaller id wins growth conflicts."""
    cdef const uint32_t[:, ::1] a = labels
    cdef Py_ssize_t h = a.shape[0]
    cdef Py_ssize_t w = a.shape[1]
    out_arr = np.empty((h, w), dtype=np.uint32)
    cdef uint32_t[:, ::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef uint64_t best
    cdef uint32_t v

    with nogil:
        for i in range(h):
            for j in range(w):
                v = a[i, j]
                if v != 0:
                    out[i, j] = v
                    continue
                best = SENTINEL
                if i > 0 and a[i - 1, j] != 0 and <uint64_t> a[i - 1, j] < best:
                    best = a[i - 1, j]
                if i < h - 1 and a[i + 1, j] != 0 and <uint64_t> a[i + 1, j] < best:
                    best = a[i + 1, j]
                if j > 0 and a[i, j - 1] != 0 and <uint64_t> a[i, j - 1] < best:
                    best = a[i, j - 1]
                if j < w - 1 and a[i, j + 1] != 0 and <uint64_t> a[i, j + 1] < best:
                    best = a[i, j + 1]
                out[i, j] = 0 if best == SENTINEL else <uint32_t> best
    return out_arr
