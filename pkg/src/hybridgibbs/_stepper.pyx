# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loop for Markov-chain trajectory stepping.

Given the row-wise cumulative transition matrix and a pre-drawn stream of
uniforms, each step finds the smallest column j with cum[state, j] > u by
binary search (clamped to the last column).  Must stay bit-identical to the
pure-Python fallback in ``_stepper_py``.
"""

import numpy as np


def walk(double[:, ::1] cumulative, double[::1] uniforms, Py_ssize_t start):
    cdef Py_ssize_t m = cumulative.shape[1]
    cdef Py_ssize_t steps = uniforms.shape[0]
    out_arr = np.empty(steps + 1, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t state = start
    cdef Py_ssize_t t, lo, hi, mid
    cdef double u
    out[0] = state
    for t in range(steps):
        u = uniforms[t]
        lo = 0
        hi = m - 1
        while lo < hi:
            mid = (lo + hi) >> 1
            if cumulative[state, mid] > u:
                hi = mid
            else:
                lo = mid + 1
        state = lo
        out[t + 1] = state
    return out_arr
