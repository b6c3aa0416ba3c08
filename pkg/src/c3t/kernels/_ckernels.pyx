# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled implementations of the hot kernels.

Semantics match ``_numpy.py`` exactly; see that module for the table
conventions.  Loops are fused so repeated calls allocate nothing beyond the
output arrays.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()


def rho_sq_table(double[::1] r2, double[::1] w, double b, double[::1] deltas,
                 double[:, ::1] s2_t, double[:, ::1] sin_t):
    cdef Py_ssize_t m = r2.shape[0]
    cdef Py_ssize_t n_grid = deltas.shape[0]
    cdef Py_ssize_t i, j
    cdef double t2 = b * b
    for i in range(m):
        t2 += r2[i] * w[i] * w[i]

    out = np.empty(n_grid, dtype=np.float64)
    cdef double[::1] values = out
    cdef double bb = b * b
    cdef double t1, t3, prod, num, sin_sq, d
    cdef double min_sin_sq = INFINITY
    with nogil:
        for j in range(n_grid):
            t1 = 0.0
            t3 = 0.0
            for i in range(m):
                t1 += r2[i] * s2_t[i, j]
                t3 += r2[i] * w[i] * sin_t[i, j]
            t1 *= 4.0
            if bb != 0.0:
                d = deltas[j]
                t1 += bb * d * d
                t3 += bb * d
            prod = t1 * t2
            num = prod - t3 * t3
            sin_sq = num / prod
            if sin_sq < min_sin_sq:
                min_sin_sq = sin_sq
            values[j] = t1 * prod / (4.0 * num)
    return out, min_sin_sq


def rho_sq_scan(double[::1] r2, double[::1] w, double b, double[::1] deltas,
                double[:, ::1] s2_t, double[:, ::1] sin_t):
    cdef Py_ssize_t m = r2.shape[0]
    cdef Py_ssize_t n_grid = deltas.shape[0]
    cdef Py_ssize_t i, j, best_idx = 0
    cdef double t2 = b * b
    for i in range(m):
        t2 += r2[i] * w[i] * w[i]

    cdef double bb = b * b
    cdef double t1, t3, prod, num, sin_sq, val, d
    cdef double best_val = INFINITY
    cdef double min_sin_sq = INFINITY
    with nogil:
        for j in range(n_grid):
            t1 = 0.0
            t3 = 0.0
            for i in range(m):
                t1 += r2[i] * s2_t[i, j]
                t3 += r2[i] * w[i] * sin_t[i, j]
            t1 *= 4.0
            if bb != 0.0:
                d = deltas[j]
                t1 += bb * d * d
                t3 += bb * d
            prod = t1 * t2
            num = prod - t3 * t3
            sin_sq = num / prod
            if sin_sq < min_sin_sq:
                min_sin_sq = sin_sq
            val = t1 * prod / (4.0 * num)
            if val < best_val:  # strict: ties keep the smaller separation
                best_val = val
                best_idx = j
    return best_val, best_idx, min_sin_sq


def corr_argmax(double[:, ::1] yc, double[:, ::1] ys,
                double[:, ::1] cos_t, double[:, ::1] sin_t):
    cdef Py_ssize_t trials = yc.shape[0]
    cdef Py_ssize_t m = yc.shape[1]
    cdef Py_ssize_t n_grid = cos_t.shape[1]
    out = np.empty(trials, dtype=np.int64)
    cdef cnp.int64_t[::1] idx = out
    cdef Py_ssize_t t, j, i, best_j
    cdef double best, score
    with nogil:
        for t in range(trials):
            best = -INFINITY
            best_j = 0
            for j in range(n_grid):
                score = 0.0
                for i in range(m):
                    score += yc[t, i] * cos_t[i, j] + ys[t, i] * sin_t[i, j]
                if score > best:  # strict: ties keep the smaller grid index
                    best = score
                    best_j = j
            idx[t] = best_j
    return out
