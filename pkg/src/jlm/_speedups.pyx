# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sweep kernels. Same arithmetic, in the same order, as ``_fallback``."""

import numpy as np
from libc.math cimport NAN


def multiplier_sweep(const double[::1] first_row, const double[:, ::1] f1,
                     const double[:, ::1] f2, const double[::1] hx,
                     const double[::1] hy, Py_ssize_t nrows):
    cdef Py_ssize_t K = first_row.shape[0]
    cdef Py_ssize_t i, j, w
    cdef double a, b, t1, t2
    out_arr = np.full((nrows, K), np.nan)
    cdef double[:, ::1] out = out_arr
    for i in range(K):
        out[0, i] = first_row[i]
    for j in range(nrows - 1):
        w = K - 1 - j
        for i in range(w):
            a = f1[j, i] / hx[i]
            b = f2[j, i] / hy[j]
            t1 = out[j, i] * (a + b)
            t2 = out[j, i + 1] * f1[j, i + 1] / hx[i]
            out[j + 1, i] = (hy[j] / f2[j + 1, i]) * (t1 - t2)
    return out_arr


def solution_sweep(const double[::1] first_row, const double[:, ::1] f1,
                   const double[:, ::1] f2, const double[::1] hx,
                   const double[::1] hy, Py_ssize_t nrows):
    cdef Py_ssize_t K = first_row.shape[0]
    cdef Py_ssize_t i, j, w
    cdef double ratio
    out_arr = np.full((nrows, K), np.nan)
    cdef double[:, ::1] out = out_arr
    for i in range(K):
        out[0, i] = first_row[i]
    for j in range(nrows - 1):
        w = K - 1 - j
        for i in range(w):
            ratio = f1[j, i] / f2[j, i]
            out[j + 1, i] = out[j, i] - ratio * (hy[j] / hx[i]) * (out[j, i + 1] - out[j, i])
    return out_arr


def path_integrate(const double[:, ::1] gx, const double[:, ::1] gy,
                   const double[::1] hx, const double[::1] hy,
                   const long[::1] lo, const long[::1] hi, double u00,
                   bint column_first):
    cdef Py_ssize_t R = gx.shape[0], C = gx.shape[1]
    cdef Py_ssize_t i, j
    cdef Py_ssize_t l0 = lo[0]
    out_arr = np.full((R, C), np.nan)
    cdef double[:, ::1] out = out_arr
    out[0, l0] = u00
    if not column_first:
        for i in range(l0, hi[0]):
            out[0, i + 1] = out[0, i] + hx[i] * gx[0, i]
        for j in range(1, R):
            for i in range(lo[j], hi[j] + 1):
                out[j, i] = out[j - 1, i] + hy[j - 1] * gy[j - 1, i]
    else:
        for j in range(1, R):
            out[j, l0] = out[j - 1, l0] + hy[j - 1] * gy[j - 1, l0]
        for j in range(R):
            for i in range(l0, hi[j]):
                out[j, i + 1] = out[j, i] + hx[i] * gx[j, i]
    return out_arr


def digamma(const double[::1] x, const double[::1] coeffs, double threshold):
    cdef Py_ssize_t N = x.shape[0], K = coeffs.shape[0]
    cdef Py_ssize_t i, k
    cdef double t, acc, inv, z, series
    shifted_arr = np.empty(N)
    half_arr = np.empty(N)
    series_arr = np.empty(N)
    acc_arr = np.empty(N)
    cdef double[::1] shifted = shifted_arr, half = half_arr, ser = series_arr, accs = acc_arr
    for i in range(N):
        t = x[i]
        acc = 0.0
        while t < threshold:
            acc = acc + 1.0 / t
            t = t + 1.0
        inv = 1.0 / t
        z = inv * inv
        series = 0.0
        for k in range(K - 1, -1, -1):
            series = coeffs[k] + z * series
        shifted[i] = t
        half[i] = 0.5 * inv
        ser[i] = z * series
        accs[i] = acc
    # NumPy's log, not libm's: the two differ in the last bit for some inputs
    return np.log(shifted_arr) - half_arr - series_arr - acc_arr
