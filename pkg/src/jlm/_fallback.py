"""Pure-NumPy versions of the sweep kernels.

Each function mirrors ``_speedups.pyx`` operation for operation, so both
backends give bitwise-identical sweeps. Cells are vectorized within a row;
rows are sequential.
"""

import numpy as np


def multiplier_sweep(first_row, f1, f2, hx, hy, nrows):
    K = first_row.shape[0]
    out = np.full((nrows, K), np.nan)
    out[0] = first_row
    for j in range(nrows - 1):
        w = K - 1 - j
        cur = out[j]
        a = f1[j, :w] / hx[:w]
        b = f2[j, :w] / hy[j]
        t1 = cur[:w] * (a + b)
        t2 = cur[1 : w + 1] * f1[j, 1 : w + 1] / hx[:w]
        out[j + 1, :w] = (hy[j] / f2[j + 1, :w]) * (t1 - t2)
    return out


def solution_sweep(first_row, f1, f2, hx, hy, nrows):
    K = first_row.shape[0]
    out = np.full((nrows, K), np.nan)
    out[0] = first_row
    for j in range(nrows - 1):
        w = K - 1 - j
        cur = out[j]
        ratio = f1[j, :w] / f2[j, :w]
        out[j + 1, :w] = cur[:w] - ratio * (hy[j] / hx[:w]) * (cur[1 : w + 1] - cur[:w])
    return out


def path_integrate(gx, gy, hx, hy, lo, hi, u00, column_first):
    R, C = gx.shape
    out = np.full((R, C), np.nan)
    l0 = lo[0]

    def run_row(j, start):
        # np.add.accumulate sums strictly left to right, like the C loop
        steps = hx[l0 : hi[j]] * gx[j, l0 : hi[j]]
        out[j, l0 : hi[j] + 1] = np.add.accumulate(np.concatenate(([start], steps)))

    if not column_first:
        run_row(0, u00)
        for j in range(1, R):
            s = slice(lo[j], hi[j] + 1)
            out[j, s] = out[j - 1, s] + hy[j - 1] * gy[j - 1, s]
    else:
        col = np.add.accumulate(np.concatenate(([u00], hy[: R - 1] * gy[: R - 1, l0])))
        for j in range(R):
            run_row(j, col[j])
    return out


def digamma(x, coeffs, threshold):
    x = np.array(x, dtype=np.float64)
    acc = np.zeros_like(x)
    small = x < threshold
    while np.any(small):
        acc[small] = acc[small] + 1.0 / x[small]
        x[small] = x[small] + 1.0
        small = x < threshold
    inv = 1.0 / x
    z = inv * inv
    series = np.zeros_like(x)
    for c in coeffs[::-1]:
        series = c + z * series
    series = z * series
    return np.log(x) - 0.5 * inv - series - acc
