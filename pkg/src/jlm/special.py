"""Digamma function and the closed-form solution it yields for ``y_m x_{n+1} Δx u + x_n y_{m+1} Δy u = 0``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .grid import IndexDomain, OrthoLattice2D, ScalarField2D, build_uniform_lattice

# Arguments below SHIFT_THRESHOLD are raised with psi(x+1) = psi(x) + 1/x before
# the asymptotic series is applied. With 7 Bernoulli terms the first omitted
# term at x = 10 is below 5e-17.
SHIFT_THRESHOLD = 10.0
BERNOULLI_TERMS = 7

_B2K = [
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
]

# coefficient of x^(-2k) in psi(x) - ln x + 1/(2x), with the sign folded in later
ASYMPTOTIC_COEFFS = np.array(
    [float(b / (2 * (k + 1))) for k, b in enumerate(_B2K[:BERNOULLI_TERMS])]
)


def digamma(x):
    """``psi(x)`` for ``x > 0``; scalar in, float out, array in, array out.

    Accurate to about 1e-13 absolute for ``x >= 1e-3``.
    """
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(~(arr > 0)) or not np.all(np.isfinite(arr)):
        raise ValueError("digamma is only defined here for finite x > 0")
    out = _kernels.digamma(
        np.ascontiguousarray(arr.ravel()), ASYMPTOTIC_COEFFS, SHIFT_THRESHOLD
    ).reshape(arr.shape)
    if np.ndim(x) == 0:
        return float(out[0])
    return out


@dataclass(frozen=True)
class Example2Params:
    hx: float = 1.0
    hy: float = 1.0
    x0: float = 1.0
    y0: float = 1.0
    alpha: float = 1.0
    u00: float = 0.0
    N: int = 10
    M: int = 10

    def __post_init__(self):
        if not (self.hx > 0 and self.hy > 0):
            raise ValueError("hx and hy must be positive")
        if not (self.x0 / self.hx > 0 and self.y0 / self.hy > 0):
            raise ValueError("x0/hx and y0/hy must be positive")
        if self.N < 1 or self.M < 1:
            raise ValueError("grid extents must be at least 1")

    def lattice(self, extra: int = 0) -> OrthoLattice2D:
        """Uniform lattice with ``N + extra`` x-points and ``M + extra`` y-points."""
        return OrthoLattice2D(
            build_uniform_lattice(self.x0, self.hx, max(2, self.N + extra)),
            build_uniform_lattice(self.y0, self.hy, max(2, self.M + extra)),
        )


def example2_closed_form(p: Example2Params) -> ScalarField2D:
    """Closed-form solution on ``n = 0..N-1``, ``m = 0..M-1``."""
    n = np.arange(p.N, dtype=np.float64)
    m = np.arange(p.M, dtype=np.float64)
    xn = p.x0 + p.hx * n
    ym = p.y0 + p.hy * m
    origin = (
        p.x0 - p.y0 - p.hx * digamma(1.0 + p.x0 / p.hx) + p.hy * digamma(1.0 + p.y0 / p.hy)
    )
    col = -xn + p.hx * digamma(1.0 + xn / p.hx)
    row = ym - p.hy * digamma(1.0 + ym / p.hy)
    vals = p.u00 + p.alpha * (origin + col[None, :] + row[:, None])
    return ScalarField2D(IndexDomain.rectangle(0, p.N - 1, 0, p.M - 1), vals)
