"""Three-dimensional alternating-determinant identity and the discrete Leibniz defect.

With two fields ``u1, u2`` on a 3D orthogonal lattice, the columns
``B_i = (Δ_i u1, Δ_i u2)`` give minors ``A_k``. The alternating sum of
determinants with one column differenced vanishes identically because
``Δ_k Δ_i = Δ_i Δ_k``; the naive divergence ``Σ_k Δ_k A_k`` does not,
because ``Δ(fg) = f Δg + g Δf + h Δf Δg``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from .grid import Lattice1D


@dataclass(frozen=True, eq=False)
class Grid3D:
    """Values ``v[n1, n2, n3]`` at the points of three coordinate axes."""

    coords: tuple[np.ndarray, np.ndarray, np.ndarray]
    values: np.ndarray

    def __post_init__(self):
        coords = tuple(np.asarray(c, dtype=np.float64) for c in self.coords)
        if len(coords) != 3:
            raise DomainError("Grid3D needs exactly three axes")
        for c in coords:
            if c.ndim != 1 or c.size < 1 or np.any(np.diff(c) <= 0):
                raise DomainError("axes must be nonempty and strictly increasing")
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != tuple(c.size for c in coords):
            raise DomainError(f"values shape {vals.shape} does not match axes")
        if not np.all(np.isfinite(vals)):
            raise DomainError("Grid3D values must be finite")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "values", vals)

    @classmethod
    def sample(cls, axes: Sequence[Lattice1D], fn: Callable) -> "Grid3D":
        X = np.meshgrid(*(a.points for a in axes), indexing="ij")
        return cls(tuple(a.points for a in axes), np.broadcast_to(fn(*X), X[0].shape))

    @property
    def shape(self):
        return self.values.shape

    def crop(self, shape) -> "Grid3D":
        """Leading ``shape`` block (cells nearest the lattice origin)."""
        sl = tuple(slice(0, s) for s in shape)
        return Grid3D(tuple(c[:s] for c, s in zip(self.coords, shape)), self.values[sl])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __add__(self, other):
        return _combine(self, other, np.add)

    def __sub__(self, other):
        return _combine(self, other, np.subtract)

    def __mul__(self, other):
        return _combine(self, other, np.multiply)


def _common(*grids: Grid3D) -> tuple[int, int, int]:
    return tuple(min(g.shape[a] for g in grids) for a in range(3))


def _combine(a: Grid3D, b: Grid3D, op) -> Grid3D:
    shp = _common(a, b)
    a, b = a.crop(shp), b.crop(shp)
    return Grid3D(a.coords, op(a.values, b.values))


@dataclass(frozen=True)
class SolutionTuple3:
    u1: Grid3D
    u2: Grid3D

    def __post_init__(self):
        if self.u1.shape != self.u2.shape or any(
            not np.array_equal(a, b) for a, b in zip(self.u1.coords, self.u2.coords)
        ):
            raise DomainError("u1 and u2 must share a grid")


def _axis_index(axis: int) -> int:
    if axis not in (1, 2, 3):
        raise DomainError(f"axis must be 1, 2 or 3, got {axis}")
    return axis - 1


def _spacing(g: Grid3D, a: int) -> np.ndarray:
    h = np.diff(g.coords[a])
    shape = [1, 1, 1]
    shape[a] = h.size
    return h.reshape(shape)


def forward_diff_3d(u: Grid3D, axis: int) -> Grid3D:
    """Forward quotient along ``axis`` (1-based); drops the last point on that axis."""
    a = _axis_index(axis)
    if u.shape[a] < 2:
        raise DomainError(f"axis {axis} needs at least 2 points")
    vals = np.diff(u.values, axis=a) / _spacing(u, a)
    coords = list(u.coords)
    coords[a] = coords[a][:-1]
    return Grid3D(tuple(coords), vals)


def _gradients(u: Grid3D) -> list[Grid3D]:
    return [forward_diff_3d(u, ax) for ax in (1, 2, 3)]


def minor_fields_3d(s: SolutionTuple3) -> tuple[Grid3D, Grid3D, Grid3D]:
    """Signed 2x2 minors ``A_k`` of the 2x3 matrix ``[Δ_i u_j]`` with column k removed."""
    d1 = _gradients(s.u1)
    d2 = _gradients(s.u2)
    shp = _common(*d1, *d2)
    d1 = [g.crop(shp).values for g in d1]
    d2 = [g.crop(shp).values for g in d2]
    coords = tuple(c[: n] for c, n in zip(s.u1.coords, shp))
    A1 = d1[1] * d2[2] - d1[2] * d2[1]
    A2 = -(d1[0] * d2[2] - d1[2] * d2[0])
    A3 = d1[0] * d2[1] - d1[1] * d2[0]
    return Grid3D(coords, A1), Grid3D(coords, A2), Grid3D(coords, A3)


def _alternating_terms(s: SolutionTuple3):
    if min(s.u1.shape) < 3:
        raise DomainError("alternating sum needs at least 3 points on every axis")
    B = [_gradients(u) for u in (s.u1, s.u2)]  # B[j][i] = Δ_i u_j
    # DB[j][k][i] = Δ_k Δ_i u_j, differenced in that order
    DB = [[[forward_diff_3d(B[j][i], k + 1) for i in range(3)] for k in range(3)] for j in range(2)]
    shp = _common(*(DB[j][k][i] for j in range(2) for k in range(3) for i in range(3)))
    col = [[B[j][i].crop(shp).values for i in range(3)] for j in range(2)]
    dcol = [[[DB[j][k][i].crop(shp).values for i in range(3)] for k in range(3)] for j in range(2)]
    terms = []
    for k in range(3):
        sign = 1.0 if k % 2 == 0 else -1.0
        keep = [c for c in range(3) if c != k]
        for i in keep:
            # columns of the 2x2 matrix, column i replaced by Δ_k B_i
            c0, c1 = (
                [dcol[j][k][c] if c == i else col[j][c] for j in range(2)] for c in keep
            )
            terms.append(sign * (c0[0] * c1[1] - c1[0] * c0[1]))
    return terms, shp


def alternating_determinant_sum(s: SolutionTuple3) -> Grid3D:
    """``Σ_{i≠k} (-1)^(k-1) det(B_1, .., Δ_k B_i, .., B̂_k, .., B_3)``, identically zero."""
    terms, shp = _alternating_terms(s)
    coords = tuple(c[:n] for c, n in zip(s.u1.coords, shp))
    return Grid3D(coords, np.sum(terms, axis=0))


def alternating_term_scale(s: SolutionTuple3) -> float:
    """Largest magnitude among the six determinant terms (reference for relative tolerances)."""
    terms, _ = _alternating_terms(s)
    sc = max(float(np.max(np.abs(t))) for t in terms)
    return sc if sc > 0 else 1.0


def naive_divergence_sum(s: SolutionTuple3) -> Grid3D:
    """``Σ_k Δ_k A_k``; nonzero in general because of the Leibniz defect."""
    if min(s.u1.shape) < 3:
        raise DomainError("naive divergence needs at least 3 points on every axis")
    A = minor_fields_3d(s)
    parts = [forward_diff_3d(A[k], k + 1) for k in range(3)]
    shp = _common(*parts)
    parts = [p.crop(shp) for p in parts]
    return Grid3D(parts[0].coords, parts[0].values + parts[1].values + parts[2].values)


def leibniz_discrepancy(f: Grid3D, g: Grid3D, axis: int) -> Grid3D:
    """``Δ(fg) - f Δg - g Δf - h Δf Δg``; zero up to rounding."""
    a = _axis_index(axis)
    if f.shape != g.shape:
        raise DomainError("f and g must share a grid")
    dfg = forward_diff_3d(f * g, axis)
    df = forward_diff_3d(f, axis)
    dg = forward_diff_3d(g, axis)
    shp = dfg.shape
    fv, gv = f.crop(shp).values, g.crop(shp).values
    h = _spacing(f, a)
    out = dfg.values - fv * dg.values - gv * df.values - h * df.values * dg.values
    return Grid3D(dfg.coords, out)


def leibniz_scale(f: Grid3D, g: Grid3D, axis: int) -> float:
    """Magnitude of the terms entering :func:`leibniz_discrepancy`."""
    df = forward_diff_3d(f, axis)
    dg = forward_diff_3d(g, axis)
    shp = df.shape
    fv, gv = f.crop(shp).values, g.crop(shp).values
    h = _spacing(f, _axis_index(axis))
    mags = [
        forward_diff_3d(f * g, axis).values,
        fv * dg.values,
        gv * df.values,
        h * df.values * dg.values,
    ]
    sc = max(float(np.max(np.abs(m))) for m in mags)
    return sc if sc > 0 else 1.0


MONOMIALS_DEG3 = tuple(
    (i, j, k) for i in range(4) for j in range(4) for k in range(4) if i + j + k <= 3
)


def random_polynomial(rng: np.random.Generator, axes: Sequence[Lattice1D]) -> Grid3D:
    """Random cubic (degree <= 3) polynomial with coefficients uniform in [-1, 1]."""
    coeffs = rng.uniform(-1.0, 1.0, len(MONOMIALS_DEG3))

    def fn(x, y, z):
        out = np.zeros_like(x)
        for c, (i, j, k) in zip(coeffs, MONOMIALS_DEG3):
            out = out + c * x**i * y**j * z**k
        return out

    return Grid3D.sample(axes, fn)


def random_linear(rng: np.random.Generator, axes: Sequence[Lattice1D]) -> Grid3D:
    """Affine field with small integer coefficients; exact on integer grids."""
    c = rng.integers(-5, 6, 4).astype(np.float64)
    return Grid3D.sample(axes, lambda x, y, z: c[0] + c[1] * x + c[2] * y + c[3] * z)
