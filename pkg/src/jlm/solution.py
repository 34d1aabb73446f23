"""Explicit solutions from a verified multiplier, plus a direct sweep oracle."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from . import _kernels
from .core import (
    DEFAULT_TOLERANCE,
    MultiplierField,
    _check_cells,
    _check_nonzero,
    _cone_mask,
    field_scale,
)
from .diffops import forward_diff_x, forward_diff_y
from .errors import CompatibilityError, DomainError
from .grid import IndexDomain, OrthoLattice2D, ScalarField2D


def gradient_fields_from_jlm(
    M: MultiplierField, f1: ScalarField2D, f2: ScalarField2D, lat: OrthoLattice2D
) -> tuple[ScalarField2D, ScalarField2D]:
    """Target differences ``(Δx u, Δy u) = (-M f2, M f1)`` on the common domain."""
    dom = M.domain.intersect(f1.domain).intersect(f2.domain)
    if dom != M.domain:
        raise DomainError("coefficient fields must cover the multiplier domain")
    m = M.values.on(dom)
    gx = ScalarField2D(dom, -(m * f2.on(dom)))
    gy = ScalarField2D(dom, m * f1.on(dom))
    return gx, gy


def compatibility_residual(
    g_x: ScalarField2D, g_y: ScalarField2D, lat: OrthoLattice2D
) -> ScalarField2D:
    """Loop-closure defect ``Δy g_x - Δx g_y``."""
    return forward_diff_y(g_x, lat) - forward_diff_x(g_y, lat)


def integrate_path(
    g_x: ScalarField2D,
    g_y: ScalarField2D,
    u00: float,
    lat: OrthoLattice2D,
    tolerance: float = DEFAULT_TOLERANCE,
    column_first: bool = False,
) -> ScalarField2D:
    """Sum the gradient system from the domain corner.

    The canonical path runs along the first row, then up each column.
    ``column_first`` takes the other path (first column, then along rows) and
    exists to test path independence; it needs every row to start at the
    same n.
    """
    if g_x.domain != g_y.domain:
        raise DomainError("g_x and g_y must share a domain")
    dom = g_x.domain
    if len(dom.rows) < 2 or dom.rows[0][1] == dom.rows[0][0]:
        raise DomainError("domain too small: need at least 2 cells in each direction")
    comp = compatibility_residual(g_x, g_y, lat)
    bound = tolerance * field_scale(g_x, g_y)
    worst = comp.max_abs()
    if worst > bound:
        raise CompatibilityError(worst, bound, comp.argmax_abs())
    lo = np.array([r[0] for r in dom.rows], dtype=np.int64)
    hi = np.array([r[1] for r in dom.rows], dtype=np.int64)
    if column_first and np.any(lo != lo[0]):
        raise DomainError("column-first integration needs rows with a common first n")
    lo -= dom.n_min
    hi -= dom.n_min
    lat.require_x(dom.n_min, dom.n_max)
    lat.require_y(dom.m0, dom.m1)
    hx = np.ascontiguousarray(lat.hx[dom.n_min : dom.n_max])
    hy = np.ascontiguousarray(lat.hy[dom.m0 : dom.m1])
    out = _kernels.path_integrate(
        np.ascontiguousarray(g_x.values),
        np.ascontiguousarray(g_y.values),
        hx,
        hy,
        lo,
        hi,
        float(u00),
        bool(column_first),
    )
    return ScalarField2D(dom, out)


def propagate_direct(
    f1: ScalarField2D,
    f2: ScalarField2D,
    first_row: Sequence[float],
    lat: OrthoLattice2D,
    n0: int = 0,
    m0: int = 0,
) -> ScalarField2D:
    """Solve ``f1 Δx u + f2 Δy u = 0`` for ``u(n, m+1)`` row by row.

    Independent of any multiplier; the output's residual vanishes by
    construction on its light cone.
    """
    row = np.ascontiguousarray(first_row, dtype=np.float64)
    K = row.shape[0]
    if K < 1:
        raise DomainError("first_row is empty")
    # coefficients are read on rows m0 .. m0+R-2 only
    R = max(1, min(K, len(lat.y_axis) - m0, f1.domain.m1 - m0 + 2, f2.domain.m1 - m0 + 2))
    lat.require_x(n0, n0 + K - 1)
    if R > 1:
        F1 = f1.window(n0, n0 + K - 1, m0, m0 + R - 2)
        F2 = f2.window(n0, n0 + K - 1, m0, m0 + R - 2)
        need = _cone_mask(R - 1, K, K - 1)
        _check_cells(F1, need, n0, m0, "f1")
        _check_cells(F2, need, n0, m0, "f2")
        _check_nonzero(F2, need, n0, m0, "f2")
    else:
        F1 = F2 = np.empty((0, K))
    hx = np.ascontiguousarray(lat.hx[n0 : n0 + K - 1])
    hy = np.ascontiguousarray(lat.hy[m0 : m0 + R - 1])
    out = _kernels.solution_sweep(
        row, np.ascontiguousarray(F1), np.ascontiguousarray(F2), hx, hy, R
    )
    return ScalarField2D(IndexDomain.light_cone(n0, K, m0, R), out)
