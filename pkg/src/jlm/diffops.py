"""Forward and symmetric difference quotients on non-uniform orthogonal lattices.

Every operator returns a field on an explicitly shrunken domain: a forward
difference in n drops the last cell of each row, a forward difference in m
keeps only cells whose upper neighbour exists.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .grid import IndexDomain, OrthoLattice2D, ScalarField2D


def _hx(lat: OrthoLattice2D, domain: IndexDomain) -> np.ndarray:
    lat.require_x(domain.n_min, domain.n_max + 1)
    return lat.hx[domain.n_min : domain.n_max + 1][None, :]


def _hy(lat: OrthoLattice2D, domain: IndexDomain) -> np.ndarray:
    lat.require_y(domain.m0, domain.m1 + 1)
    return lat.hy[domain.m0 : domain.m1 + 1][:, None]


def forward_diff_x(u: ScalarField2D, lat: OrthoLattice2D) -> ScalarField2D:
    """``(u(n+1,m) - u(n,m)) / (x_{n+1} - x_n)``."""
    dom = u.domain.shrink_x()
    vals = (u.on(dom, 1, 0) - u.on(dom)) / _hx(lat, dom)
    return ScalarField2D(dom, vals)


def forward_diff_y(u: ScalarField2D, lat: OrthoLattice2D) -> ScalarField2D:
    """``(u(n,m+1) - u(n,m)) / (y_{m+1} - y_m)``."""
    dom = u.domain.shrink_y()
    vals = (u.on(dom, 0, 1) - u.on(dom)) / _hy(lat, dom)
    return ScalarField2D(dom, vals)


def symmetric_diff_x(u: ScalarField2D, lat: OrthoLattice2D) -> ScalarField2D:
    """``(u(n+1,m) - u(n-1,m)) / (x_{n+1} - x_{n-1})``; drops both end cells of each row."""
    dom = u.domain.shrink_x(left=1, right=1)
    lat.require_x(dom.n_min - 1, dom.n_max + 1)
    lo, hi = dom.n_min, dom.n_max
    width = (lat.x[lo + 1 : hi + 2] - lat.x[lo - 1 : hi])[None, :]
    vals = (u.on(dom, 1, 0) - u.on(dom, -1, 0)) / width
    return ScalarField2D(dom, vals)


def symmetric_diff_y(u: ScalarField2D, lat: OrthoLattice2D) -> ScalarField2D:
    """Symmetric quotient in m; keeps cells with both vertical neighbours."""
    if len(u.domain.rows) < 3:
        raise DomainError("domain too small in m: need at least 3 rows")
    up = u.domain.shrink_y()
    dom = up.intersect(up.shifted(0, 1))
    lat.require_y(dom.m0 - 1, dom.m1 + 1)
    height = (lat.y[dom.m0 + 1 : dom.m1 + 2] - lat.y[dom.m0 - 1 : dom.m1])[:, None]
    vals = (u.on(dom, 0, 1) - u.on(dom, 0, -1)) / height
    return ScalarField2D(dom, vals)


def mixed_commutator(u: ScalarField2D, lat: OrthoLattice2D) -> ScalarField2D:
    """``Δx Δy u - Δy Δx u``; vanishes up to rounding for every field."""
    xy = forward_diff_x(forward_diff_y(u, lat), lat)
    yx = forward_diff_y(forward_diff_x(u, lat), lat)
    return xy - yx
