"""Discrete Jacobi last multiplier for ``f1 Δx u + f2 Δy u = 0``.

A multiplier ``M`` turns the coefficient pair into minors of a solution's
difference matrix: ``Δy u = M f1`` and ``Δx u = -M f2``. Such an ``M`` satisfies

    (Δx M · f1(n+1,m) + Δy M · f2(n,m+1)) / M + Δx f1 + Δy f2 = 0,

which is ``M`` times the conservation law ``Δx(M f1) + Δy(M f2) = 0``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .diffops import forward_diff_x, forward_diff_y
from .errors import DomainError, ZeroValueError
from .grid import IndexDomain, OrthoLattice2D, ScalarField2D

DEFAULT_TOLERANCE = 1e-10


class MultiplierField:
    """A nowhere-vanishing field ``M``."""

    __slots__ = ("values",)

    def __init__(self, values: ScalarField2D):
        zero = values.domain.mask() & (values.values == 0)
        if np.any(zero):
            k, i = np.argwhere(zero)[0]
            raise ZeroValueError(
                "multiplier vanishes",
                (values.domain.n_min + int(i), values.domain.m0 + int(k)),
            )
        self.values = values

    @property
    def domain(self) -> IndexDomain:
        return self.values.domain

    def __repr__(self):
        return f"MultiplierField({self.values!r})"


@dataclass(frozen=True)
class MinorPair:
    A1: ScalarField2D
    A2: ScalarField2D

    def __post_init__(self):
        if self.A1.domain != self.A2.domain:
            raise DomainError("minor fields must share a domain")


def field_scale(*fields: ScalarField2D) -> float:
    """Largest absolute value over the given fields (1.0 if all vanish)."""
    s = max(f.max_abs() for f in fields)
    return s if s > 0 else 1.0


def _need(field: ScalarField2D, dom: IndexDomain, name: str, dn: int = 0, dm: int = 0):
    src = dom.shifted(dn, dm)
    if not field.domain.contains(src):
        raise DomainError(f"{name} does not cover the cells required by this operation")
    return field.on(dom, dn, dm)


def pde_residual(
    u: ScalarField2D, f1: ScalarField2D, f2: ScalarField2D, lat: OrthoLattice2D
) -> ScalarField2D:
    """``f1 Δx u + f2 Δy u`` on the cells where both differences exist."""
    dx = forward_diff_x(u, lat)
    dy = forward_diff_y(u, lat)
    dom = dx.domain.intersect(dy.domain)
    vals = _need(f1, dom, "f1") * dx.on(dom) + _need(f2, dom, "f2") * dy.on(dom)
    return ScalarField2D(dom, vals)


def wronskian_det(u: ScalarField2D, u1: ScalarField2D, lat: OrthoLattice2D) -> ScalarField2D:
    """Determinant of the difference matrix of ``(u, u1)``.

    Zero wherever both fields solve the same equation with a nonvanishing
    coefficient pair.
    """
    if u.domain != u1.domain:
        raise DomainError("wronskian_det needs fields on the same domain")
    ux, uy = forward_diff_x(u, lat), forward_diff_y(u, lat)
    vx, vy = forward_diff_x(u1, lat), forward_diff_y(u1, lat)
    dom = ux.domain.intersect(uy.domain)
    det = ux.on(dom) * vy.on(dom) - uy.on(dom) * vx.on(dom)
    return ScalarField2D(dom, det)


def minors(u1: ScalarField2D, lat: OrthoLattice2D) -> MinorPair:
    """First-row minors ``A1 = Δy u1``, ``A2 = -Δx u1``."""
    dx = forward_diff_x(u1, lat)
    dy = forward_diff_y(u1, lat)
    dom = dx.domain.intersect(dy.domain)
    return MinorPair(ScalarField2D(dom, dy.on(dom)), ScalarField2D(dom, -dx.on(dom)))


def divergence_of_minors(A: MinorPair, lat: OrthoLattice2D) -> ScalarField2D:
    return forward_diff_x(A.A1, lat) + forward_diff_y(A.A2, lat)


def _residual_domain(M: MultiplierField) -> IndexDomain:
    return M.domain.shrink_x().intersect(M.domain.shrink_y())


def jlm_residual(
    M: MultiplierField, f1: ScalarField2D, f2: ScalarField2D, lat: OrthoLattice2D
) -> ScalarField2D:
    """Residual of the multiplier equation in its divided (log-derivative) form."""
    Mv = M.values
    dom = _residual_domain(M)
    m0 = Mv.on(dom)
    dxM = (Mv.on(dom, 1, 0) - m0) / lat.hx[dom.n_min : dom.n_max + 1][None, :]
    dyM = (Mv.on(dom, 0, 1) - m0) / lat.hy[dom.m0 : dom.m1 + 1][:, None]
    f1_here = _need(f1, dom, "f1")
    f1_next = _need(f1, dom, "f1", 1, 0)
    f2_here = _need(f2, dom, "f2")
    f2_next = _need(f2, dom, "f2", 0, 1)
    dxf1 = (f1_next - f1_here) / lat.hx[dom.n_min : dom.n_max + 1][None, :]
    dyf2 = (f2_next - f2_here) / lat.hy[dom.m0 : dom.m1 + 1][:, None]
    r = (dxM * f1_next + dyM * f2_next) / m0 + dxf1 + dyf2
    return ScalarField2D(dom, r)


def conservation_residual(
    M: MultiplierField, f1: ScalarField2D, f2: ScalarField2D, lat: OrthoLattice2D
) -> ScalarField2D:
    """``Δx(M f1) + Δy(M f2)``; equals ``M * jlm_residual`` up to rounding."""
    dom = _residual_domain(M)
    P = M.values * f1
    Q = M.values * f2
    c = forward_diff_x(P, lat) + forward_diff_y(Q, lat)
    if not c.domain.contains(dom):
        raise DomainError("coefficient fields do not cover the multiplier's residual cells")
    return ScalarField2D(dom, c.on(dom))


def _cone_mask(nrows: int, K: int, width0: int) -> np.ndarray:
    j = np.arange(nrows)[:, None]
    i = np.arange(K)[None, :]
    return i <= width0 - 1 - j


def _check_cells(arr, need, n0, m0, what):
    missing = need & np.isnan(arr)
    if np.any(missing):
        k, i = np.argwhere(missing)[0]
        raise DomainError(
            f"{what} undefined at cell (n={n0 + int(i)}, m={m0 + int(k)}) required by the sweep"
        )


def _check_nonzero(arr, need, n0, m0, what):
    zero = need & (arr == 0)
    if np.any(zero):
        k, i = np.argwhere(zero)[0]
        raise ZeroValueError(f"{what} is zero", (n0 + int(i), m0 + int(k)))


def sweep_rows(f1: ScalarField2D, f2: ScalarField2D, lat: OrthoLattice2D, n0, K, m0) -> int:
    """Number of rows a forward-in-m sweep from a K-wide row at ``m0`` can produce."""
    return max(1, min(K, len(lat.y_axis) - m0, f2.domain.m1 - m0 + 1, f1.domain.m1 - m0 + 2))


def solve_jlm_rowwise(
    f1: ScalarField2D,
    f2: ScalarField2D,
    first_row: Sequence[float],
    lat: OrthoLattice2D,
    n0: int = 0,
    m0: int = 0,
) -> MultiplierField:
    """Propagate a multiplier upward in m from its values on row ``m0``.

    Each new row solves the conservation law for ``M(n, m+1)``, so the
    output lives on a light cone losing one n-cell per row.
    """
    row = np.ascontiguousarray(first_row, dtype=np.float64)
    K = row.shape[0]
    if K < 1:
        raise DomainError("first_row is empty")
    zero = row == 0
    if np.any(zero):
        raise ZeroValueError("first_row multiplier value is zero", (n0 + int(np.argmax(zero)), m0))
    R = sweep_rows(f1, f2, lat, n0, K, m0)
    lat.require_x(n0, n0 + K - 1)
    F1 = f1.window(n0, n0 + K - 1, m0, m0 + R - 2) if R > 1 else np.empty((0, K))
    F2 = f2.window(n0, n0 + K - 1, m0, m0 + R - 1)
    if R > 1:
        _check_cells(F1, _cone_mask(R - 1, K, K), n0, m0, "f1")
        need2 = _cone_mask(R, K, K)
        need2[0] = _cone_mask(1, K, K - 1)[0]
        _check_cells(F2, need2, n0, m0, "f2")
        divisor = _cone_mask(R, K, K)
        divisor[0] = False
        _check_nonzero(F2, divisor, n0, m0, "f2")
    hx = np.ascontiguousarray(lat.hx[n0 : n0 + K - 1])
    hy = np.ascontiguousarray(lat.hy[m0 : m0 + R - 1])
    out = _kernels.multiplier_sweep(
        row, np.ascontiguousarray(F1), np.ascontiguousarray(F2), hx, hy, R
    )
    dom = IndexDomain.light_cone(n0, K, m0, R)
    mask = dom.mask()
    bad = mask & ~np.isfinite(out)
    if np.any(bad):
        k, i = np.argwhere(bad)[0]
        raise ZeroValueError("propagated multiplier overflowed", (n0 + int(i), m0 + int(k)))
    return MultiplierField(ScalarField2D(dom, out))


@dataclass(frozen=True)
class AnsatzMember:
    """``M = c * x_{n+s}^a * y_{m+t}^b``."""

    a: int
    b: int
    s: int
    t: int

    def describe(self) -> str:
        parts = []
        for sym, shift, power in (("x", self.s, self.a), ("y", self.t, self.b)):
            if power == 0:
                continue
            name = sym + ("1" if shift else "")
            parts.append(name if power == 1 else f"{name}^{power}")
        if not parts:
            return "M = constant"
        return "M = c * " + " * ".join(parts)

    def base_values(self, lat: OrthoLattice2D, domain: IndexDomain) -> np.ndarray:
        lat.require_x(domain.n_min, domain.n_max + self.s)
        lat.require_y(domain.m0, domain.m1 + self.t)
        rows, cols = domain.box_shape
        xs = lat.x[domain.n_min + self.s : domain.n_min + self.s + cols]
        ys = lat.y[domain.m0 + self.t : domain.m0 + self.t + rows]
        px = {-1: 1.0 / xs, 0: np.ones_like(xs), 1: xs}[self.a]
        py = {-1: 1.0 / ys, 0: np.ones_like(ys), 1: ys}[self.b]
        return py[:, None] * px[None, :]


ANSATZ_FAMILY: tuple[AnsatzMember, ...] = tuple(
    AnsatzMember(a, b, s, t)
    for a, b, s, t in itertools.product((-1, 0, 1), (-1, 0, 1), (0, 1), (0, 1))
)


@dataclass(frozen=True)
class AnsatzMatch:
    member: AnsatzMember
    c: float
    residual: float
    multiplier: MultiplierField

    @property
    def description(self) -> str:
        return self.member.describe()


def search_ansatz_jlm(
    f1: ScalarField2D,
    f2: ScalarField2D,
    lat: OrthoLattice2D,
    family: Sequence[AnsatzMember] = ANSATZ_FAMILY,
    boundary: Sequence[float] | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> AnsatzMatch | None:
    """First family member whose multiplier equation residual is below tolerance.

    The equation is homogeneous in ``M``, so the constant ``c`` is free. When
    ``boundary`` (multiplier values along the first row of the coefficient
    domain) is given, ``c`` is its least-squares fit; otherwise ``c = 1``.
    """
    dom = f1.domain.intersect(f2.domain)
    scale = field_scale(ScalarField2D(dom, f1.on(dom)), ScalarField2D(dom, f2.on(dom)))
    mask = dom.mask()
    for member in family:
        base = member.base_values(lat, dom)
        if not np.all(np.isfinite(base[mask])) or np.any(base[mask] == 0):
            continue
        c = 1.0
        if boundary is not None:
            b = np.asarray(boundary, dtype=np.float64)
            lo, hi = dom.rows[0]
            row = base[0, lo - dom.n_min : hi - dom.n_min + 1]
            if b.shape != row.shape:
                raise DomainError(
                    f"boundary has {b.size} values; the first row has {row.size} cells"
                )
            c = float(np.dot(row, b) / np.dot(row, row))
            if c == 0:
                continue
        M = MultiplierField(ScalarField2D(dom, np.where(mask, c * base, np.nan)))
        res = jlm_residual(M, f1, f2, lat).max_abs()
        if res <= tolerance * scale:
            return AnsatzMatch(member, c, res, M)
    return None
