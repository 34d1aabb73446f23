"""Lattices, index domains and scalar fields on two-dimensional orthogonal lattices.

A field is stored as a dense array over the bounding box of its domain,
indexed ``[m - m0, n - n_min]`` (rows are m, columns are n). Cells outside
the domain hold NaN and are never exposed as values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import DomainError, LatticeError


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Lattice1D:
    """Strictly increasing coordinates ``x_i`` with spacings ``h_i = x_{i+1} - x_i``."""

    points: np.ndarray
    spacings: np.ndarray

    def __post_init__(self):
        pts = _frozen(self.points)
        if pts.ndim != 1:
            raise LatticeError("lattice points must be one-dimensional")
        if pts.size < 2:
            raise LatticeError("too few points: a lattice needs at least 2")
        if not np.all(np.isfinite(pts)):
            raise LatticeError("lattice points must be finite")
        h = np.diff(pts)
        if not np.all(h > 0):
            i = int(np.argmax(~(h > 0)))
            raise LatticeError(f"points not strictly increasing at index {i + 1}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "spacings", _frozen(h))

    def __len__(self) -> int:
        return self.points.size

    def __eq__(self, other):
        if not isinstance(other, Lattice1D):
            return NotImplemented
        return np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.points.tobytes())

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(self.spacings == self.spacings[0]))


def build_uniform_lattice(x0: float, h: float, count: int) -> Lattice1D:
    """Lattice ``x_i = x0 + i*h`` for ``i = 0 .. count-1``."""
    if not h > 0:
        raise LatticeError(f"nonpositive step h={h}")
    if count < 2:
        raise LatticeError(f"too few points: count={count} (need at least 2)")
    pts = x0 + h * np.arange(count, dtype=np.float64)
    return Lattice1D(pts, np.diff(pts))


def build_lattice_from_points(points: Sequence[float]) -> Lattice1D:
    pts = np.asarray(points, dtype=np.float64)
    return Lattice1D(pts, np.diff(pts) if pts.size > 1 else pts[:0])


@dataclass(frozen=True)
class OrthoLattice2D:
    x_axis: Lattice1D
    y_axis: Lattice1D

    @property
    def x(self) -> np.ndarray:
        return self.x_axis.points

    @property
    def y(self) -> np.ndarray:
        return self.y_axis.points

    @property
    def hx(self) -> np.ndarray:
        return self.x_axis.spacings

    @property
    def hy(self) -> np.ndarray:
        return self.y_axis.spacings

    @property
    def shape(self) -> tuple[int, int]:
        """Number of points along (x, y)."""
        return len(self.x_axis), len(self.y_axis)

    def full_domain(self) -> "IndexDomain":
        nx, ny = self.shape
        return IndexDomain.rectangle(0, nx - 1, 0, ny - 1)

    def require_x(self, n_lo: int, n_hi: int) -> None:
        if n_lo < 0 or n_hi >= len(self.x_axis):
            raise DomainError(
                f"x-lattice has {len(self.x_axis)} points; indices {n_lo}..{n_hi} requested"
            )

    def require_y(self, m_lo: int, m_hi: int) -> None:
        if m_lo < 0 or m_hi >= len(self.y_axis):
            raise DomainError(
                f"y-lattice has {len(self.y_axis)} points; indices {m_lo}..{m_hi} requested"
            )


@dataclass(frozen=True)
class IndexDomain:
    """A set of lattice cells given by one inclusive n-range per consecutive m-row.

    Rows must either all coincide (a rectangle) or be nested, each row
    contained in the one below it (the trapezoids produced by forward sweeps).
    """

    m0: int
    rows: tuple[tuple[int, int], ...]

    def __post_init__(self):
        rows = tuple((int(lo), int(hi)) for lo, hi in self.rows)
        object.__setattr__(self, "rows", rows)
        if not rows:
            raise DomainError("empty index domain")
        for k, (lo, hi) in enumerate(rows):
            if lo > hi:
                raise DomainError(f"empty n-range {lo}..{hi} in row m={self.m0 + k}")
        for k in range(1, len(rows)):
            (plo, phi), (lo, hi) = rows[k - 1], rows[k]
            if lo < plo or hi > phi:
                raise DomainError(
                    f"row m={self.m0 + k} ({lo}..{hi}) is not nested in the row below "
                    f"({plo}..{phi})"
                )

    @classmethod
    def rectangle(cls, n0: int, n1: int, m0: int, m1: int) -> "IndexDomain":
        if m1 < m0:
            raise DomainError(f"empty m-range {m0}..{m1}")
        return cls(m0, tuple((n0, n1) for _ in range(m1 - m0 + 1)))

    @classmethod
    def light_cone(cls, n0: int, width: int, m0: int, nrows: int) -> "IndexDomain":
        """Trapezoid whose row ``m0 + k`` covers ``n0 .. n0 + width - 1 - k``."""
        nrows = min(nrows, width)
        return cls(m0, tuple((n0, n0 + width - 1 - k) for k in range(nrows)))

    @property
    def kind(self) -> str:
        return "rectangle" if all(r == self.rows[0] for r in self.rows) else "trapezoid"

    @property
    def m1(self) -> int:
        return self.m0 + len(self.rows) - 1

    @property
    def n_min(self) -> int:
        return min(lo for lo, _ in self.rows)

    @property
    def n_max(self) -> int:
        return max(hi for _, hi in self.rows)

    @property
    def box_shape(self) -> tuple[int, int]:
        return len(self.rows), self.n_max - self.n_min + 1

    @property
    def size(self) -> int:
        return sum(hi - lo + 1 for lo, hi in self.rows)

    def row(self, m: int) -> tuple[int, int] | None:
        k = m - self.m0
        if 0 <= k < len(self.rows):
            return self.rows[k]
        return None

    def mask(self) -> np.ndarray:
        """Boolean array over the bounding box, True on domain cells."""
        out = np.zeros(self.box_shape, dtype=bool)
        base = self.n_min
        for k, (lo, hi) in enumerate(self.rows):
            out[k, lo - base : hi - base + 1] = True
        return out

    def cells(self) -> Iterator[tuple[int, int]]:
        """Cells ``(n, m)`` in row-major order, m outer."""
        for k, (lo, hi) in enumerate(self.rows):
            for n in range(lo, hi + 1):
                yield n, self.m0 + k

    def __contains__(self, cell) -> bool:
        n, m = cell
        r = self.row(m)
        return r is not None and r[0] <= n <= r[1]

    def contains(self, other: "IndexDomain") -> bool:
        for k, (lo, hi) in enumerate(other.rows):
            r = self.row(other.m0 + k)
            if r is None or lo < r[0] or hi > r[1]:
                return False
        return True

    def intersect(self, other: "IndexDomain") -> "IndexDomain":
        m_lo = max(self.m0, other.m0)
        m_hi = min(self.m1, other.m1)
        rows = []
        for m in range(m_lo, m_hi + 1):
            a, b = self.row(m), other.row(m)
            lo, hi = max(a[0], b[0]), min(a[1], b[1])
            if lo > hi:
                break
            rows.append((lo, hi))
        if not rows:
            raise DomainError("domains do not overlap")
        return IndexDomain(m_lo, tuple(rows))

    def shifted(self, dn: int, dm: int) -> "IndexDomain":
        return IndexDomain(self.m0 + dm, tuple((lo + dn, hi + dn) for lo, hi in self.rows))

    def shrink_x(self, left: int = 0, right: int = 1) -> "IndexDomain":
        """Drop ``left``/``right`` cells per row; rows left empty (a cone's apex) are dropped."""
        rows = []
        for lo, hi in self.rows:
            lo, hi = lo + left, hi - right
            if lo > hi:
                break  # nested rows: every later row is empty too
            rows.append((lo, hi))
        if not rows:
            raise DomainError(
                f"domain too small in n: rows need at least {left + right + 1} points"
            )
        return IndexDomain(self.m0, tuple(rows))

    def shrink_y(self) -> "IndexDomain":
        """Cells ``(n, m)`` such that both ``(n, m)`` and ``(n, m+1)`` are in the domain."""
        if len(self.rows) < 2:
            raise DomainError("domain too small in m: need at least 2 rows")
        rows = []
        for (alo, ahi), (blo, bhi) in zip(self.rows, self.rows[1:]):
            lo, hi = max(alo, blo), min(ahi, bhi)
            if lo > hi:
                break
            rows.append((lo, hi))
        if not rows:
            raise DomainError("domain too small in m: consecutive rows do not overlap")
        return IndexDomain(self.m0, tuple(rows))


class ScalarField2D:
    """Finite real values on every cell of an :class:`IndexDomain`.

    ``values`` is the read-only bounding-box array (NaN outside the domain).
    """

    __slots__ = ("domain", "values")

    def __init__(self, domain: IndexDomain, values: np.ndarray):
        arr = np.array(values, dtype=np.float64)
        if arr.shape != domain.box_shape:
            raise DomainError(
                f"value array shape {arr.shape} does not match domain box {domain.box_shape}"
            )
        mask = domain.mask()
        if not np.all(np.isfinite(arr[mask])):
            k, i = np.argwhere(mask & ~np.isfinite(arr))[0]
            raise DomainError(
                f"non-finite value at cell (n={domain.n_min + i}, m={domain.m0 + k})"
            )
        arr[~mask] = np.nan
        arr.flags.writeable = False
        self.domain = domain
        self.values = arr

    @classmethod
    def constant(cls, domain: IndexDomain, value: float) -> "ScalarField2D":
        return cls(domain, np.full(domain.box_shape, float(value)))

    @classmethod
    def sample(
        cls,
        lat: OrthoLattice2D,
        domain: IndexDomain,
        fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
    ) -> "ScalarField2D":
        """Tabulate ``fn(x_n, y_m)`` (broadcast arrays) over ``domain``."""
        X, Y = box_coordinates(lat, domain)
        vals = np.broadcast_to(np.asarray(fn(X, Y), dtype=np.float64), X.shape)
        return cls(domain, np.where(domain.mask(), vals, np.nan))

    def __repr__(self):
        return f"ScalarField2D({self.domain.kind}, m={self.domain.m0}..{self.domain.m1}, size={self.domain.size})"

    def __getitem__(self, cell) -> float:
        n, m = cell
        if cell not in self.domain:
            raise DomainError(f"cell (n={n}, m={m}) outside field domain")
        return float(self.values[m - self.domain.m0, n - self.domain.n_min])

    def on(self, domain: IndexDomain, dn: int = 0, dm: int = 0) -> np.ndarray:
        """Box array over ``domain`` holding ``self(n + dn, m + dm)`` (NaN off-domain)."""
        src = domain.shifted(dn, dm)
        if not self.domain.contains(src):
            raise DomainError("requested domain is not contained in the field domain")
        r0 = src.m0 - self.domain.m0
        c0 = src.n_min - self.domain.n_min
        rows, cols = src.box_shape
        out = self.values[r0 : r0 + rows, c0 : c0 + cols].copy()
        out[~domain.mask()] = np.nan
        return out

    def window(self, n0: int, n1: int, m0: int, m1: int) -> np.ndarray:
        """Array ``[m - m0, n - n0]`` over an arbitrary box; NaN where the field is undefined."""
        out = np.full((m1 - m0 + 1, n1 - n0 + 1), np.nan)
        d = self.domain
        r_lo, r_hi = max(m0, d.m0), min(m1, d.m1)
        c_lo, c_hi = max(n0, d.n_min), min(n1, d.n_max)
        if r_lo <= r_hi and c_lo <= c_hi:
            out[r_lo - m0 : r_hi - m0 + 1, c_lo - n0 : c_hi - n0 + 1] = self.values[
                r_lo - d.m0 : r_hi - d.m0 + 1, c_lo - d.n_min : c_hi - d.n_min + 1
            ]
        return out

    def masked(self) -> np.ndarray:
        """Domain values as a flat array in row-major order."""
        return self.values[self.domain.mask()]

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.masked())))

    def argmax_abs(self) -> tuple[int, int]:
        a = np.where(self.domain.mask(), np.abs(self.values), -1.0)
        k, i = np.unravel_index(int(np.argmax(a)), a.shape)
        return self.domain.n_min + int(i), self.domain.m0 + int(k)

    def items(self) -> Iterator[tuple[int, int, float]]:
        for n, m in self.domain.cells():
            yield n, m, float(self.values[m - self.domain.m0, n - self.domain.n_min])

    def equals(self, other: "ScalarField2D") -> bool:
        return self.domain == other.domain and np.array_equal(
            self.masked(), other.masked()
        )

    def _binary(self, other, op):
        if isinstance(other, ScalarField2D):
            dom = self.domain.intersect(other.domain)
            return ScalarField2D(dom, op(self.on(dom), other.on(dom)))
        return ScalarField2D(self.domain, op(self.values, float(other)))

    def __add__(self, other):
        return self._binary(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return ScalarField2D(self.domain, float(other) - self.values)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, np.divide)

    def __neg__(self):
        return ScalarField2D(self.domain, -self.values)


def box_coordinates(lat: OrthoLattice2D, domain: IndexDomain):
    """Broadcast coordinate arrays ``X[m, n] = x_n`` and ``Y[m, n] = y_m`` over the box."""
    lat.require_x(domain.n_min, domain.n_max)
    lat.require_y(domain.m0, domain.m1)
    rows, cols = domain.box_shape
    X = np.broadcast_to(lat.x[domain.n_min : domain.n_min + cols][None, :], (rows, cols))
    Y = np.broadcast_to(lat.y[domain.m0 : domain.m0 + rows][:, None], (rows, cols))
    return X, Y


def restrict_domain(field: ScalarField2D, domain: IndexDomain) -> ScalarField2D:
    if not field.domain.contains(domain):
        raise DomainError("restriction domain is not contained in the field domain")
    return ScalarField2D(domain, field.on(domain))
