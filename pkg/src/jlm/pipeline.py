"""Problem specs, the solve pipeline and grid export."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .core import (
    DEFAULT_TOLERANCE,
    AnsatzMatch,
    MultiplierField,
    field_scale,
    jlm_residual,
    pde_residual,
    search_ansatz_jlm,
    solve_jlm_rowwise,
)
from .diffops import forward_diff_x, forward_diff_y
from .errors import DomainError
from .expr import Expr, bind_coefficient, bind_row, parse, to_text
from .grid import (
    IndexDomain,
    Lattice1D,
    OrthoLattice2D,
    ScalarField2D,
    build_lattice_from_points,
    build_uniform_lattice,
)
from .solution import (
    compatibility_residual,
    gradient_fields_from_jlm,
    integrate_path,
    propagate_direct,
)

SPEC_KEYS = (
    "lattice_x",
    "lattice_y",
    "f1",
    "f2",
    "ansatz",
    "boundary_u",
    "boundary_M",
    "u00",
    "tolerance",
    "N",
    "M",
)
TOLERANCE_ENV = "JLM_TOLERANCE"


class SpecError(ValueError):
    """Invalid problem spec (exit status 2)."""


class NumericalFailure(ArithmeticError):
    """A residual or tolerance check failed (exit status 3)."""


def default_tolerance() -> float:
    raw = os.environ.get(TOLERANCE_ENV)
    if raw is None or raw == "":
        return DEFAULT_TOLERANCE
    try:
        tol = float(raw)
    except ValueError:
        raise SpecError(f"{TOLERANCE_ENV}={raw!r} is not a number") from None
    if not (tol > 0 and math.isfinite(tol)):
        raise SpecError(f"{TOLERANCE_ENV} must be a positive finite number")
    return tol


def parse_lattice(obj: Any, key: str) -> Lattice1D:
    if not isinstance(obj, Mapping) or len(obj) != 1:
        raise SpecError(f"{key}: expected {{'uniform': {{...}}}} or {{'points': [...]}}")
    (kind, body), = obj.items()
    try:
        if kind == "uniform":
            if not isinstance(body, Mapping) or set(body) != {"x0", "h", "count"}:
                raise SpecError(f"{key}.uniform needs exactly the keys x0, h, count")
            count = body["count"]
            if isinstance(count, bool) or not isinstance(count, int):
                raise SpecError(f"{key}.uniform.count must be an integer")
            return build_uniform_lattice(float(body["x0"]), float(body["h"]), count)
        if kind == "points":
            if not isinstance(body, list):
                raise SpecError(f"{key}.points must be a list")
            return build_lattice_from_points([float(p) for p in body])
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"{key}: {exc}") from None
    raise SpecError(f"{key}: unknown lattice kind {kind!r}")


def _expr(obj: Mapping, key: str, required: bool = False) -> Expr | None:
    if key not in obj:
        if required:
            raise SpecError(f"missing required key {key!r}")
        return None
    text = obj[key]
    if not isinstance(text, str):
        raise SpecError(f"{key} must be an expression string")
    try:
        return parse(text)
    except ValueError as exc:
        raise SpecError(f"{key}: {exc}") from None


def _real(obj: Mapping, key: str, default: float) -> float:
    v = obj.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SpecError(f"{key} must be a finite number")
    return float(v)


@dataclass(frozen=True)
class ProblemSpec:
    lattice: OrthoLattice2D
    f1: Expr
    f2: Expr
    ansatz: Expr | str | None = None
    boundary_u: Expr | None = None
    boundary_M: Expr | None = None
    u00: float = 0.0
    tolerance: float = DEFAULT_TOLERANCE
    N: int = 2
    M: int = 2

    @property
    def domain(self) -> IndexDomain:
        """Solution grid ``n = 0..N-1``, ``m = 0..M-1``."""
        return IndexDomain.rectangle(0, self.N - 1, 0, self.M - 1)


def parse_spec(obj: Any) -> ProblemSpec:
    if not isinstance(obj, Mapping):
        raise SpecError("spec must be a JSON object")
    unknown = sorted(set(obj) - set(SPEC_KEYS))
    if unknown:
        raise SpecError(f"unknown spec keys: {', '.join(unknown)}")
    for key in ("lattice_x", "lattice_y"):
        if key not in obj:
            raise SpecError(f"missing required key {key!r}")
    lat = OrthoLattice2D(parse_lattice(obj["lattice_x"], "lattice_x"),
                         parse_lattice(obj["lattice_y"], "lattice_y"))
    ansatz: Expr | str | None
    if obj.get("ansatz") == "auto":
        ansatz = "auto"
    else:
        ansatz = _expr(obj, "ansatz")
    # one spare lattice point for the forward-shifted variables x1, y1
    extents = {}
    for key, axis in (("N", lat.x_axis), ("M", lat.y_axis)):
        v = obj.get(key, len(axis) - 1)
        if isinstance(v, bool) or not isinstance(v, int):
            raise SpecError(f"{key} must be an integer")
        if v < 2:
            raise SpecError(f"{key} must be at least 2")
        if v > len(axis) - 1:
            raise SpecError(f"{key}={v} needs {v + 1} lattice points, have {len(axis)}")
        extents[key] = v
    tol = _real(obj, "tolerance", default_tolerance())
    if tol <= 0:
        raise SpecError("tolerance must be positive")
    return ProblemSpec(
        lattice=lat,
        f1=_expr(obj, "f1", required=True),
        f2=_expr(obj, "f2", required=True),
        ansatz=ansatz,
        boundary_u=_expr(obj, "boundary_u"),
        boundary_M=_expr(obj, "boundary_M"),
        u00=_real(obj, "u00", 0.0),
        tolerance=tol,
        N=extents["N"],
        M=extents["M"],
    )


def load_spec(path: str | os.PathLike) -> ProblemSpec:
    """Read a JSON spec; ``OSError`` propagates for I/O trouble."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"invalid JSON: {exc}") from None
    return parse_spec(obj)


# ---------------------------------------------------------------------------
# pipeline


@dataclass
class ResultBundle:
    lattice: OrthoLattice2D
    solution: ScalarField2D
    multiplier: MultiplierField | None
    residuals: dict[str, float]
    scales: dict[str, float]
    provenance: str
    tolerance: float
    ansatz: AnsatzMatch | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def meta(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "provenance": self.provenance,
            "tolerance": self.tolerance,
            "residuals": dict(self.residuals),
            "scales": dict(self.scales),
        }
        if self.ansatz is not None:
            m = self.ansatz.member
            out["ansatz"] = {"a": m.a, "b": m.b, "s": m.s, "t": m.t, "c": self.ansatz.c}
        out.update(self.extra)
        if self.multiplier is not None:
            out["multiplier"] = grid_rows(self.lattice, self.multiplier.values)
        return out


def coefficient_fields(spec: ProblemSpec, domain: IndexDomain | None = None):
    dom = spec.domain if domain is None else domain
    return (
        bind_coefficient(spec.f1, spec.lattice, dom),
        bind_coefficient(spec.f2, spec.lattice, dom),
    )


def pde_check(u: ScalarField2D, f1, f2, lat) -> tuple[float, float]:
    """Max ``|f1 Δx u + f2 Δy u|`` and the magnitude of its two terms."""
    r = pde_residual(u, f1, f2, lat)
    dom = r.domain
    t1 = f1.on(dom) * forward_diff_x(u, lat).on(dom)
    t2 = f2.on(dom) * forward_diff_y(u, lat).on(dom)
    scale = max(float(np.max(np.abs(t1))), float(np.max(np.abs(t2))))
    return r.max_abs(), scale if scale > 0 else 1.0


def find_multiplier(spec: ProblemSpec, f1, f2) -> tuple[MultiplierField, str, AnsatzMatch | None]:
    lat, dom = spec.lattice, spec.domain
    boundary = None
    if spec.boundary_M is not None:
        boundary = bind_row(spec.boundary_M, lat, 0, spec.N - 1, 0)
    if spec.ansatz == "auto":
        match = search_ansatz_jlm(f1, f2, lat, boundary=boundary, tolerance=spec.tolerance)
        if match is None:
            raise NumericalFailure("no multiplier found")
        return match.multiplier, f"ansatz: {match.description}", match
    if spec.ansatz is not None:
        M = MultiplierField(bind_coefficient(spec.ansatz, lat, dom))
        return M, f"user-supplied: M = {to_text(spec.ansatz)}", None
    if boundary is not None:
        return solve_jlm_rowwise(f1, f2, boundary, lat), "rowwise from boundary_M", None
    raise SpecError("spec needs 'ansatz' or 'boundary_M' to obtain a multiplier")


def run_solve(spec: ProblemSpec) -> ResultBundle:
    lat, tol = spec.lattice, spec.tolerance
    f1, f2 = coefficient_fields(spec)
    M, provenance, match = find_multiplier(spec, f1, f2)
    fscale = field_scale(f1, f2)
    jlm = jlm_residual(M, f1, f2, lat).max_abs()
    if jlm > tol * fscale:
        raise NumericalFailure(
            f"multiplier residual {jlm:.3e} exceeds {tol:.1e} * {fscale:.6g}"
        )
    gx, gy = gradient_fields_from_jlm(M, f1, f2, lat)
    comp = compatibility_residual(gx, gy, lat).max_abs()
    gscale = field_scale(gx, gy)
    u = integrate_path(gx, gy, spec.u00, lat, tolerance=tol)
    pde, pscale = pde_check(u, f1, f2, lat)
    if pde > tol * pscale:
        raise NumericalFailure(f"solution residual {pde:.3e} exceeds {tol:.1e} * {pscale:.6g}")
    return ResultBundle(
        lattice=lat,
        solution=u,
        multiplier=M,
        residuals={"pde": pde, "jlm": jlm, "compatibility": comp},
        scales={"pde": pscale, "jlm": fscale, "compatibility": gscale},
        provenance=provenance,
        tolerance=tol,
        ansatz=match,
    )


def run_propagate(spec: ProblemSpec) -> ResultBundle:
    if spec.boundary_u is None:
        raise SpecError("missing boundary: propagate needs 'boundary_u'")
    lat = spec.lattice
    f1, f2 = coefficient_fields(spec)
    row = bind_row(spec.boundary_u, lat, 0, spec.N - 1, 0)
    u = propagate_direct(f1, f2, row, lat)
    if len(u.domain.rows) > 1 and u.domain.rows[0][1] > u.domain.rows[0][0]:
        pde, pscale = pde_check(u, f1, f2, lat)
    else:
        pde, pscale = 0.0, 1.0
    return ResultBundle(
        lattice=lat,
        solution=u,
        multiplier=None,
        residuals={"pde": pde},
        scales={"pde": pscale},
        provenance="direct sweep from boundary_u",
        tolerance=spec.tolerance,
    )


# ---------------------------------------------------------------------------
# export


def _g17(v: float) -> str:
    return "%.17g" % v


def grid_rows(lat: OrthoLattice2D, f: ScalarField2D) -> list[list[float]]:
    """``[n, m, x, y, value]`` for every domain cell, m outer."""
    return [[n, m, float(lat.x[n]), float(lat.y[m]), v] for n, m, v in f.items()]


def render_csv(lat: OrthoLattice2D, f: ScalarField2D) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "m", "x", "y", "u"])
    for n, m, x, y, v in grid_rows(lat, f):
        w.writerow([n, m, _g17(x), _g17(y), _g17(v)])
    return buf.getvalue()


def render_json(bundle: ResultBundle) -> str:
    doc = {
        "columns": ["n", "m", "x", "y", "u"],
        "rows": grid_rows(bundle.lattice, bundle.solution),
        "meta": bundle.meta(),
    }
    return json.dumps(doc, indent=1) + "\n"


def write_bundle(bundle: ResultBundle, out_path: str | os.PathLike, fmt: str = "csv") -> list[str]:
    """Write the grid (and for CSV a ``.meta.json`` sidecar); returns the paths written."""
    out_path = os.fspath(out_path)
    if fmt == "csv":
        files = {
            out_path: render_csv(bundle.lattice, bundle.solution),
            out_path + ".meta.json": json.dumps(bundle.meta(), indent=1) + "\n",
        }
    elif fmt == "json":
        files = {out_path: render_json(bundle)}
    else:
        raise SpecError(f"unknown format {fmt!r}")
    for path, text in files.items():
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return list(files)


def _field_from_cells(cells: dict[tuple[int, int], float]) -> ScalarField2D:
    if not cells:
        raise DomainError("no grid rows")
    ms = sorted({m for _, m in cells})
    rows = []
    for m in ms:
        ns = sorted(n for n, mm in cells if mm == m)
        if ns != list(range(ns[0], ns[-1] + 1)):
            raise DomainError(f"row m={m} is not contiguous")
        rows.append((ns[0], ns[-1]))
    if ms != list(range(ms[0], ms[-1] + 1)):
        raise DomainError("rows are not contiguous in m")
    dom = IndexDomain(ms[0], tuple(rows))
    vals = np.full(dom.box_shape, np.nan)
    for (n, m), v in cells.items():
        vals[m - dom.m0, n - dom.n_min] = v
    return ScalarField2D(dom, vals)


def read_grid_csv(path: str | os.PathLike) -> ScalarField2D:
    """Inverse of the CSV export (coordinates are dropped)."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["n", "m", "x", "y", "u"]:
            raise DomainError(f"unexpected header {header}")
        cells = {(int(r[0]), int(r[1])): float(r[4]) for r in reader}
    return _field_from_cells(cells)


def field_from_rows(rows) -> ScalarField2D:
    """Field from ``[n, m, x, y, value]`` rows as stored in JSON output."""
    return _field_from_cells({(int(r[0]), int(r[1])): float(r[4]) for r in rows})
