"""The fixture suite behind ``jlm verify-examples``.

Each check yields a maximum residual and the tolerance it must meet. The
``kind`` says whether the value is absolute or already divided by the
stated scale.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Iterator

import numpy as np

from . import continuum, special
from .core import divergence_of_minors, field_scale, minors, pde_residual
from .grid import (
    OrthoLattice2D,
    ScalarField2D,
    build_lattice_from_points,
    build_uniform_lattice,
)
from .ndcheck import (
    SolutionTuple3,
    alternating_determinant_sum,
    alternating_term_scale,
    leibniz_discrepancy,
    leibniz_scale,
    random_polynomial,
)
from .pipeline import ProblemSpec, coefficient_fields, parse_spec, run_solve
from .solution import propagate_direct


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float
    kind: str = "abs"  # "abs" or "rel"

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value) and self.value <= self.tolerance)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name}\t{self.value:.3e}\t{self.tolerance:.1e}\t{self.kind}\t{status}"


def example_spec(name: str) -> ProblemSpec:
    """Bundled spec ``example1``, ``example2`` or ``negative``."""
    text = resources.files("jlm").joinpath("data", f"{name}.json").read_text(encoding="utf-8")
    return parse_spec(json.loads(text))


def _spot(u: ScalarField2D, cells: dict[tuple[int, int], float]) -> float:
    return max(abs(u[c] - v) for c, v in cells.items())


def example1_closed_form(X, Y, x0=1.0, y0=1.0, d1=1.0, d2=1.0):
    return -0.5 * (X + x0) * (X - x0 - d1) + 0.5 * (Y + y0) * (Y - y0 - d2)


def _solve_checks(tag: str, spec: ProblemSpec, exact: ScalarField2D, spots) -> Iterator[Check]:
    try:
        b = run_solve(spec)
    except ArithmeticError:
        yield Check(f"solve.{tag}.run", float("inf"), 0.0)
        return
    yield Check(f"jlm.{tag}.residual", b.residuals["jlm"] / b.scales["jlm"], 1e-13, "rel")
    if b.ansatz is not None:
        yield Check(f"jlm.{tag}.constant", abs(b.ansatz.c - 1.0), 1e-12)
    else:
        yield Check(f"jlm.{tag}.constant", float("inf"), 1e-12)
    yield Check(f"solve.{tag}.compatibility", b.residuals["compatibility"] / b.scales["compatibility"], 1e-12, "rel")
    yield Check(f"solve.{tag}.pde", b.residuals["pde"] / b.scales["pde"], 1e-12, "rel")
    err = (b.solution - exact).max_abs()
    yield Check(f"solve.{tag}.closed_form", err, 1e-10)
    yield Check(f"solve.{tag}.spot_values", _spot(b.solution, spots), 1e-12)
    # direct sweep from the solution's first row, on a small trapezoid: the
    # sweep amplifies rounding geometrically in m for example 2
    K = min(12, spec.N)
    f1, f2 = coefficient_fields(spec)
    row = [b.solution[(n, 0)] for n in range(K)]
    v = propagate_direct(f1, f2, row, spec.lattice)
    ref = b.solution.on(v.domain)
    rel = (v - b.solution).max_abs() / max(float(np.nanmax(np.abs(ref))), 1e-300)
    yield Check(f"oracle.{tag}.propagate", rel, 1e-11, "rel")


def example1_checks() -> Iterator[Check]:
    spec = example_spec("example1")
    exact = ScalarField2D.sample(spec.lattice, spec.domain, example1_closed_form)
    yield from _solve_checks("example1", spec, exact, {(2, 1): -2.0, (1, 2): 2.0})


def example2_checks() -> Iterator[Check]:
    spec = example_spec("example2")
    exact = special.example2_closed_form(special.Example2Params(N=spec.N, M=spec.M))
    yield from _solve_checks("example2", spec, exact, {(1, 0): -0.5, (0, 1): 0.5})
    # the closed form solves the equation on its own, independent of the pipeline
    f1, f2 = coefficient_fields(spec)
    r = pde_residual(exact, f1, f2, spec.lattice)
    yield Check("special.example2.closed_form_pde", r.max_abs() / field_scale(f1, f2), 1e-13, "rel")


EULER_GAMMA = 0.5772156649015329
DIGAMMA_POINTS = np.concatenate([np.linspace(0.05, 30.0, 400), [0.5, 1.0, 2.0, 9.5, 10.0, 10.5, 100.0]])


def digamma_checks() -> Iterator[Check]:
    yield Check("special.digamma.psi1", abs(special.digamma(1.0) + EULER_GAMMA), 1e-12)
    x = DIGAMMA_POINTS
    rec = special.digamma(x + 1.0) - special.digamma(x) - 1.0 / x
    yield Check("special.digamma.recurrence", float(np.max(np.abs(rec))), 1e-13)
    yield Check(
        "special.digamma.psi_half",
        abs(special.digamma(0.5) - (-EULER_GAMMA - 2.0 * np.log(2.0))),
        1e-12,
    )


def continuous_checks(count: int = 50, seed: int = 7) -> Iterator[Check]:
    rng = np.random.default_rng(seed)
    for name, fix in continuum.FIXTURES.items():
        P = fix.sampler(rng, count)
        yield Check(f"continuum.{name}.selfcheck", continuum.self_check(fix, P, tol=np.inf), 1e-6)
        for sol, r in continuum.continuous_pde_residual(fix, P).items():
            yield Check(f"continuum.{name}.pde.{sol}", r, 1e-12)
        yield Check(f"continuum.{name}.jlm", continuum.continuous_jlm_residual(fix, P), 1e-12)
        if len(fix.solutions) == fix.dim - 1:
            yield Check(f"continuum.{name}.minors", continuum.continuous_minor_residual(fix, P), 1e-12)
        for wname, w in fix.wrong_multipliers.items():
            # must be rejected: report the inverse so that small is good
            r = continuum.continuous_jlm_residual(fix, P, multiplier=w)
            yield Check(f"continuum.{name}.rejects.{wname}", 1.0 / r if r > 0 else np.inf, 1.0)


def minors_checks(seed: int = 11) -> Iterator[Check]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        lat = OrthoLattice2D(
            build_lattice_from_points(np.cumsum(rng.uniform(0.2, 1.5, 8))),
            build_lattice_from_points(np.cumsum(rng.uniform(0.2, 1.5, 8))),
        )
        u = ScalarField2D(lat.full_domain(), rng.normal(size=lat.shape))
        A = minors(u, lat)
        d = divergence_of_minors(A, lat)
        worst = max(worst, d.max_abs() / field_scale(A.A1, A.A2))
    yield Check("minors.divergence", worst, 1e-12, "rel")


def nd_checks(seed: int = 42) -> Iterator[Check]:
    rng = np.random.default_rng(seed)
    axes = [build_uniform_lattice(1.0, 1.0, 5)] * 3
    worst = 0.0
    for _ in range(10):
        s = SolutionTuple3(random_polynomial(rng, axes), random_polynomial(rng, axes))
        worst = max(worst, alternating_determinant_sum(s).max_abs() / alternating_term_scale(s))
    yield Check("nd.alternating_sum", worst, 1e-12, "rel")
    f, g = random_polynomial(rng, axes), random_polynomial(rng, axes)
    worst = max(leibniz_discrepancy(f, g, a).max_abs() / leibniz_scale(f, g, a) for a in (1, 2, 3))
    yield Check("nd.leibniz", worst, 1e-13, "rel")


LIMIT_H = (0.1, 0.05, 0.025)


def limit_checks() -> Iterator[Check]:
    for name in ("example2-continuum", "example1-continuum", "example1-exact"):
        res = continuum.continuum_limit_rate(name, LIMIT_H)
        if res.exact:
            yield Check(f"limits.{name}.exact", 0.0, 0.0)
            continue
        for key, s in res.slopes.items():
            if s is None:
                yield Check(f"limits.{name}.{key}.exact", max(res.residuals[key]), continuum.EXACT_LEVEL)
            else:
                yield Check(f"limits.{name}.{key}.slope_error", abs(s - 1.0), 0.2)


SECTIONS: tuple[Callable[[], Iterator[Check]], ...] = (
    continuous_checks,
    example1_checks,
    example2_checks,
    digamma_checks,
    minors_checks,
    nd_checks,
    limit_checks,
)


def run_checks() -> list[Check]:
    out: list[Check] = []
    for section in SECTIONS:
        out.extend(section())
    return out
