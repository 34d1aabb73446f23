"""``jlm`` command-line front end."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from . import continuum
from .core import field_scale, jlm_residual, search_ansatz_jlm
from .errors import (
    CompatibilityError,
    DomainError,
    ExprEvalError,
    ExprSyntaxError,
    LatticeError,
    ZeroValueError,
)
from .expr import bind_row
from .grid import build_uniform_lattice
from .ndcheck import (
    SolutionTuple3,
    alternating_determinant_sum,
    alternating_term_scale,
    naive_divergence_sum,
    random_linear,
    random_polynomial,
)
from .pipeline import (
    NumericalFailure,
    SpecError,
    coefficient_fields,
    load_spec,
    run_propagate,
    run_solve,
    write_bundle,
)
from .suite import LIMIT_H, run_checks

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_SPEC = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


def _err(msg: str) -> None:
    print(f"jlm: error: {msg}", file=sys.stderr)


def cmd_verify_examples(args) -> int:
    checks = run_checks()
    for c in checks:
        print(c.line())
    failed = [c.name for c in checks if not c.passed]
    print(f"# {len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_OK if not failed else EXIT_FAIL


def cmd_solve(args) -> int:
    spec = load_spec(args.spec)
    bundle = run_solve(spec)
    for path in write_bundle(bundle, args.out, args.format):
        print(f"wrote {path}")
    r = bundle.residuals
    print(f"provenance: {bundle.provenance}")
    print(f"residuals: pde {r['pde']:.3e}, jlm {r['jlm']:.3e}, compatibility {r['compatibility']:.3e}")
    return EXIT_OK


def cmd_jlm_search(args) -> int:
    spec = load_spec(args.spec)
    f1, f2 = coefficient_fields(spec)
    boundary = None
    if spec.boundary_M is not None:
        boundary = bind_row(spec.boundary_M, spec.lattice, 0, spec.N - 1, 0)
    match = search_ansatz_jlm(f1, f2, spec.lattice, boundary=boundary, tolerance=spec.tolerance)
    if match is None:
        print("none")
        return EXIT_OK
    rel = jlm_residual(match.multiplier, f1, f2, spec.lattice).max_abs() / field_scale(f1, f2)
    print(f"{match.description}, c = {match.c!r}, residual {rel:.0e}")
    return EXIT_OK


def cmd_propagate(args) -> int:
    spec = load_spec(args.spec)
    bundle = run_propagate(spec)
    for path in write_bundle(bundle, args.out, args.format):
        print(f"wrote {path}")
    print(f"rows: {len(bundle.solution.domain.rows)}, pde residual {bundle.residuals['pde']:.3e}")
    return EXIT_OK


def cmd_ndcheck(args) -> int:
    if args.size < 4:
        raise SpecError(f"size must be at least 4, got {args.size}")
    rng = np.random.default_rng(args.seed)
    axes = [build_uniform_lattice(1.0, 1.0, args.size)] * 3
    make = random_linear if args.linear else random_polynomial
    s = SolutionTuple3(make(rng, axes), make(rng, axes))
    alt = alternating_determinant_sum(s).max_abs()
    scale = alternating_term_scale(s)
    naive = naive_divergence_sum(s).max_abs()
    ok = alt <= 1e-12 * scale
    print(f"alternating_sum_max\t{alt:.3e}")
    print(f"term_scale\t{scale:.3e}")
    print(f"naive_divergence_max\t{naive:.3e}")
    print(f"identity\t{'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_limits(args) -> int:
    res = continuum.continuum_limit_rate(args.fixture, LIMIT_H)
    hs = ", ".join(f"{h:g}" for h in res.h)
    if res.exact:
        print(f"{res.problem}: exact at machine precision over h in {{{hs}}}")
    else:
        for key, s in res.slopes.items():
            vals = ", ".join(f"{v:.3e}" for v in res.residuals[key])
            if s is None:
                print(f"{res.problem}: {key} residual exact at machine precision")
            else:
                print(f"{res.problem}: {key} order {s:.3f} (residuals {vals})")
    ok = res.passes(1.0, 0.2)
    print(f"expected order 1 +/- 0.2: {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="jlm",
        description="Multiplier-based solver and checks for first-order linear difference equations.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify-examples", help="run the bundled fixture suite")
    s.set_defaults(func=cmd_verify_examples)

    s = sub.add_parser("solve", help="find a multiplier and integrate a solution")
    s.add_argument("--spec", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("jlm-search", help="search the power-law multiplier family")
    s.add_argument("--spec", required=True)
    s.set_defaults(func=cmd_jlm_search)

    s = sub.add_parser("propagate", help="sweep boundary_u forward in m")
    s.add_argument("--spec", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_propagate)

    s = sub.add_parser("ndcheck", help="three-dimensional determinant identity")
    s.add_argument("--size", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--linear", action="store_true", help="use affine fields")
    s.set_defaults(func=cmd_ndcheck)

    s = sub.add_parser("limits", help="convergence order of lattice residuals")
    s.add_argument("--fixture", required=True)
    s.set_defaults(func=cmd_limits)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SpecError, ExprSyntaxError, ExprEvalError, LatticeError, continuum.FixtureError) as exc:
        _err(str(exc))
        return EXIT_SPEC
    except (NumericalFailure, CompatibilityError, ZeroValueError) as exc:
        _err(str(exc))
        return EXIT_NUMERIC
    except DomainError as exc:
        _err(str(exc))
        return EXIT_SPEC
    except OSError as exc:
        _err(str(exc))
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
