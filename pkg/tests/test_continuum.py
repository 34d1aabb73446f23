import dataclasses

import numpy as np
import pytest

from jlm.continuum import (
    E4,
    FIXTURES,
    LIMIT_PROBLEMS,
    PLANAR,
    FixtureError,
    Rule,
    continuous_jlm_residual,
    continuous_minor_residual,
    continuous_pde_residual,
    continuum_limit_rate,
    self_check,
)

H_SEQ = (0.1, 0.05, 0.025)


@pytest.fixture
def probes():
    rng = np.random.default_rng(99)
    return {name: fix.sampler(rng, 50) for name, fix in FIXTURES.items()}


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_self_check(name, probes):
    assert self_check(FIXTURES[name], probes[name]) <= 1e-6


def test_self_check_catches_wrong_derivative(probes):
    broken = Rule(value=lambda P: P[0] * P[1], grad=lambda P: (P[1], 2 * P[0], 0 * P[0]))
    fix = dataclasses.replace(E4, solutions={"u": broken})
    with pytest.raises(FixtureError, match="self-check"):
        self_check(fix, probes["e4"])


def test_planar_solution(probes):
    assert continuous_pde_residual(PLANAR, probes["planar"])["u"] <= 1e-13


def test_e4_solutions(probes):
    r = continuous_pde_residual(E4, probes["e4"])
    assert r["u"] <= 1e-13
    assert r["v"] <= 1e-12


def test_planar_multiplier_is_exact(probes):
    assert continuous_jlm_residual(PLANAR, probes["planar"]) == 0.0


def test_e4_multiplier(probes):
    assert continuous_jlm_residual(E4, probes["e4"]) <= 1e-13


def test_e4_wrong_multiplier(probes):
    P = probes["e4"]
    r = continuous_jlm_residual(E4, P, multiplier=E4.wrong_multipliers["one"])
    # residual is the divergence 2(x - y)
    assert r == pytest.approx(float(np.max(np.abs(2 * (P[0] - P[1])))), rel=1e-12)
    assert r > 0.1


def test_minors_equal_multiplier_times_coefficients(probes):
    assert continuous_minor_residual(E4, probes["e4"]) <= 1e-12
    assert continuous_minor_residual(PLANAR, probes["planar"]) <= 1e-12


def test_point_outside_domain():
    with pytest.raises(FixtureError, match="outside"):
        continuous_pde_residual(E4, np.array([[1.0], [1.0], [0.0]]))
    with pytest.raises(FixtureError, match="shape"):
        continuous_pde_residual(E4, np.zeros((2, 3)))


def test_vanishing_multiplier():
    zero = Rule(value=lambda P: 0 * P[0], grad=lambda P: (0 * P[0], 0 * P[0]))
    with pytest.raises(FixtureError, match="vanishes"):
        continuous_jlm_residual(PLANAR, np.ones((2, 3)), multiplier=zero)


def test_limit_example2_continuum():
    res = continuum_limit_rate("example2-continuum", H_SEQ)
    assert not res.exact
    for key in ("pde", "jlm"):
        assert abs(res.slopes[key] - 1.0) <= 0.2
    assert res.passes()


def test_limit_exact_solution_is_flagged():
    res = continuum_limit_rate("example1-exact", H_SEQ)
    assert res.exact
    assert all(s is None for s in res.slopes.values())
    assert max(res.residuals["pde"]) <= 1e-12
    assert res.passes()


def test_limit_accepts_problem_object():
    res = continuum_limit_rate(LIMIT_PROBLEMS["example1-continuum"], H_SEQ)
    assert abs(res.slopes["pde"] - 1.0) <= 0.2
    assert res.slopes["jlm"] is None


@pytest.mark.parametrize(
    "arg, hs, msg",
    [
        ("example2-continuum", (0.1, 0.05), "need ≥3 points"),
        ("bogus", H_SEQ, "unknown fixture"),
        ("example2-continuum", (0.05, 0.1, 0.025), "strictly decreasing"),
    ],
)
def test_limit_errors(arg, hs, msg):
    with pytest.raises(FixtureError, match=msg):
        continuum_limit_rate(arg, hs)
