import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jlm.errors import DomainError
from jlm.grid import build_uniform_lattice
from jlm.ndcheck import (
    Grid3D,
    SolutionTuple3,
    alternating_determinant_sum,
    alternating_term_scale,
    forward_diff_3d,
    leibniz_discrepancy,
    leibniz_scale,
    minor_fields_3d,
    naive_divergence_sum,
    random_linear,
    random_polynomial,
)

from conftest import random_axis


def uniform_axes(count, h=1.0, x0=1.0):
    return [build_uniform_lattice(x0, h, count)] * 3


def test_diff_of_coordinate():
    axes = uniform_axes(4, h=0.5)
    u = Grid3D.sample(axes, lambda x, y, z: x + 0 * y + 0 * z)
    d1 = forward_diff_3d(u, 1)
    assert np.all(d1.values == 1.0)
    assert forward_diff_3d(d1, 2).max_abs() == 0.0


def test_diff_commutes_on_product(rng):
    axes = [random_axis(rng, 5) for _ in range(3)]
    u = Grid3D.sample(axes, lambda x, y, z: x * y + 0 * z)
    a = forward_diff_3d(forward_diff_3d(u, 1), 2)
    b = forward_diff_3d(forward_diff_3d(u, 2), 1)
    assert a.max_abs() > 0
    assert np.max(np.abs(a.values - b.values)) <= 1e-15 * a.max_abs()


def test_diff_errors():
    u = Grid3D(([0.0], [0.0, 1.0], [0.0, 1.0]), np.zeros((1, 2, 2)))
    with pytest.raises(DomainError):
        forward_diff_3d(u, 1)
    with pytest.raises(DomainError):
        forward_diff_3d(u, 4)
    with pytest.raises(DomainError):
        forward_diff_3d(u, 0)


def test_grid_validation():
    with pytest.raises(DomainError):
        Grid3D(([0.0, 0.0], [0.0], [0.0]), np.zeros((2, 1, 1)))
    with pytest.raises(DomainError):
        Grid3D(([0.0], [0.0], [0.0]), np.full((1, 1, 1), np.nan))
    with pytest.raises(DomainError):
        Grid3D(([0.0, 1.0], [0.0], [0.0]), np.zeros((1, 1, 1)))


def test_unit_minors():
    axes = uniform_axes(4)
    x1 = Grid3D.sample(axes, lambda x, y, z: x + 0 * (y + z))
    x2 = Grid3D.sample(axes, lambda x, y, z: y + 0 * (x + z))
    A1, A2, A3 = minor_fields_3d(SolutionTuple3(x1, x2))
    assert A1.max_abs() == 0 and A2.max_abs() == 0 and np.all(A3.values == 1.0)
    assert np.all(minor_fields_3d(SolutionTuple3(x2, x1))[2].values == -1.0)


def test_solution_tuple_requires_common_grid():
    a = Grid3D.sample(uniform_axes(4), lambda x, y, z: x)
    b = Grid3D.sample(uniform_axes(5), lambda x, y, z: x)
    with pytest.raises(DomainError):
        SolutionTuple3(a, b)


@pytest.mark.parametrize("seed", range(10))
def test_alternating_sum_random_polynomials(seed):
    rng = np.random.default_rng(seed)
    s = SolutionTuple3(random_polynomial(rng, uniform_axes(5)), random_polynomial(rng, uniform_axes(5)))
    assert alternating_determinant_sum(s).max_abs() <= 1e-12 * alternating_term_scale(s)


def test_alternating_sum_linear_is_exactly_zero(rng):
    s = SolutionTuple3(random_linear(rng, uniform_axes(5)), random_linear(rng, uniform_axes(5)))
    assert alternating_determinant_sum(s).max_abs() == 0.0
    assert naive_divergence_sum(s).max_abs() == 0.0


def test_alternating_sum_nonuniform_stress(rng):
    axes = [random_axis(rng, 6) for _ in range(3)]
    s = SolutionTuple3(
        Grid3D.sample(axes, lambda x, y, z: x * y * z),
        Grid3D.sample(axes, lambda x, y, z: x**2 + 0 * (y + z)),
    )
    assert alternating_determinant_sum(s).max_abs() <= 1e-12 * alternating_term_scale(s)


def test_alternating_sum_needs_three_points():
    u = Grid3D.sample(uniform_axes(2), lambda x, y, z: x * y * z)
    with pytest.raises(DomainError):
        alternating_determinant_sum(SolutionTuple3(u, u))
    with pytest.raises(DomainError):
        naive_divergence_sum(SolutionTuple3(u, u))


@settings(max_examples=50)
@given(st.integers(0, 2**31), st.integers(4, 6), st.booleans())
def test_alternating_sum_property(seed, size, uniform):
    rng = np.random.default_rng(seed)
    axes = uniform_axes(size, h=rng.uniform(0.2, 2)) if uniform else [random_axis(rng, size) for _ in range(3)]
    s = SolutionTuple3(random_polynomial(rng, axes), random_polynomial(rng, axes))
    assert alternating_determinant_sum(s).max_abs() <= 1e-12 * alternating_term_scale(s)


def naive_fixture(h):
    axes = [build_uniform_lattice(1.0, h, int(round(1.0 / h)) + 1)] * 3
    return SolutionTuple3(
        Grid3D.sample(axes, lambda x, y, z: x**2 * y + 0 * z),
        Grid3D.sample(axes, lambda x, y, z: x * z + 0 * y),
    )


def test_naive_divergence_is_nonzero():
    axes = uniform_axes(5)
    s = SolutionTuple3(
        Grid3D.sample(axes, lambda x, y, z: x**2 * y + 0 * z),
        Grid3D.sample(axes, lambda x, y, z: x * z + 0 * y),
    )
    assert naive_divergence_sum(s).max_abs() > 1e-3
    assert alternating_determinant_sum(s).max_abs() <= 1e-12 * alternating_term_scale(s)


def test_naive_divergence_of_decoupled_pair_vanishes():
    # u2 = z alone makes every product-rule correction vanish
    axes = uniform_axes(5)
    s = SolutionTuple3(
        Grid3D.sample(axes, lambda x, y, z: x**2 * y + 0 * z),
        Grid3D.sample(axes, lambda x, y, z: z + 0 * (x + y)),
    )
    assert naive_divergence_sum(s).max_abs() == 0.0


def test_naive_divergence_shrinks_linearly():
    hs = [1 / 4, 1 / 8, 1 / 16]
    gaps = [naive_divergence_sum(naive_fixture(h)).max_abs() for h in hs]
    slope = np.polyfit(np.log(hs), np.log(gaps), 1)[0]
    assert abs(slope - 1.0) <= 0.3


def test_leibniz_random_nonuniform(rng):
    axes = [random_axis(rng, 6) for _ in range(3)]
    f = Grid3D(tuple(a.points for a in axes), rng.normal(size=(6, 6, 6)))
    g = Grid3D(tuple(a.points for a in axes), rng.normal(size=(6, 6, 6)))
    for axis in (1, 2, 3):
        assert leibniz_discrepancy(f, g, axis).max_abs() <= 1e-13 * leibniz_scale(f, g, axis)


def test_leibniz_with_constant_factor(rng):
    axes = uniform_axes(5)
    f = Grid3D(tuple(a.points for a in axes), rng.normal(size=(5, 5, 5)))
    g = Grid3D.sample(axes, lambda x, y, z: 2.0 + 0 * x)
    # scaling by 2 is exact in binary, so the difference is exactly zero
    dfg = forward_diff_3d(f * g, 1).values
    assert np.all(dfg - 2.0 * forward_diff_3d(f, 1).values == 0.0)
    assert leibniz_discrepancy(f, g, 1).max_abs() <= 1e-15 * leibniz_scale(f, g, 1)


def test_leibniz_square_by_hand():
    axes = uniform_axes(6)
    x = Grid3D.sample(axes, lambda x, y, z: x + 0 * (y + z))
    d = forward_diff_3d(x * x, 1)
    xs = np.asarray(axes[0].points[:-1])
    assert np.array_equal(d.values[:, 0, 0], 2 * xs + 1)
    assert leibniz_discrepancy(x, x, 1).max_abs() == 0.0


@given(st.integers(0, 2**31))
def test_leibniz_property(seed):
    rng = np.random.default_rng(seed)
    axes = [random_axis(rng, 4) for _ in range(3)]
    f = random_polynomial(rng, axes)
    g = random_polynomial(rng, axes)
    axis = int(rng.integers(1, 4))
    assert leibniz_discrepancy(f, g, axis).max_abs() <= 1e-13 * leibniz_scale(f, g, axis)
