import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from jlm.grid import OrthoLattice2D, build_lattice_from_points, build_uniform_lattice

settings.register_profile(
    "jlm", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("jlm")


def random_axis(rng, count, lo=0.5, hi=1.5, start=1.0):
    return build_lattice_from_points(start + np.concatenate([[0.0], np.cumsum(rng.uniform(lo, hi, count - 1))]))


def random_lattice(rng, nx, ny=None):
    return OrthoLattice2D(random_axis(rng, nx), random_axis(rng, ny or nx))


def uniform_lattice(count, x0=1.0, h=1.0):
    axis = build_uniform_lattice(x0, h, count)
    return OrthoLattice2D(axis, axis)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
