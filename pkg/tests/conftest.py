import numpy as np
import pytest
from hypothesis import settings

from discrete_bvp4.grid import PolyNonlinearity, Problem

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

THIRD = 1.0 / 3.0
CUBIC = (0.0, -20.0, 0.0, THIRD)  # s^3/3 - 20 s
EXAMPLE = (0.0, 1.0, 0.0, THIRD)  # s^3/3 + s


def uniform(n, coeffs, p=1.0, q=1.0):
    return Problem.uniform(n, PolyNonlinearity.shared(coeffs), p=p, q=q)


@pytest.fixture
def cubic1():
    return uniform(1, CUBIC)


@pytest.fixture
def cubic2():
    return uniform(2, CUBIC)


@pytest.fixture
def example2():
    return uniform(2, EXAMPLE)


@pytest.fixture
def linear1():
    return uniform(1, (0.0, 1.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
