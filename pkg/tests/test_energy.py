import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from discrete_bvp4.energy import (
    antiderivative_F,
    energy,
    energy_interior,
    gradient_interior,
    gradient_quadratic_form,
    hessian,
    residual_stencil,
)
from discrete_bvp4.grid import PolyNonlinearity, Problem, ValidationError, make_grid_function, zero

from conftest import CUBIC, EXAMPLE, uniform


def test_antiderivative_examples():
    assert antiderivative_F(PolyNonlinearity.shared((0, 1)), 1, 2.0) == 2.0
    assert antiderivative_F(PolyNonlinearity.shared(EXAMPLE), 1, 1.0) == pytest.approx(7 / 12, abs=1e-15)
    assert antiderivative_F(PolyNonlinearity.shared(CUBIC), 1, 0.0) == 0.0


def test_energy_of_theta_is_zero(cubic2):
    assert energy(cubic2, zero(2)).total == 0.0


@pytest.mark.parametrize(
    "coeffs, p_term, q_term, total",
    [((0.0,), 3.0, 1.0, 2.0), ((0.0, 1.0), 3.0, 1.0, 2.5)],
)
def test_energy_breakdown(coeffs, p_term, q_term, total):
    e = energy(uniform(1, coeffs), make_grid_function(1, (1.0,)))
    assert (e.p_term, e.q_term, e.total) == (p_term, q_term, total)
    assert e.quadratic == p_term - q_term


def test_gradient_examples(linear1, cubic1):
    np.testing.assert_array_equal(gradient_quadratic_form(linear1, make_grid_function(1, (1.0,))), [5.0])
    g = gradient_quadratic_form(cubic1, make_grid_function(1, (math.sqrt(48),)))
    assert abs(g[0]) < 1e-12
    np.testing.assert_array_equal(gradient_quadratic_form(cubic1, zero(1)), [0.0])


def test_residual_examples():
    y0 = zero(1)
    np.testing.assert_array_equal(residual_stencil(uniform(1, EXAMPLE), y0), [0.0])
    np.testing.assert_array_equal(residual_stencil(uniform(1, (1.0, 1.0, 0.0, 1 / 3)), y0), [1.0])
    np.testing.assert_array_equal(
        residual_stencil(uniform(2, (0.0,)), make_grid_function(2, (1.0, 0.0))), [4.0, -3.0]
    )


def test_hessian_examples(linear1, cubic1):
    np.testing.assert_array_equal(hessian(linear1, make_grid_function(1, (7.0,))), [[5.0]])
    np.testing.assert_array_equal(hessian(cubic1, zero(1)), [[-16.0]])
    np.testing.assert_array_equal(hessian(uniform(2, (0.0,)), zero(2)), [[4.0, -3.0], [-3.0, 4.0]])


def test_dimension_mismatch_rejected(cubic2):
    y = zero(3)
    for fn in (energy, gradient_quadratic_form, residual_stencil, hessian):
        with pytest.raises(ValidationError):
            fn(cubic2, y)


@st.composite
def problems_and_points(draw, n_max=8):
    n = draw(st.integers(1, n_max))
    val = st.floats(-3, 3, allow_nan=False)
    p = np.array(draw(st.lists(val, min_size=n + 2, max_size=n + 2)))
    q = np.array(draw(st.lists(val, min_size=n + 1, max_size=n + 1)))
    if draw(st.booleans()):
        f = PolyNonlinearity.shared(draw(st.lists(st.floats(-1, 1), min_size=1, max_size=4)))
    else:
        f = PolyNonlinearity.per_k(
            [draw(st.lists(st.floats(-1, 1), min_size=1, max_size=4)) for _ in range(n)]
        )
    x = np.array(draw(st.lists(val, min_size=n, max_size=n)))
    return Problem(n, p, q, f), x


@given(problems_and_points())
def test_gradient_forms_agree(case):
    problem, x = case
    y = make_grid_function(problem.n, x)
    np.testing.assert_allclose(gradient_quadratic_form(problem, y), residual_stencil(problem, y),
                               rtol=0, atol=1e-12)


@given(problems_and_points(), st.integers(0, 2**32 - 1))
def test_gradient_matches_central_differences(case, seed):
    problem, x = case
    h = np.random.default_rng(seed).uniform(-1, 1, problem.n)
    eps = 1e-5
    fd = (energy_interior(problem, x + eps * h) - energy_interior(problem, x - eps * h)) / (2 * eps)
    g = gradient_interior(problem, x) @ h
    assert abs(fd - g) <= 1e-6 * max(1.0, abs(g))


@given(problems_and_points())
def test_energy_forms_agree(case):
    problem, x = case
    assert energy(problem, make_grid_function(problem.n, x)).total == pytest.approx(
        energy_interior(problem, x), rel=1e-12, abs=1e-12)


@given(problems_and_points())
def test_hessian_symmetric_and_matches_gradient_jacobian(case):
    problem, x = case
    H = hessian(problem, make_grid_function(problem.n, x))
    np.testing.assert_array_equal(H, H.T)
    eps = 1e-6
    J = np.column_stack([
        (gradient_interior(problem, x + eps * e) - gradient_interior(problem, x - eps * e)) / (2 * eps)
        for e in np.eye(problem.n)
    ])
    np.testing.assert_allclose(H, J, atol=1e-5 * max(1.0, np.abs(H).max()))


@given(problems_and_points())
def test_gradient_is_linear_when_f_vanishes(case):
    problem, x = case
    lin = Problem(problem.n, problem.p, problem.q, PolyNonlinearity.shared((0.0,)))
    z = x[::-1].copy()
    np.testing.assert_allclose(gradient_interior(lin, x + z),
                               gradient_interior(lin, x) + gradient_interior(lin, z), atol=1e-12)


def test_batched_energy_matches_rows(cubic2, rng):
    X = rng.uniform(-5, 5, (7, 2))
    batch = energy_interior(cubic2, X)
    rows = [energy(cubic2, make_grid_function(2, x)).total for x in X]
    np.testing.assert_allclose(batch, rows, rtol=1e-13)
