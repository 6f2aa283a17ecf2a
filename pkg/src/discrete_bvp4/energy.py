"""Energy functional J, its gradient (two independent forms) and Hessian.

    J(y) = sum_{k=1}^{N+2} p(k)/2 (Δ²y(k-2))² - sum_{k=1}^{N+1} q(k)/2 (Δy(k-1))²
           + sum_{k=1}^{N} F(k, y(k)),   F(k, s) = ∫_0^s f(k, t) dt.

The matrix-form gradient is the reference; ``residual_stencil`` evaluates the
left-hand side of the difference equation directly and must agree with it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import (
    GridFunction,
    PolyNonlinearity,
    Problem,
    ValidationError,
    _check_k,
    eval_f_vector,
    forward_diff,
    horner,
    horner_rows,
    poly_antiderivative,
    second_diff,
)
from .spectra import difference_matrices


@dataclass(frozen=True)
class EnergyBreakdown:
    p_term: float
    q_term: float
    f_term: float
    total: float

    @property
    def quadratic(self) -> float:
        """p_term - q_term: the quadratic part of J."""
        return self.p_term - self.q_term


def _check_dims(problem: Problem, y: GridFunction):
    if y.n != problem.n:
        raise ValidationError(f"grid function has n={y.n}, problem has N={problem.n}")


def antiderivative_F(f: PolyNonlinearity, k: int, s, n: int | None = None):
    _check_k(f, k, n)
    return horner(poly_antiderivative(f.coeffs(k)), s)


def _antiderivative_table(f: PolyNonlinearity, n: int) -> np.ndarray:
    return f.antiderivative().table(n)


def _derivative_table(f: PolyNonlinearity, n: int) -> np.ndarray:
    return f.derivative().table(n)


def energy(problem: Problem, y: GridFunction) -> EnergyBreakdown:
    _check_dims(problem, y)
    w = second_diff(y.values)  # Δ²y(k-2), k = 1..N+2
    v = forward_diff(y.values[1:-1])  # Δy(k-1), k = 1..N+1
    p_term = 0.5 * float(np.sum(problem.p * w * w))
    q_term = 0.5 * float(np.sum(problem.q * v * v))
    F = horner_rows(_antiderivative_table(problem.f, problem.n), y.interior)
    f_term = float(np.sum(F))
    return EnergyBreakdown(p_term, q_term, f_term, p_term - q_term + f_term)


def energy_interior(problem: Problem, x: np.ndarray) -> float:
    """J evaluated directly on interior values (batched over leading axes)."""
    vals = np.pad(np.asarray(x, dtype=float), [(0, 0)] * (np.ndim(x) - 1) + [(2, 2)])
    w = second_diff(vals)
    v = forward_diff(vals[..., 1:-1])
    F = horner_rows(_antiderivative_table(problem.f, problem.n), np.asarray(x, dtype=float))
    return (
        0.5 * np.sum(problem.p * w * w, axis=-1)
        - 0.5 * np.sum(problem.q * v * v, axis=-1)
        + np.sum(F, axis=-1)
    )


def gradient_interior(problem: Problem, x: np.ndarray) -> np.ndarray:
    """Matrix-form gradient Wᵀ P W x - Vᵀ Q V x + f(., x) (batched over leading axes)."""
    V, W, _, _ = difference_matrices(problem.n)
    x = np.asarray(x, dtype=float)
    pw = (x @ W.T) * problem.p
    qv = (x @ V.T) * problem.q
    return pw @ W - qv @ V + eval_f_vector(problem.f, x)


def gradient_quadratic_form(problem: Problem, y: GridFunction) -> np.ndarray:
    _check_dims(problem, y)
    return gradient_interior(problem, y.interior)


def residual_stencil(problem: Problem, y: GridFunction) -> np.ndarray:
    """Δ²(p(k)Δ²y(k-2)) + Δ(q(k)Δy(k-1)) + f(k, y(k)) for k = 1..N."""
    _check_dims(problem, y)
    # u(k) = p(k) Δ²y(k-2) on k = 1..N+2
    u = problem.p * second_diff(y.values)
    # r(k) = q(k) Δy(k-1) on k = 1..N+1
    r = problem.q * forward_diff(y.values[1:-1])
    fourth = second_diff(u)  # Δ²u(k), k = 1..N
    second = forward_diff(r)  # Δr(k), k = 1..N
    return fourth + second + eval_f_vector(problem.f, y.interior)


def hessian_interior(problem: Problem, x: np.ndarray) -> np.ndarray:
    V, W, _, _ = difference_matrices(problem.n)
    H = W.T @ (problem.p[:, None] * W) - V.T @ (problem.q[:, None] * V)
    fprime = horner_rows(_derivative_table(problem.f, problem.n), np.asarray(x, dtype=float))
    H = H + np.diag(fprime)
    return np.triu(H) + np.triu(H, 1).T


def hessian(problem: Problem, y: GridFunction) -> np.ndarray:
    _check_dims(problem, y)
    return hessian_interior(problem, y.interior)
