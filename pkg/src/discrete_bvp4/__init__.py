"""Variational solver and hypothesis checker for fourth-order discrete
Dirichlet boundary value problems

    Δ²(p(k)Δ²y(k-2)) + Δ(q(k)Δy(k-1)) + f(k, y(k)) = 0,  k = 1..N,
    y(-1) = y(0) = y(N+1) = y(N+2) = 0.
"""
from .conditions import check_all
from .energy import energy, gradient_quadratic_form, hessian, residual_stencil
from .grid import GridFunction, PolyNonlinearity, Problem, make_grid_function
from .solvers import SolverOptions, deflated_search, minimize, newton_solve
from .spectra import spectral_bounds

__all__ = [
    "GridFunction",
    "PolyNonlinearity",
    "Problem",
    "SolverOptions",
    "check_all",
    "deflated_search",
    "energy",
    "gradient_quadratic_form",
    "hessian",
    "make_grid_function",
    "minimize",
    "newton_solve",
    "residual_stencil",
    "spectral_bounds",
]
