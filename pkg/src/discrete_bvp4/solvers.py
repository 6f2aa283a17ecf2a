"""Critical points of J: damped Newton, descent-based minimisation and
deflated multistart search for many distinct solutions."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .conditions import is_odd
from .energy import energy_interior, gradient_interior, hessian_interior, residual_stencil
from .grid import GridFunction, Problem, ValidationError, make_grid_function
from .spectra import jacobi_eigh

MAX_BACKTRACKS = 40
DIVERGENCE_NORM = 1e8
STALL_RATIO = 1.0 - 1e-6  # merit must shrink by this factor ...
STALL_LIMIT = 8  # ... at least once every STALL_LIMIT iterations


@dataclass(frozen=True)
class SolverOptions:
    tol_residual: float = 1e-10
    max_iterations: int = 200
    max_step: float = 1e3
    armijo_c: float = 1e-4
    backtrack_factor: float = 0.5
    deflation_power: int = 2
    deflation_shift: float = 1.0
    distinct_tol: float = 1e-6
    start_count: int = 64
    start_radius: float = 10.0
    seed: int = 0

    def __post_init__(self):
        for name in ("tol_residual", "max_step", "deflation_shift", "distinct_tol", "start_radius"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValidationError(f"{name} must be a positive real, got {v!r}")
        for name in ("max_iterations", "deflation_power", "start_count"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 1:
                raise ValidationError(f"{name} must be a positive integer, got {v!r}")
        for name in ("armijo_c", "backtrack_factor"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValidationError(f"{name} must lie in (0, 1), got {v!r}")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise ValidationError(f"seed must be an unsigned integer, got {self.seed!r}")


class ConvergenceError(RuntimeError):
    """A solve that did not reach the residual tolerance."""

    def __init__(self, message: str, residual: float = math.nan, iterations: int = 0):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class Solution:
    y: GridFunction
    energy: float
    residual_norm: float
    classification: str
    iterations: int = 0

    @property
    def interior(self) -> np.ndarray:
        return self.y.interior


@dataclass
class SolutionSet:
    solutions: list[Solution]
    starts_used: int
    deduplicated: bool = True
    failures: int = 0
    failure_reasons: dict[str, int] = field(default_factory=dict)

    def __len__(self):
        return len(self.solutions)

    def interiors(self) -> list[np.ndarray]:
        return [s.interior for s in self.solutions]


def classify(H: np.ndarray) -> str:
    evals = jacobi_eigh(H)
    scale = float(np.max(np.abs(evals))) if evals.size else 0.0
    threshold = 1e-8 * scale
    if scale == 0.0 or np.any(np.abs(evals) <= threshold):
        return "unclassified"
    if np.all(evals > 0):
        return "minimizer"
    if np.all(evals < 0):
        return "maximizer"
    return "saddle"


def _sup(x) -> float:
    return float(np.max(np.abs(x))) if np.size(x) else 0.0


def _symmetric_solve(H: np.ndarray, rhs: np.ndarray) -> Optional[np.ndarray]:
    """Solve H d = rhs via symmetric (Bunch-Kaufman) factorisation; None if singular."""
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
            d = scipy.linalg.solve(H, rhs, assume_a="sym")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgWarning, ValueError):
        return None
    return d if np.all(np.isfinite(d)) else None


class _Deflation:
    """M(x) = prod_i (||x - x_i||^-power + shift) over found roots x_i."""

    def __init__(self, roots: Sequence[np.ndarray], power: int, shift: float):
        self.roots = [np.asarray(r, dtype=float) for r in roots]
        self.power = power
        self.shift = shift

    def __bool__(self):
        return bool(self.roots)

    def factor_and_log_grad(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        M = 1.0
        grad_log = np.zeros_like(x)
        for r in self.roots:
            diff = x - r
            dist = float(np.linalg.norm(diff))
            if dist == 0.0:
                return math.inf, grad_log
            inv = dist ** (-self.power)
            m = inv + self.shift
            M *= m
            grad_log += (-self.power * inv / dist**2) * diff / m
        return M, grad_log


def _finish(problem: Problem, x: np.ndarray, opts: SolverOptions, iterations: int) -> Solution:
    y = make_grid_function(problem.n, x)
    res = _sup(residual_stencil(problem, y))
    return Solution(
        y=y,
        energy=float(energy_interior(problem, x)),
        residual_norm=res,
        classification=classify(hessian_interior(problem, x)),
        iterations=iterations,
    )


def _newton(problem: Problem, x0: np.ndarray, opts: SolverOptions, deflation: _Deflation,
            trace: Optional[list] = None) -> tuple[np.ndarray, int]:
    x = np.array(x0, dtype=float)
    c = opts.armijo_c
    beta = opts.backtrack_factor

    def merit(z):
        g = gradient_interior(problem, z)
        if deflation:
            M, _ = deflation.factor_and_log_grad(z)
            return 0.5 * (M * M) * float(g @ g), g
        return 0.5 * float(g @ g), g

    phi, g = merit(x)
    best_phi, stalled = phi, 0
    for it in range(opts.max_iterations + 1):
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(g)) and math.isfinite(phi)):
            raise ConvergenceError(f"non-finite arithmetic at iteration {it}", math.nan, it)
        if _sup(x) > DIVERGENCE_NORM:
            raise ConvergenceError(f"diverged at iteration {it}: |y|_inf > {DIVERGENCE_NORM:g}",
                                   _sup(g), it)
        gsup = _sup(g)
        if trace is not None:
            trace.append(gsup)
        if gsup <= opts.tol_residual:
            y = make_grid_function(problem.n, x)
            if _sup(residual_stencil(problem, y)) <= opts.tol_residual:
                return x, it
        if phi < STALL_RATIO * best_phi:
            best_phi, stalled = phi, 0
        elif it > 0:
            stalled += 1
            if stalled > STALL_LIMIT:
                raise ConvergenceError(f"stagnated at iteration {it}: merit not decreasing", gsup, it)
        if it == opts.max_iterations:
            break
        H = hessian_interior(problem, x)
        d = _symmetric_solve(H, -g)
        accepted = False
        if d is not None:
            if deflation:
                M, glog = deflation.factor_and_log_grad(x)
                denom = 1.0 - float(glog @ d)
                d = d / denom if denom != 0.0 and math.isfinite(denom) else None
        if d is not None:
            dsup = _sup(d)
            scale = min(1.0, opts.max_step / dsup)
            d = d * scale
            # along the (deflated) Newton direction phi has slope -2 phi per unit step
            t = 1.0
            for _ in range(MAX_BACKTRACKS):
                xt = x + t * d
                phit, gt = merit(xt)
                if math.isfinite(phit) and phit <= (1.0 - 2.0 * c * t * scale) * phi:
                    x, phi, g = xt, phit, gt
                    accepted = True
                    break
                t *= beta
        if not accepted:
            # steepest descent on phi = 1/2 ||R||^2 with R = M g
            if deflation:
                M, glog = deflation.factor_and_log_grad(x)
                grad_phi = (M * M) * (H @ g + float(g @ g) * glog)
            else:
                grad_phi = H @ g
            slope = float(grad_phi @ grad_phi)
            if slope == 0.0 or not math.isfinite(slope):
                raise ConvergenceError(f"stagnated at iteration {it}: zero descent direction", gsup, it)
            d = -grad_phi
            dsup = _sup(d)
            t = min(1.0, opts.max_step / dsup)
            for _ in range(MAX_BACKTRACKS * 2):
                xt = x + t * d
                phit, gt = merit(xt)
                if math.isfinite(phit) and phit <= phi - c * t * slope:
                    x, phi, g = xt, phit, gt
                    accepted = True
                    break
                t *= beta
            if not accepted:
                raise ConvergenceError(f"line search failed at iteration {it}", gsup, it)
    raise ConvergenceError(
        f"no convergence after {opts.max_iterations} iterations: "
        f"final |g|_inf = {_sup(g):.3e}, trace length {it + 1}",
        _sup(g),
        opts.max_iterations,
    )


def _interior_of(problem: Problem, y0) -> np.ndarray:
    if isinstance(y0, GridFunction):
        if y0.n != problem.n:
            raise ValidationError(f"start has n={y0.n}, problem has N={problem.n}")
        return y0.interior.copy()
    x = np.asarray(y0, dtype=float).ravel()
    if x.size != problem.n:
        raise ValidationError(f"start has {x.size} values, problem has N={problem.n}")
    return x


def newton_solve(problem: Problem, y0, opts: SolverOptions = SolverOptions(),
                 found: Sequence[np.ndarray] = (), trace: Optional[list] = None) -> Solution:
    """Damped Newton on the gradient of J, optionally deflated by ``found`` roots.

    Raises ConvergenceError when the sup-norm residual does not reach
    ``opts.tol_residual``.
    """
    x0 = _interior_of(problem, y0)
    deflation = _Deflation(found, opts.deflation_power, opts.deflation_shift)
    x, its = _newton(problem, x0, opts, deflation, trace)
    return _finish(problem, x, opts, its)


def minimize(problem: Problem, y0, opts: SolverOptions = SolverOptions()) -> Solution:
    """Armijo descent on J, then Newton polish; J never increases on accepted steps.

    The descent phase ends when |g|_inf <= 10 tol or the Hessian is positive
    definite (the point is inside a convex basin, where Newton steps are
    descent directions); the polish only accepts steps that decrease J.
    """
    x = _interior_of(problem, y0)
    c, beta = opts.armijo_c, opts.backtrack_factor
    J = float(energy_interior(problem, x))
    g = gradient_interior(problem, x)
    for it in range(opts.max_iterations * 50):
        if np.linalg.norm(x) > DIVERGENCE_NORM:
            raise ConvergenceError(
                f"|y| exceeded {DIVERGENCE_NORM:g} at iteration {it}: suspected non-coercivity",
                _sup(g), it)
        if not (math.isfinite(J) and np.all(np.isfinite(g))):
            raise ConvergenceError(f"non-finite arithmetic at iteration {it}", math.nan, it)
        gsup = _sup(g)
        if gsup <= opts.tol_residual:
            sol = _finish(problem, x, opts, it)
            if sol.residual_norm <= opts.tol_residual:
                return sol
        H = hessian_interior(problem, x)
        d = None
        if gsup <= 10 * opts.tol_residual or _positive_definite(H):
            d = _symmetric_solve(H, -g)
            if d is not None and float(g @ d) >= 0:
                d = None
        if d is None:
            d = -g
        dsup = _sup(d)
        if dsup > opts.max_step:
            d = d * (opts.max_step / dsup)
        slope = float(g @ d)
        t = 1.0
        for _ in range(MAX_BACKTRACKS * 2):
            xt = x + t * d
            Jt = float(energy_interior(problem, xt))
            if math.isfinite(Jt) and Jt <= J + c * t * slope:
                break
            t *= beta
        else:
            if gsup <= 10 * opts.tol_residual:
                # J is flat to rounding here; finish with plain Newton
                return newton_solve(problem, x, opts)
            raise ConvergenceError(f"line search failed at iteration {it}", gsup, it)
        x, J = xt, Jt
        g = gradient_interior(problem, x)
    raise ConvergenceError(f"no convergence in minimize: |g|_inf = {_sup(g):.3e}", _sup(g),
                           opts.max_iterations * 50)


def _positive_definite(H: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(H)
    except np.linalg.LinAlgError:
        return False
    return True


def distinct_filter(candidates: Sequence, distinct_tol: float) -> list:
    """Greedy dedup in input order by sup-norm distance."""
    kept: list = []
    kept_x: list[np.ndarray] = []
    for cand in candidates:
        x = cand.interior if isinstance(cand, (GridFunction, Solution)) else np.asarray(cand, float)
        if all(_sup(x - k) > distinct_tol for k in kept_x):
            kept.append(cand)
            kept_x.append(x)
    return kept


def start_point(n: int, radius: float, seed: int, index: int) -> np.ndarray:
    """Start ``index`` drawn uniformly from the sup-norm ball; counter-based (Philox)."""
    rng = np.random.Generator(np.random.Philox(key=seed, counter=index))
    return rng.uniform(-radius, radius, size=n)


def _sort_key(sol: Solution):
    return (sol.energy, tuple(sol.interior.tolist()))


def deflated_search(problem: Problem, opts: SolverOptions = SolverOptions(),
                    max_solutions: Optional[int] = None) -> SolutionSet:
    found: list[Solution] = []
    roots: list[np.ndarray] = []
    failures: dict[str, int] = {}
    odd = is_odd(problem.f)

    def accept(sol: Solution) -> bool:
        if sol.residual_norm > opts.tol_residual:
            return False
        if any(_sup(sol.interior - r) <= opts.distinct_tol for r in roots):
            return False
        found.append(sol)
        roots.append(sol.interior.copy())
        return True

    starts_used = 0
    for i in range(opts.start_count):
        if max_solutions is not None and len(found) >= max_solutions:
            break
        starts_used += 1
        x0 = start_point(problem.n, opts.start_radius, opts.seed, i)
        try:
            sol = newton_solve(problem, x0, opts, found=roots)
        except ConvergenceError as exc:
            reason = str(exc).split(" at iteration")[0].split(":")[0]
            failures[reason] = failures.get(reason, 0) + 1
            continue
        if accept(sol) and odd:
            mirror = -sol.interior
            if _sup(gradient_interior(problem, mirror)) <= opts.tol_residual:
                if max_solutions is None or len(found) < max_solutions:
                    accept(_finish(problem, mirror, opts, 0))

    found.sort(key=_sort_key)
    return SolutionSet(
        solutions=found,
        starts_used=starts_used,
        deduplicated=True,
        failures=sum(failures.values()),
        failure_reasons=dict(sorted(failures.items())),
    )
