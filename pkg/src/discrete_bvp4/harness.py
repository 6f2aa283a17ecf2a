"""Independent verification: a brute-force critical-point oracle for N <= 3
and sampling suites for the norm inequalities and the gradient identity."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .energy import energy_interior, gradient_interior, gradient_quadratic_form, residual_stencil
from .grid import (
    PolyNonlinearity,
    Problem,
    ValidationError,
    embed,
    forward_diff,
    make_grid_function,
    second_diff,
)
from .solvers import ConvergenceError, SolverOptions, distinct_filter, newton_solve
from .spectra import gram, is_positive_definite, jacobi_eigh, spectral_bounds

ORACLE_MAX_N = 3
ORACLE_CELL_BUDGET = 10**8
ORACLE_DISTINCT = 1e-6
SUITE_SLACK = 1e-9


class BudgetError(ValidationError):
    pass


@dataclass(frozen=True)
class OracleResult:
    critical_points: list[tuple[float, ...]]
    scan_radius: float
    grid_step: float
    refined: bool = True
    seeds: int = 0


@dataclass
class SuiteReport:
    name: str
    passed: bool
    stats: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        parts = ", ".join(f"{k}={v:.12g}" if isinstance(v, float) else f"{k}={v}"
                          for k, v in self.stats.items())
        return f"{status} {self.name}: {parts}"


# --- oracle ---------------------------------------------------------------------


def _axis(radius: float, step: float) -> np.ndarray:
    m = int(np.floor(2 * radius / step + 1e-9)) + 1
    return -radius + step * np.arange(m)


def oracle_node_count(n: int, radius: float, step: float) -> int:
    return _axis(radius, step).size ** n


def _slab_gradient(problem: Problem, axis: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Gradient on nodes with first-axis index in [lo, hi); shape (hi-lo, m, ..., N)."""
    n = problem.n
    grids = np.meshgrid(axis[lo:hi], *([axis] * (n - 1)), indexing="ij")
    X = np.stack(grids, axis=-1)
    return gradient_interior(problem, X)


def brute_force_oracle(problem: Problem, radius: float = 10.0, step: float = 0.05,
                       slab: int = 64) -> OracleResult:
    """Scan [-R, R]^N for critical points and refine every candidate by Newton.

    A cell seeds a refinement when each gradient component changes sign over
    its vertices; interior nodes that are local minima of |g|^2 below
    1e-2 * max |g|^2 also seed one (catches tangential zeros).
    """
    n = problem.n
    if n > ORACLE_MAX_N:
        raise ValidationError(f"oracle supports N <= {ORACLE_MAX_N}, got N={n}")
    if not (radius > 0 and step > 0):
        raise ValidationError("radius and step must be positive")
    axis = _axis(radius, step)
    m = axis.size
    if m**n > ORACLE_CELL_BUDGET:
        raise BudgetError(
            f"grid needs {m}^{n} = {m**n} nodes, budget is {ORACLE_CELL_BUDGET}"
        )

    seeds: list[np.ndarray] = []
    local_min: list[tuple[float, np.ndarray]] = []
    gmax = 0.0
    offsets = list(itertools.product((0, 1), repeat=n))
    nbr_offsets = [o for o in itertools.product((-1, 0, 1), repeat=n) if any(o)]
    for lo in range(0, m - 1, slab):
        hi = min(lo + slab + 1, m)  # nodes lo..hi-1, cells lo..hi-2
        hlo, hhi = max(lo - 1, 0), min(hi + 1, m)  # with a one-node halo
        G = _slab_gradient(problem, axis, hlo, hhi)
        g2 = np.sum(G * G, axis=-1)
        gmax = max(gmax, float(g2.max()))
        core = G[lo - hlo : hi - hlo]
        # cells: vertex-wise min/max of each component
        cell_shape = tuple(s - 1 for s in core.shape[:-1])
        vmin = np.full(cell_shape + (n,), np.inf)
        vmax = np.full(cell_shape + (n,), -np.inf)
        for off in offsets:
            sl = tuple(slice(o, o + s) for o, s in zip(off, cell_shape))
            vmin = np.minimum(vmin, core[sl])
            vmax = np.maximum(vmax, core[sl])
        hit = np.all((vmin <= 0) & (vmax >= 0), axis=-1)
        for idx in np.argwhere(hit):
            seeds.append(np.array([axis[lo + idx[0]] + step / 2]
                                  + [axis[i] + step / 2 for i in idx[1:]]))
        # local minima of |g|^2 among interior nodes of this slab
        shape = g2.shape
        inner = tuple(slice(1, s - 1) for s in shape)
        if all(s > 2 for s in shape):
            centre = g2[inner]
            is_min = np.ones(centre.shape, dtype=bool)
            for off in nbr_offsets:
                sl = tuple(slice(1 + o, s - 1 + o) for o, s in zip(off, shape))
                is_min &= centre <= g2[sl]
            for idx in np.argwhere(is_min):
                node = (idx[0] + 1 + hlo,) + tuple(int(i) + 1 for i in idx[1:])
                if lo <= node[0] < hi:
                    local_min.append((float(centre[tuple(idx)]), axis[list(node)]))
    seeds.extend(x for v, x in local_min if v <= 1e-2 * gmax)

    opts = SolverOptions(tol_residual=1e-10)
    refined = []
    for s in seeds:
        try:
            sol = newton_solve(problem, s, opts)
        except ConvergenceError:
            continue
        x = sol.interior
        if np.all(np.abs(x) <= radius + step):
            refined.append(x.copy())
    refined.sort(key=lambda x: tuple(x.tolist()))
    points = distinct_filter(refined, ORACLE_DISTINCT)
    return OracleResult(
        critical_points=[tuple(float(v) for v in x) for x in points],
        scan_radius=float(radius),
        grid_step=float(step),
        refined=True,
        seeds=len(seeds),
    )


# --- inequality suites ------------------------------------------------------------


def difference_energies(Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise sum_{k=1}^{N+1} (Δy(k-1))² and sum_{k=1}^{N+2} (Δ²y(k-2))²."""
    vals = embed(Y)
    first = np.sum(forward_diff(vals[..., 1:-1]) ** 2, axis=-1)
    second = np.sum(second_diff(vals) ** 2, axis=-1)
    return first, second


def _samples(n: int, samples: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng([seed, n])
    Y = rng.uniform(-10.0, 10.0, size=(samples, n))
    return Y[np.any(Y != 0.0, axis=1)]


def lemma4_suite(n_max: int = 50, samples: int = 10_000, seed: int = 0) -> SuiteReport:
    """Upper bounds sum (Δy)² <= 4|y|² and sum (Δ²y)² <= 16|y|²."""
    max1 = max2 = 0.0
    failures = []
    for n in range(1, n_max + 1):
        Y = _samples(n, samples, seed)
        s1, s2 = difference_energies(Y)
        nn = np.sum(Y * Y, axis=-1)
        bad = np.flatnonzero((s1 > 4 * nn + SUITE_SLACK) | (s2 > 16 * nn + SUITE_SLACK))
        failures.extend((n, Y[i].tolist()) for i in bad[:5])
        max1 = max(max1, float(np.max(s1 / nn)))
        max2 = max(max2, float(np.max(s2 / nn)))
    return SuiteReport(
        "lemma4", not failures,
        {"n_max": n_max, "samples": samples, "max_ratio_first": max1, "max_ratio_second": max2},
        failures,
    )


def lemma6_suite(n_max: int = 50, samples: int = 10_000, seed: int = 0) -> SuiteReport:
    """Lower bounds with lambda1/lambda2, plus attainment by the Gram eigenvectors."""
    failures = []
    worst_gap = 0.0  # largest relative distance of the (augmented) min ratio from lambda
    worst_eig = 0.0  # largest |ratio(eigenvector) - lambda|
    for n in range(1, n_max + 1):
        b = spectral_bounds(n)
        Y = _samples(n, samples, seed)
        s1, s2 = difference_energies(Y)
        nn = np.sum(Y * Y, axis=-1)
        bad = np.flatnonzero((s1 < b.lambda1 * nn - SUITE_SLACK) | (s2 < b.lambda2 * nn - SUITE_SLACK))
        failures.extend((n, Y[i].tolist()) for i in bad[:5])
        ratios = []
        for lam, M in ((b.lambda1, _gram_V(n)), (b.lambda2, _gram_W(n))):
            _, vecs = jacobi_eigh(M, vectors=True)
            ratios.append((lam, vecs[:, 0]))
        v1, v2 = ratios[0][1][None, :], ratios[1][1][None, :]
        e1, _ = difference_energies(v1)
        _, e2 = difference_energies(v2)
        r1 = float(e1[0] / np.sum(v1 * v1))
        r2 = float(e2[0] / np.sum(v2 * v2))
        worst_eig = max(worst_eig, abs(r1 - b.lambda1), abs(r2 - b.lambda2))
        min1 = min(float(np.min(s1 / nn)), r1)
        min2 = min(float(np.min(s2 / nn)), r2)
        gap = max(abs(min1 - b.lambda1) / b.lambda1, abs(min2 - b.lambda2) / b.lambda2)
        worst_gap = max(worst_gap, gap)
        if gap > 0.1:
            failures.append((n, "augmented minimum ratio not within 10% of lambda"))
    passed = not failures and worst_eig <= SUITE_SLACK
    return SuiteReport(
        "lemma6", passed,
        {"n_max": n_max, "samples": samples, "max_eigvec_ratio_error": worst_eig,
         "max_relative_gap": worst_gap},
        failures,
    )


def _gram_V(n):
    from .spectra import difference_matrices
    return difference_matrices(n)[2]


def _gram_W(n):
    from .spectra import difference_matrices
    return difference_matrices(n)[3]


def eigenvector_ratios(n: int) -> tuple[np.ndarray, float, np.ndarray, float]:
    """Smallest Gram eigenvectors and the difference-energy ratios they attain."""
    _, vv = jacobi_eigh(_gram_V(n), vectors=True)
    _, vw = jacobi_eigh(_gram_W(n), vectors=True)
    a, b = vv[:, 0], vw[:, 0]
    r1 = float(difference_energies(a[None, :])[0][0] / (a @ a))
    r2 = float(difference_energies(b[None, :])[1][0] / (b @ b))
    return a, r1, b, r2


def numerical_rank(B: np.ndarray, tol: float = 1e-10) -> int:
    """Rank from Householder QR with column pivoting: |R_ii| > tol * |R_00|."""
    B = np.asarray(B, dtype=float)
    if B.size == 0:
        return 0
    R = scipy.linalg.qr(B, mode="r", pivoting=True)[0]
    d = np.abs(np.diag(R))
    if d.size == 0 or d[0] == 0.0:
        return 0
    return int(np.sum(d > tol * d[0]))


def random_lemma5_case(rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    n = int(rng.integers(1, 7))
    m = n + int(rng.integers(0, 4))
    B = rng.uniform(-1.0, 1.0, size=(m, n))
    if n > 1 and rng.random() < 1 / 3:
        r = int(rng.integers(1, n))  # force rank r < n
        B = rng.uniform(-1, 1, size=(m, r)) @ rng.uniform(-1, 1, size=(r, n))
    C = rng.uniform(-1.0, 1.0, size=(m, m))
    A = gram(C) + 0.1 * np.eye(m)
    return A, B


def lemma5_suite(samples: int = 1000, seed: int = 0) -> SuiteReport:
    """Positive definiteness of BᵀAB coincides with full column rank of B."""
    rng = np.random.default_rng(seed)
    mismatches = []
    deficient = 0
    for i in range(samples):
        A, B = random_lemma5_case(rng)
        S = B.T @ A @ B
        S = 0.5 * (S + S.T)
        full = numerical_rank(B) == B.shape[1]
        deficient += not full
        if is_positive_definite(S) != full:
            mismatches.append(i)
    return SuiteReport("lemma5", not mismatches,
                       {"samples": samples, "rank_deficient": deficient,
                        "mismatches": len(mismatches)}, mismatches)


def random_problem(rng: np.random.Generator, n_max: int = 10, degree_max: int = 5,
                   coeff: float = 5.0, pq: float = 5.0) -> Problem:
    n = int(rng.integers(1, n_max + 1))
    d = int(rng.integers(0, degree_max + 1))
    if rng.random() < 0.5:
        f = PolyNonlinearity.shared(rng.uniform(-coeff, coeff, d + 1))
    else:
        f = PolyNonlinearity.per_k(rng.uniform(-coeff, coeff, (n, d + 1)))
    return Problem(n, rng.uniform(-pq, pq, n + 2), rng.uniform(-pq, pq, n + 1), f)


def gradient_fd_suite(samples: int = 1000, seed: int = 0, eps: float = 1e-5) -> SuiteReport:
    """Central differences of J against <gradient, h>, and matrix vs stencil gradient."""
    rng = np.random.default_rng(seed)
    worst_fd = 0.0
    worst_cross = 0.0
    failures = []
    for i in range(samples):
        pr = random_problem(rng)
        x = rng.uniform(-2.0, 2.0, pr.n)
        h = rng.uniform(-1.0, 1.0, pr.n)
        y = make_grid_function(pr.n, x)
        g = gradient_quadratic_form(pr, y)
        J = float(energy_interior(pr, x))
        fd = (float(energy_interior(pr, x + eps * h)) - float(energy_interior(pr, x - eps * h))) / (2 * eps)
        err = abs(fd - float(g @ h)) / (1.0 + abs(J))
        cross = float(np.max(np.abs(g - residual_stencil(pr, y))))
        worst_fd = max(worst_fd, err)
        worst_cross = max(worst_cross, cross)
        if err > 1e-6 or cross > 1e-12:
            failures.append(i)
    return SuiteReport("gradient_fd", not failures,
                       {"samples": samples, "max_fd_error": worst_fd, "max_cross_form_diff": worst_cross},
                       failures)
