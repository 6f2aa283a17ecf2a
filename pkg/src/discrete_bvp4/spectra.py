"""Difference matrices V and W, their Gram matrices and smallest eigenvalues.

``V`` maps the interior (y(1), ..., y(N)) to (Δy(0), ..., Δy(N)) and ``W``
maps it to (Δ²y(-1), ..., Δ²y(N)); the boundary zeros are folded in.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import ValidationError

JACOBI_TOL = 1e-14
CLOSED_FORM_TOL = 1e-9
EIGEN_TOL = 1e-10  # accuracy recorded in reports for smallest_eigenvalue


def _check_n(n: int):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValidationError(f"n must be an integer >= 1, got {n!r}")


def build_V(n: int) -> np.ndarray:
    _check_n(n)
    V = np.zeros((n + 1, n))
    idx = np.arange(n)
    V[idx, idx] = 1.0
    V[idx + 1, idx] = -1.0
    return V


def build_W(n: int) -> np.ndarray:
    _check_n(n)
    W = np.zeros((n + 2, n))
    idx = np.arange(n)
    W[idx, idx] = 1.0
    W[idx + 1, idx] = -2.0
    W[idx + 2, idx] = 1.0
    return W


@lru_cache(maxsize=None)
def _cached_gram_pair(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    V, W = build_V(n), build_W(n)
    out = (V, W, gram(V), gram(W))
    for a in out:
        a.setflags(write=False)
    return out


def difference_matrices(n: int):
    """Cached read-only (V, W, VᵀV, WᵀW) for dimension n."""
    _check_n(n)
    return _cached_gram_pair(int(n))


def gram(M) -> np.ndarray:
    """MᵀM, symmetric to the last bit (upper triangle mirrored)."""
    M = np.asarray(M, dtype=float)
    G = M.T @ M
    upper = np.triu(G)
    return upper + np.triu(G, 1).T


def _asymmetry(S: np.ndarray) -> float:
    return float(np.max(np.abs(S - S.T))) if S.size else 0.0


def _require_symmetric(S) -> np.ndarray:
    S = np.array(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {S.shape}")
    asym = _asymmetry(S)
    if asym > 1e-12 * max(1.0, float(np.max(np.abs(S))) if S.size else 1.0):
        raise ValidationError(f"matrix is not symmetric: max |S - S^T| = {asym:.3e}")
    return S


@lru_cache(maxsize=None)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Disjoint index pairs covering every (p, q), p < q, once per sweep."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        P, Q = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                P.append(min(a, b))
                Q.append(max(a, b))
        rounds.append((np.array(P, dtype=int), np.array(Q, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def jacobi_eigh(S, vectors: bool = False, tol: float = JACOBI_TOL, max_sweeps: int = 100):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Each sweep visits every off-diagonal pair once, grouped into rounds of
    disjoint pairs so a round can be applied as one vectorised update.
    Iterates until the off-diagonal Frobenius norm is <= tol * ||S||_F.

    Returns ascending eigenvalues, plus the matching orthonormal eigenvectors
    (as columns) when ``vectors`` is true.
    """
    A = _require_symmetric(S)
    n = A.shape[0]
    X = np.eye(n) if vectors else None
    scale = float(np.linalg.norm(A))
    rounds = _round_robin(n) if n > 1 else ()
    converged = False
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= tol * scale:
            converged = True
            break
        for P, Q in rounds:
            apq = A[P, Q]
            app = A[P, P]
            aqq = A[Q, Q]
            active = apq != 0.0
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                tau = np.where(active, (aqq - app) / (2.0 * np.where(active, apq, 1.0)), 0.0)
                t = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            t = np.where(active & np.isfinite(t), t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            AP = A[:, P].copy()
            AQ = A[:, Q].copy()
            A[:, P] = c * AP - s * AQ
            A[:, Q] = s * AP + c * AQ
            AP = A[P, :].copy()
            AQ = A[Q, :].copy()
            A[P, :] = c[:, None] * AP - s[:, None] * AQ
            A[Q, :] = s[:, None] * AP + c[:, None] * AQ
            A[P, Q] = 0.0
            A[Q, P] = 0.0
            if X is not None:
                XP = X[:, P].copy()
                XQ = X[:, Q].copy()
                X[:, P] = c * XP - s * XQ
                X[:, Q] = s * XP + c * XQ
    if not converged:
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off > tol * scale:
            raise ArithmeticError(
                f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal {off:.3e})"
            )
    evals = np.diag(A).copy()
    order = np.argsort(evals, kind="stable")
    if vectors:
        return evals[order], X[:, order]
    return evals[order]


def smallest_eigenvalue(S) -> float:
    return float(jacobi_eigh(S)[0])


def lambda1_closed_form(n: int, j: int = 1) -> float:
    """j-th smallest eigenvalue of the tridiagonal (2, -1) matrix VᵀV."""
    return 4.0 * math.sin(j * math.pi / (2 * (n + 1))) ** 2


@dataclass(frozen=True)
class SpectralBounds:
    n: int
    lambda1: float
    lambda2: float

    @property
    def lambda1_closed_form(self) -> float:
        return lambda1_closed_form(self.n)

    @property
    def closed_form_error(self) -> float:
        return abs(self.lambda1 - self.lambda1_closed_form)


@lru_cache(maxsize=None)
def _spectral_bounds(n: int) -> SpectralBounds:
    _, _, VtV, WtW = difference_matrices(n)
    b = SpectralBounds(n, smallest_eigenvalue(VtV), smallest_eigenvalue(WtW))
    if b.closed_form_error > CLOSED_FORM_TOL:
        raise ArithmeticError(
            f"lambda1({n}) = {b.lambda1!r} disagrees with 4 sin^2(pi/(2(N+1))) = "
            f"{b.lambda1_closed_form!r}"
        )
    if not (0.0 < b.lambda1 <= 4.0 and 0.0 < b.lambda2 <= 16.0):
        raise ArithmeticError(f"spectral bounds out of range for N={n}: {b}")
    return b


def spectral_bounds(n: int) -> SpectralBounds:
    _check_n(n)
    return _spectral_bounds(int(n))


def is_positive_definite(S) -> bool:
    """True iff an LDLᵀ factorisation has every pivot > 1e-12 * ||S||_F."""
    A = _require_symmetric(S)
    n = A.shape[0]
    threshold = 1e-12 * float(np.linalg.norm(A))
    L = np.zeros((n, n))
    d = np.zeros(n)
    for j in range(n):
        Lj = L[j, :j]
        d[j] = A[j, j] - np.dot(Lj * Lj, d[:j])
        if not d[j] > threshold:
            return False
        L[j, j] = 1.0
        if j + 1 < n:
            L[j + 1 :, j] = (A[j + 1 :, j] - L[j + 1 :, :j] @ (Lj * d[:j])) / d[j]
    return True
