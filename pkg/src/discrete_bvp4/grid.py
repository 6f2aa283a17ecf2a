"""Problem model, the grid-function space and forward differences.

Index convention
----------------
Grid functions live on k = -1, ..., N+2.  ``GridFunction.values[i]`` holds
y(i - 1), so the interior y(1), ..., y(N) is ``values[2:N+2]``.

Coefficient sequences keep their natural ranges: ``Problem.p[i]`` is p(i + 1)
for k = 1..N+2 and ``Problem.q[i]`` is q(i + 1) for k = 1..N+1.

``forward_diff`` and ``second_diff`` do not know about index ranges; they
keep the start index of their input (output(k) pairs with input(k)), so a
sequence on a..b maps to a..b-1 (resp. a..b-2) with the same offset.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

OFFSET = 1  # values[k + OFFSET] == y(k)


class ValidationError(ValueError):
    """Malformed input to a constructor or operation."""


def _as_finite_array(values, what: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise ValidationError(f"{what} must be one-dimensional, got shape {arr.shape}")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise ValidationError(f"{what} has a non-finite entry at position {int(bad[0])}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GridFunction:
    """A real function on Z[-1, N+2] with the four Dirichlet zeros."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValidationError(f"n must be a positive integer, got {self.n!r}")
        vals = _as_finite_array(self.values, "values")
        if vals.size != self.n + 4:
            raise ValidationError(
                f"values must have length n + 4 = {self.n + 4}, got {vals.size}"
            )
        if vals[0] != 0.0 or vals[1] != 0.0 or vals[-2] != 0.0 or vals[-1] != 0.0:
            raise ValidationError("boundary values y(-1), y(0), y(N+1), y(N+2) must be zero")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "values", vals)

    @property
    def interior(self) -> np.ndarray:
        return self.values[2 : self.n + 2]

    def at(self, k: int) -> float:
        if not -1 <= k <= self.n + 2:
            raise IndexError(f"k={k} outside Z[-1, {self.n + 2}]")
        return float(self.values[k + OFFSET])

    def __neg__(self) -> GridFunction:
        return make_grid_function(self.n, -self.interior)

    def __eq__(self, other):
        if not isinstance(other, GridFunction):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.n, self.values.tobytes()))

    def __repr__(self):
        return f"GridFunction(n={self.n}, interior={self.interior.tolist()})"


def embed(interior: np.ndarray) -> np.ndarray:
    """Pad interior values with the boundary zeros along the last axis.

    Works on batches: an array of shape (..., N) becomes (..., N + 4).
    """
    interior = np.asarray(interior, dtype=float)
    pad = [(0, 0)] * (interior.ndim - 1) + [(2, 2)]
    return np.pad(interior, pad)


def make_grid_function(n: int, interior: Sequence[float]) -> GridFunction:
    arr = np.array(interior, dtype=float).ravel()
    if arr.size != n:
        raise ValidationError(f"interior must have length n={n}, got {arr.size}")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise ValidationError(f"interior value at k={int(bad[0]) + 1} is not finite")
    return GridFunction(n, embed(arr))


def zero(n: int) -> GridFunction:
    """The zero element (theta) of the space."""
    return make_grid_function(n, np.zeros(n))


def forward_diff(x) -> np.ndarray:
    """Forward difference along the last axis: out(k) = x(k+1) - x(k)."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] < 2:
        raise ValidationError("forward_diff needs a sequence of length >= 2")
    return x[..., 1:] - x[..., :-1]


def second_diff(x) -> np.ndarray:
    """Second forward difference: out(k) = x(k+2) - 2 x(k+1) + x(k)."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] < 3:
        raise ValidationError("second_diff needs a sequence of length >= 3")
    return forward_diff(forward_diff(x))


def norm(y: GridFunction) -> float:
    return float(np.sqrt(np.sum(y.interior**2)))


def _canonical(coeffs) -> tuple[float, ...]:
    c = [float(v) for v in coeffs]
    if not c:
        raise ValidationError("coefficient list must not be empty")
    for j, v in enumerate(c):
        if not np.isfinite(v):
            raise ValidationError(f"coefficient c{j} is not finite")
    while len(c) > 1 and c[-1] == 0.0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class PolyNonlinearity:
    """f(k, s) = sum_j c_j s^j, with either one shared list or one list per k.

    Coefficients are ascending by degree and stored in canonical form
    (no trailing zeros, except the zero polynomial ``(0.0,)``).
    """

    mode: str
    coefficients: tuple[tuple[float, ...], ...]
    _table: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.mode not in ("shared", "per_k"):
            raise ValidationError(f"mode must be 'shared' or 'per_k', got {self.mode!r}")
        lists = tuple(_canonical(c) for c in self.coefficients)
        if not lists:
            raise ValidationError("at least one coefficient list is required")
        if self.mode == "shared" and len(lists) != 1:
            raise ValidationError("shared mode takes exactly one coefficient list")
        object.__setattr__(self, "coefficients", lists)
        width = max(len(c) for c in lists)
        table = np.zeros((len(lists), width))
        for i, c in enumerate(lists):
            table[i, : len(c)] = c
        table.setflags(write=False)
        object.__setattr__(self, "_table", table)

    @classmethod
    def shared(cls, coeffs: Sequence[float]) -> PolyNonlinearity:
        return cls("shared", (tuple(coeffs),))

    @classmethod
    def per_k(cls, lists: Sequence[Sequence[float]]) -> PolyNonlinearity:
        return cls("per_k", tuple(tuple(c) for c in lists))

    def coeffs(self, k: int) -> tuple[float, ...]:
        """Coefficients of f(k, .) (k is 1-based, range checked by the caller)."""
        return self.coefficients[0] if self.mode == "shared" else self.coefficients[k - 1]

    def table(self, n: int) -> np.ndarray:
        """(n, d+1) coefficient matrix, one row per k = 1..n."""
        if self.mode == "shared":
            return np.broadcast_to(self._table[0], (n, self._table.shape[1]))
        return self._table

    def derivative(self) -> PolyNonlinearity:
        return PolyNonlinearity(self.mode, tuple(poly_derivative(c) for c in self.coefficients))

    def antiderivative(self) -> PolyNonlinearity:
        return PolyNonlinearity(self.mode, tuple(poly_antiderivative(c) for c in self.coefficients))


def poly_derivative(c: Sequence[float]) -> tuple[float, ...]:
    if len(c) == 1:
        return (0.0,)
    return tuple(j * c[j] for j in range(1, len(c)))


def poly_antiderivative(c: Sequence[float]) -> tuple[float, ...]:
    if len(c) == 1 and c[0] == 0.0:
        return (0.0,)
    return (0.0,) + tuple(c[j] / (j + 1) for j in range(len(c)))


def horner(c: Sequence[float], s):
    """Evaluate sum_j c[j] s^j by Horner's rule (scalar or array s)."""
    acc = np.zeros_like(np.asarray(s, dtype=float)) + c[-1]
    for cj in reversed(c[:-1]):
        acc = acc * s + cj
    return acc


def horner_rows(table: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Row-wise Horner: out[..., i] = sum_j table[i, j] * s[..., i]**j."""
    acc = np.broadcast_to(table[:, -1], s.shape).astype(float)
    for j in range(table.shape[1] - 2, -1, -1):
        acc = acc * s + table[:, j]
    return acc


@dataclass(frozen=True, eq=False)
class Problem:
    """The BVP data: N, p on Z[1, N+2], q on Z[1, N+1] and the nonlinearity f."""

    n: int
    p: np.ndarray
    q: np.ndarray
    f: PolyNonlinearity

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool) or self.n < 1:
            raise ValidationError(f"N must be an integer >= 1, got {self.n!r}")
        n = int(self.n)
        p = _as_finite_array(self.p, "p")
        q = _as_finite_array(self.q, "q")
        if p.size != n + 2:
            raise ValidationError(f"p must have N + 2 = {n + 2} entries, got {p.size}")
        if q.size != n + 1:
            raise ValidationError(f"q must have N + 1 = {n + 1} entries, got {q.size}")
        if not isinstance(self.f, PolyNonlinearity):
            raise ValidationError("f must be a PolyNonlinearity")
        if self.f.mode == "per_k" and len(self.f.coefficients) != n:
            raise ValidationError(
                f"per_k nonlinearity needs exactly N = {n} lists, got {len(self.f.coefficients)}"
            )
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def uniform(cls, n: int, f: PolyNonlinearity, p: float = 1.0, q: float = 1.0) -> Problem:
        return cls(n, np.full(n + 2, float(p)), np.full(n + 1, float(q)), f)

    def __eq__(self, other):
        if not isinstance(other, Problem):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.p, other.p)
            and np.array_equal(self.q, other.q)
            and self.f == other.f
        )

    __hash__ = None


def _check_k(f: PolyNonlinearity, k: int, n: int | None):
    if n is None and f.mode == "per_k":
        n = len(f.coefficients)
    if k < 1 or (n is not None and k > n):
        raise ValidationError(f"k={k} outside Z[1, {n if n is not None else 'N'}]")


def eval_f(f: PolyNonlinearity, k: int, s, n: int | None = None):
    """f(k, s) by Horner's rule.

    ``n`` bounds the admissible k; for per-k nonlinearities it defaults to the
    number of coefficient lists.
    """
    _check_k(f, k, n)
    return horner(f.coeffs(k), s)


def eval_f_vector(f: PolyNonlinearity, x: np.ndarray) -> np.ndarray:
    """f(k, x[..., k-1]) for k = 1..N along the last axis."""
    x = np.asarray(x, dtype=float)
    return horner_rows(f.table(x.shape[-1]), x)
