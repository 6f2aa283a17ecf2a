"""Hypothesis constants and mechanical checks of the existence/multiplicity results.

Every strict inequality is evaluated on the computed numbers with no
cushion; each condition carries its margin (left - right) so near-ties are
visible in the report.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .grid import PolyNonlinearity, Problem, horner, poly_derivative
from .spectra import EIGEN_TOL, SpectralBounds, spectral_bounds

# Threshold quoted in the worked example for the slope at zero: min{12, 16 - λ1}.
EXAMPLE_FIXED_THRESHOLD = 12.0

NONDECREASING_SAMPLES = 10_000


class SlopeKind(str, enum.Enum):
    FINITE = "finite"
    PLUS_INFINITY = "plus-infinity"
    MINUS_INFINITY = "minus-infinity"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class ExtendedSlope:
    kind: SlopeKind
    value: float = 0.0

    def __post_init__(self):
        if self.kind is SlopeKind.FINITE and not math.isfinite(self.value):
            raise ValueError("finite slope needs a finite value")

    @classmethod
    def finite(cls, value: float) -> ExtendedSlope:
        return cls(SlopeKind.FINITE, float(value))

    @property
    def as_float(self) -> float:
        """Position on the extended real line (nan when undefined)."""
        return {
            SlopeKind.FINITE: self.value,
            SlopeKind.PLUS_INFINITY: math.inf,
            SlopeKind.MINUS_INFINITY: -math.inf,
            SlopeKind.UNDEFINED: math.nan,
        }[self.kind]

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "value": self.value if self.kind is SlopeKind.FINITE else None,
        }


def _from_float(x: float) -> ExtendedSlope:
    if math.isnan(x):
        return ExtendedSlope(SlopeKind.UNDEFINED)
    if x == math.inf:
        return ExtendedSlope(SlopeKind.PLUS_INFINITY)
    if x == -math.inf:
        return ExtendedSlope(SlopeKind.MINUS_INFINITY)
    return ExtendedSlope.finite(x)


def _k_range(f: PolyNonlinearity, n: int) -> range:
    return range(1, (1 if f.mode == "shared" else n) + 1)


# --- extrema, eta values, alphas -------------------------------------------


def extrema(problem: Problem) -> tuple[float, float, float, float]:
    return (
        float(np.min(problem.p)),
        float(np.max(problem.p)),
        float(np.min(problem.q)),
        float(np.max(problem.q)),
    )


def eta_values(problem: Problem, bounds: SpectralBounds) -> tuple[float, float, float]:
    """(η'(p), η(q), ξ(q)) from their piecewise definitions."""
    if bounds.n != problem.n:
        raise ValueError(f"spectral bounds are for N={bounds.n}, problem has N={problem.n}")
    p_min, _, q_min, q_max = extrema(problem)
    eta_prime = bounds.lambda2 if p_min >= 0 else 16.0
    eta = bounds.lambda1 if q_max < 0 else 4.0
    xi = bounds.lambda1 if q_min >= 0 else 4.0
    return eta_prime, eta, xi


@dataclass(frozen=True)
class HypothesisConstants:
    p_min: float
    p_max: float
    q_min: float
    q_max: float
    eta_prime: float
    eta: float
    xi: float
    alpha1: float
    alpha2: float
    alpha3: float
    lambda1: float
    lambda2: float
    sign_threshold_m: Optional[float] = None
    odd_tail_S: Optional[float] = None


def alphas(c: HypothesisConstants) -> tuple[float, float, float]:
    alpha1 = c.eta * c.q_max - c.eta_prime * c.p_min
    alpha2 = c.xi * c.q_min - 16.0 * c.p_max
    alpha3 = min(c.lambda1 * c.q_min - c.lambda2 * c.p_max, 4.0 * c.q_min - c.lambda2 * c.p_max)
    return alpha1, alpha2, alpha3


# --- coefficient analysis ---------------------------------------------------


def cauchy_bound(c) -> float:
    """Bound on the moduli of the roots of sum_j c[j] s^j.

    1 + max_{j<d} |c_j / c_d| (Cauchy); a monomial has only the root 0 and
    gets 0.  Constants have no roots and also get 0.
    """
    d = len(c) - 1
    lower = [abs(cj) for cj in c[:-1] if cj != 0.0]
    if d == 0 or not lower:
        return 0.0
    return 1.0 + max(lower) / abs(c[-1])


def slope_at_infinity(f: PolyNonlinearity, k: int = 1) -> ExtendedSlope:
    """lim_{s -> +inf} f(k, s) / s."""
    c = f.coeffs(k)
    d = len(c) - 1
    if d == 0:
        return ExtendedSlope.finite(0.0)
    if d == 1:
        return ExtendedSlope.finite(c[1])
    return ExtendedSlope(SlopeKind.PLUS_INFINITY if c[-1] > 0 else SlopeKind.MINUS_INFINITY)


def slope_at_minus_infinity(f: PolyNonlinearity, k: int = 1) -> ExtendedSlope:
    """lim_{s -> -inf} f(k, s) / s."""
    c = f.coeffs(k)
    d = len(c) - 1
    if d <= 1:
        return slope_at_infinity(f, k)
    # c_d s^{d-1} at s -> -inf has sign c_d * (-1)^(d-1)
    positive = (c[-1] > 0) == (d % 2 == 1)
    return ExtendedSlope(SlopeKind.PLUS_INFINITY if positive else SlopeKind.MINUS_INFINITY)


def slope_at_zero(f: PolyNonlinearity, k: int = 1) -> ExtendedSlope:
    c = f.coeffs(k)
    if c[0] != 0.0:
        return ExtendedSlope(SlopeKind.UNDEFINED)
    return ExtendedSlope.finite(c[1] if len(c) > 1 else 0.0)


def min_slope_at_infinity(f: PolyNonlinearity, n: int) -> ExtendedSlope:
    return _from_float(min(slope_at_infinity(f, k).as_float for k in _k_range(f, n)))


def max_slope_at_zero(f: PolyNonlinearity, n: int) -> ExtendedSlope:
    slopes = [slope_at_zero(f, k) for k in _k_range(f, n)]
    if any(s.kind is SlopeKind.UNDEFINED for s in slopes):
        return ExtendedSlope(SlopeKind.UNDEFINED)
    return ExtendedSlope.finite(max(s.value for s in slopes))


def sign_condition_witness(f: PolyNonlinearity, n: int | None = None) -> Optional[float]:
    """A radius m with s f(k, s) >= 0 for |s| >= m and every k, or None."""
    n = n or len(f.coefficients)
    m = 0.0
    for k in _k_range(f, n):
        c = f.coeffs(k)
        d = len(c) - 1
        if c == (0.0,):
            continue
        # s f(k, s) has leading term c_d s^{d+1}: both tails >= 0 iff d odd and c_d > 0
        if d % 2 == 0 or c[-1] <= 0:
            return None
        m = max(m, 1.0 + cauchy_bound(c))
    if m == 0.0:
        m = 1.0
    if not math.isfinite(2 * m):
        return None
    with np.errstate(over="ignore", invalid="ignore"):
        for k in _k_range(f, n):
            c = f.coeffs(k)
            for s in (m, -m, 2 * m, -2 * m):
                v = s * horner(c, s)
                if not math.isfinite(v) or v < 0:
                    return None
    return m


def _even_part(c) -> tuple[float, ...]:
    e = [cj if j % 2 == 0 else 0.0 for j, cj in enumerate(c)]
    while len(e) > 1 and e[-1] == 0.0:
        e.pop()
    return tuple(e)


def odd_tail_condition(f: PolyNonlinearity, n: int | None = None) -> Optional[float]:
    """S > 0 with f(k, -s) <= -f(k, s) for s >= S and every k, or None."""
    n = n or len(f.coefficients)
    S = 1.0
    for k in _k_range(f, n):
        e = _even_part(f.coeffs(k))
        if e == (0.0,):
            continue
        if e[-1] >= 0:
            return None
        S = max(S, 1.0 + cauchy_bound(e))
    if not math.isfinite(10 * S):
        return None
    with np.errstate(over="ignore", invalid="ignore"):
        for k in _k_range(f, n):
            c = f.coeffs(k)
            for s in (S, 2 * S, 10 * S):
                lo, hi = horner(c, -s), horner(c, s)
                # overflow means the tail cannot be checked in floating point
                if not (math.isfinite(lo) and math.isfinite(hi)) or lo > -hi:
                    return None
    return S


def is_odd(f: PolyNonlinearity) -> bool:
    return all(cj == 0.0 for c in f.coefficients for j, cj in enumerate(c) if j % 2 == 0)


def _nondecreasing_single(c) -> Optional[bool]:
    dc = poly_derivative(c)
    e = len(dc) - 1  # degree of f'
    if e == 0:
        return dc[0] >= 0
    if e == 1:
        return False
    if e == 2:
        a, b, c0 = dc[2], dc[1], dc[0]
        return a > 0 and b * b - 4 * a * c0 <= 0
    # f' of odd degree takes both signs; even degree needs a positive leading coefficient
    if e % 2 == 1 or dc[-1] < 0:
        return False
    R = 1.0 + cauchy_bound(dc)
    s = np.linspace(-R, R, NONDECREASING_SAMPLES)
    if np.any(horner(dc, s) < 0):
        return False
    return None


def is_nondecreasing(f: PolyNonlinearity) -> Optional[bool]:
    """True/False when decided exactly, None when sampling found no violation
    but exactness is unavailable (degree > 3)."""
    results = [_nondecreasing_single(c) for c in f.coefficients]
    if any(r is False for r in results):
        return False
    if any(r is None for r in results):
        return None
    return True


# --- theorem checks -----------------------------------------------------------


class Guarantee(str, enum.Enum):
    NONE = "none-certified"
    AT_LEAST_1 = "≥1"
    EXACTLY_1 = "exactly 1"
    AT_LEAST_2 = "≥2"
    AT_LEAST_2N = "≥2N"

    @property
    def rank(self) -> int:
        return list(Guarantee).index(self)


@dataclass(frozen=True)
class Condition:
    name: str
    relation: str
    left: object
    right: object
    holds: Optional[bool]  # None: not applicable / unverifiable

    @property
    def margin(self) -> Optional[float]:
        """left - right on the extended line; None when not numeric or undefined."""
        lf, rf = _numeric(self.left), _numeric(self.right)
        if lf is None or rf is None or math.isnan(lf) or math.isnan(rf):
            return None
        if math.isinf(lf) and lf == rf:
            return None
        return lf - rf


def _numeric(x) -> Optional[float]:
    if isinstance(x, ExtendedSlope):
        return x.as_float
    if isinstance(x, (bool, str)) or x is None:
        return None
    return float(x)


def _compare(name: str, left, relation: str, right) -> Condition:
    lf, rf = _numeric(left), _numeric(right)
    if math.isnan(lf) or math.isnan(rf):
        return Condition(name, relation, left, right, None)
    holds = {">": lf > rf, "<": lf < rf, ">=": lf >= rf, "<=": lf <= rf}[relation]
    return Condition(name, relation, left, right, bool(holds))


def _flag(name: str, value, holds: Optional[bool]) -> Condition:
    return Condition(name, "is", value, True, holds)


@dataclass(frozen=True)
class TheoremEntry:
    name: str
    kind: str  # "theorem" or "lemma"
    verdict: str  # holds | fails | not-applicable
    conditions: tuple[Condition, ...]
    conclusion: Guarantee
    notes: tuple[str, ...] = ()

    @property
    def guaranteed_count(self) -> Guarantee:
        return self.conclusion if self.verdict == "holds" else Guarantee.NONE

    @property
    def failed(self) -> tuple[Condition, ...]:
        return tuple(c for c in self.conditions if c.holds is not True)


def _entry(name, kind, conditions, conclusion, notes=(), force_na=False) -> TheoremEntry:
    if force_na:
        verdict = "not-applicable"
    elif any(c.holds is False for c in conditions):
        verdict = "fails"
    elif any(c.holds is None for c in conditions):
        verdict = "not-applicable"
    else:
        verdict = "holds"
    return TheoremEntry(name, kind, verdict, tuple(conditions), conclusion, tuple(notes))


@dataclass(frozen=True)
class TheoremReport:
    constants: HypothesisConstants
    bounds: SpectralBounds
    theorems: tuple[TheoremEntry, ...]
    guaranteed_count: Guarantee
    notes: tuple[str, ...]
    slope_at_infinity: ExtendedSlope
    slope_at_zero: ExtendedSlope
    odd: bool
    nondecreasing: Optional[bool]
    nonzero_solution: bool
    eigen_tolerance: float = EIGEN_TOL

    def entry(self, name: str) -> TheoremEntry:
        for t in self.theorems:
            if t.name == name:
                return t
        raise KeyError(name)

    @property
    def any_holds(self) -> bool:
        return self.guaranteed_count is not Guarantee.NONE


def hypothesis_constants(problem: Problem, bounds: SpectralBounds | None = None) -> HypothesisConstants:
    bounds = bounds or spectral_bounds(problem.n)
    p_min, p_max, q_min, q_max = extrema(problem)
    eta_prime, eta, xi = eta_values(problem, bounds)
    partial = HypothesisConstants(
        p_min, p_max, q_min, q_max, eta_prime, eta, xi, 0.0, 0.0, 0.0,
        bounds.lambda1, bounds.lambda2,
    )
    a1, a2, a3 = alphas(partial)
    return HypothesisConstants(
        p_min, p_max, q_min, q_max, eta_prime, eta, xi, a1, a2, a3,
        bounds.lambda1, bounds.lambda2,
        sign_condition_witness(problem.f, problem.n),
        odd_tail_condition(problem.f, problem.n),
    )


def check_all(problem: Problem) -> TheoremReport:
    n = problem.n
    f = problem.f
    bounds = spectral_bounds(n)
    c = hypothesis_constants(problem, bounds)
    inf_slope = min_slope_at_infinity(f, n)
    zero_slope = max_slope_at_zero(f, n)
    odd = is_odd(f)
    nondec = is_nondecreasing(f)
    nonzero = any(f.coeffs(k)[0] != 0.0 for k in _k_range(f, n))
    notes: list[str] = []

    sign_cond = _flag("s f(k,s) >= 0 for |s| >= m (witness m)", c.sign_threshold_m,
                      c.sign_threshold_m is not None)
    coercive = _compare("eta'(p) p_min - eta(q) q_max > 0",
                        c.eta_prime * c.p_min - c.eta * c.q_max, ">", 0.0)
    one_sol_notes = ["f(k0, 0) != 0 for some k0: the solution is non-zero"] if nonzero else []
    one_sol = _entry("1sol", "theorem", [sign_cond, coercive], Guarantee.AT_LEAST_1, one_sol_notes)

    nondec_cond = _flag("f non-decreasing in s", "unverified" if nondec is None else nondec, nondec)
    strong = _compare("p_min eta'(p) > q_max eta(q)", c.p_min * c.eta_prime, ">", c.q_max * c.eta)
    unique = _entry("uniqueness", "theorem", [sign_cond, coercive, nondec_cond, strong],
                    Guarantee.EXACTLY_1)

    lem1_slope = _compare("min_k lim_{s->+inf} f(k,s)/s > alpha1", inf_slope, ">", c.alpha1)
    lem1_tail = _flag("f(k,-s) <= -f(k,s) for s >= S (witness S)", c.odd_tail_S,
                      c.odd_tail_S is not None)
    lem1 = _entry("lem1", "lemma", [lem1_slope, lem1_tail], Guarantee.AT_LEAST_1)

    mpt_zero = _compare("max_k lim_{s->0} f(k,s)/s < alpha2", zero_slope, "<", c.alpha2)
    mpt1 = _entry(
        "MPT1", "theorem",
        [_compare("dim E > 1", n, ">", 1), _compare("p_max > 0", c.p_max, ">", 0.0),
         lem1_slope, lem1_tail, mpt_zero],
        Guarantee.AT_LEAST_2,
        ["dim E = 1: not applicable"] if n == 1 else [],
        force_na=(n == 1),
    )

    odd_cond = _flag("f odd in s", odd, odd)
    theo1_zero = _compare("max_k lim_{s->0+} f(k,s)/s < alpha2", zero_slope, "<", c.alpha2)
    theo1 = _entry(
        "theo1", "theorem",
        [odd_cond, _compare("p_min >= 0", c.p_min, ">=", 0.0), lem1_slope, theo1_zero],
        Guarantee.AT_LEAST_2N,
    )

    theo2_notes = []
    if c.p_max <= 0:
        theo2_notes.append("condition 2 compares the slope at infinity with alpha2 as printed "
                           "(lem1 uses alpha1)")
    theo2 = _entry(
        "theo2", "theorem",
        [odd_cond, _compare("p_max <= 0", c.p_max, "<=", 0.0),
         _compare("min_k lim_{s->+inf} f(k,s)/s > alpha2", inf_slope, ">", c.alpha2),
         _compare("max_k lim_{s->0} f(k,s)/s < alpha3", zero_slope, "<", c.alpha3)],
        Guarantee.AT_LEAST_2N,
        theo2_notes,
    )

    example_threshold = min(EXAMPLE_FIXED_THRESHOLD, 16.0 - c.lambda1)
    if zero_slope.kind is SlopeKind.FINITE:
        example_says = zero_slope.value < example_threshold
        literal_says = zero_slope.value < c.alpha2
        if example_says and not literal_says:
            notes.append(
                f"worked-example discrepancy: the example compares the slope at zero "
                f"({zero_slope.value:g}) with 12 = min{{12, 16 - lambda1}} "
                f"(here min{{12, {16.0 - c.lambda1:.12g}}} = {example_threshold:.12g}) and "
                f"declares theo1 applicable, but the printed alpha2 = xi(q) q_min - 16 p_max = "
                f"{c.alpha2:.12g} makes '< alpha2' false"
            )

    theorems = (one_sol, unique, lem1, mpt1, theo1, theo2)
    best = Guarantee.NONE
    for t in theorems:
        # lemmas are reported but only theorems feed the aggregate guarantee
        if t.kind == "theorem" and t.guaranteed_count.rank > best.rank:
            best = t.guaranteed_count
    if lem1.verdict == "holds" and best is Guarantee.NONE:
        notes.append("lem1 holds (at least one solution); lemmas do not enter guaranteed_count")

    return TheoremReport(
        constants=c,
        bounds=bounds,
        theorems=theorems,
        guaranteed_count=best,
        notes=tuple(notes),
        slope_at_infinity=inf_slope,
        slope_at_zero=zero_slope,
        odd=odd,
        nondecreasing=nondec,
        nonzero_solution=nonzero,
    )
