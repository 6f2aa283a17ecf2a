"""Command-line front end.

    discrete-bvp4 check PROBLEM.json
    discrete-bvp4 solve PROBLEM.json [--starts N] [--seed S] [--radius R] [--tol T]
                                     [--max-solutions K] [--csv PATH]
    discrete-bvp4 spectra N
    discrete-bvp4 verify [--n-max N] [--samples M] [--seed S]
    discrete-bvp4 oracle PROBLEM.json [--radius R] [--step H]

Reports are JSON on stdout; diagnostics and the summary table go to stderr.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import conditions, harness, solvers
from .conditions import ExtendedSlope, TheoremReport
from .energy import energy_interior, hessian_interior, residual_stencil
from .grid import PolyNonlinearity, Problem, ValidationError, make_grid_function
from .spectra import CLOSED_FORM_TOL, spectral_bounds

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NONE_CERTIFIED = 3
EXIT_NO_SOLUTION = 4
EXIT_SUITE_FAILED = 5

PROBLEM_MEMBERS = {"N", "p", "q", "f"}


class ProblemFileError(ValueError):
    pass


# --- problem files ------------------------------------------------------------------


def _reject_constant(name):
    raise ProblemFileError(f"non-finite number {name} is not allowed")


def _number_list(value, what: str, length: Optional[int] = None) -> list[float]:
    if not isinstance(value, list):
        raise ProblemFileError(f'"{what}" must be an array of numbers')
    out = []
    for i, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ProblemFileError(f'"{what}"[{i}] is not a number')
        if not math.isfinite(v):
            raise ProblemFileError(f'"{what}"[{i}] is not finite')
        out.append(float(v))
    if length is not None and len(out) != length:
        raise ProblemFileError(f'"{what}" must have {length} entries, got {len(out)}')
    return out


def problem_from_dict(doc) -> Problem:
    if not isinstance(doc, dict):
        raise ProblemFileError("problem file must contain a JSON object")
    unknown = sorted(set(doc) - PROBLEM_MEMBERS)
    if unknown:
        raise ProblemFileError(f"unknown member(s): {', '.join(unknown)}")
    missing = sorted(PROBLEM_MEMBERS - set(doc))
    if missing:
        raise ProblemFileError(f"missing member(s): {', '.join(missing)}")
    n = doc["N"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ProblemFileError('"N" must be an integer >= 1')
    p = _number_list(doc["p"], "p", n + 2)
    q = _number_list(doc["q"], "q", n + 1)
    fdoc = doc["f"]
    if not isinstance(fdoc, dict) or len(fdoc) != 1 or next(iter(fdoc)) not in ("shared", "per_k"):
        raise ProblemFileError('"f" must be {"shared": [...]} or {"per_k": [[...], ...]}')
    if "shared" in fdoc:
        coeffs = _number_list(fdoc["shared"], "f.shared")
        if not coeffs:
            raise ProblemFileError('"f.shared" must not be empty')
        f = PolyNonlinearity.shared(coeffs)
    else:
        lists = fdoc["per_k"]
        if not isinstance(lists, list) or len(lists) != n:
            raise ProblemFileError(f'"f.per_k" must hold exactly N = {n} arrays')
        parsed = [_number_list(c, f"f.per_k[{i}]") for i, c in enumerate(lists)]
        if any(not c for c in parsed):
            raise ProblemFileError('"f.per_k" arrays must not be empty')
        f = PolyNonlinearity.per_k(parsed)
    try:
        return Problem(n, np.array(p), np.array(q), f)
    except ValidationError as exc:
        raise ProblemFileError(str(exc)) from exc


def parse_problem(text: str) -> Problem:
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return problem_from_dict(doc)


def load_problem(path) -> Problem:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ProblemFileError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_problem(text)


def problem_to_dict(problem: Problem) -> dict:
    f = problem.f
    fdoc = ({"shared": list(f.coefficients[0])} if f.mode == "shared"
            else {"per_k": [list(c) for c in f.coefficients]})
    return {"N": problem.n, "p": problem.p.tolist(), "q": problem.q.tolist(), "f": fdoc}


def dump_problem(problem: Problem) -> str:
    return json.dumps(problem_to_dict(problem), indent=2)


# --- report serialisation ------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, ExtendedSlope):
        return x.to_json()
    if isinstance(x, (bool, str)) or x is None:
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    raise TypeError(f"cannot serialise {type(x).__name__}")


def spectral_json(n: int) -> dict:
    b = spectral_bounds(n)
    return {
        "N": n,
        "lambda1": b.lambda1,
        "lambda2": b.lambda2,
        "closed_form_check": {
            "lambda1_closed_form": b.lambda1_closed_form,
            "abs_error": b.closed_form_error,
            "tolerance": CLOSED_FORM_TOL,
            "passed": b.closed_form_error <= CLOSED_FORM_TOL,
        },
    }


def theorem_json(report: TheoremReport) -> dict:
    out = {}
    for t in report.theorems:
        out[t.name] = {
            "kind": t.kind,
            "verdict": t.verdict,
            "conclusion": t.conclusion.value,
            "guaranteed_count": t.guaranteed_count.value,
            "conditions": [
                {
                    "name": c.name,
                    "relation": c.relation,
                    "left": _jsonable(c.left),
                    "right": _jsonable(c.right),
                    "holds": c.holds,
                    "margin": _jsonable(c.margin),
                }
                for c in t.conditions
            ],
            "failed": [c.name for c in t.failed],
            "notes": list(t.notes),
        }
    return out


def check_json(problem: Problem, report: TheoremReport) -> dict:
    c = report.constants
    constants = {k: _jsonable(v) for k, v in vars(c).items()}
    return {
        "problem": problem_to_dict(problem),
        "spectral": spectral_json(problem.n),
        "constants": constants,
        "slopes": {
            "min_at_infinity": report.slope_at_infinity.to_json(),
            "max_at_zero": report.slope_at_zero.to_json(),
            "odd": report.odd,
            "nondecreasing": "unverified" if report.nondecreasing is None else report.nondecreasing,
        },
        "theorems": theorem_json(report),
        "guaranteed_count": report.guaranteed_count.value,
        "eigen_tolerance": report.eigen_tolerance,
        "notes": list(report.notes),
    }


def solution_json(sol: solvers.Solution) -> dict:
    return {
        "interior": sol.interior.tolist(),
        "energy": sol.energy,
        "residual_norm": sol.residual_norm,
        "classification": sol.classification,
    }


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False, allow_nan=False)


def _summary_table(report: TheoremReport) -> str:
    lines = [f"{'result':<12}{'verdict':<16}{'conclusion':<12}failed conditions"]
    for t in report.theorems:
        failed = "; ".join(
            f"{c.name} [margin {c.margin:.6g}]" if c.margin is not None else c.name
            for c in t.failed
        )
        lines.append(f"{t.name:<12}{t.verdict:<16}{t.conclusion.value:<12}{failed or '-'}")
    lines.append(f"guaranteed_count: {report.guaranteed_count.value}")
    lines.extend(f"note: {n}" for n in report.notes)
    return "\n".join(lines)


def write_csv(path, solutions: Sequence[solvers.Solution]):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["solution_index", "k", "y_k"])
        for i, sol in enumerate(solutions):
            for k in range(-1, sol.y.n + 3):
                w.writerow([i, k, repr(sol.y.at(k))])


# --- subcommands ------------------------------------------------------------------


def cmd_check(args) -> int:
    problem = load_problem(args.problem)
    report = conditions.check_all(problem)
    print(_dump(check_json(problem, report)))
    print(_summary_table(report), file=sys.stderr)
    return EXIT_OK if report.any_holds else EXIT_NONE_CERTIFIED


def cmd_solve(args) -> int:
    problem = load_problem(args.problem)
    report = conditions.check_all(problem)
    opts = solvers.SolverOptions(
        tol_residual=args.tol,
        start_count=args.starts,
        start_radius=args.radius,
        seed=args.seed,
    )
    found = solvers.deflated_search(problem, opts, max_solutions=args.max_solutions)
    doc = check_json(problem, report)
    doc["solutions"] = [solution_json(s) for s in found.solutions]
    doc["starts_used"] = found.starts_used
    doc["seed"] = args.seed
    doc["search"] = {
        "start_count": opts.start_count,
        "start_radius": opts.start_radius,
        "tol_residual": opts.tol_residual,
        "failed_starts": found.failures,
        "failure_reasons": found.failure_reasons,
        "statement": f"found {len(found)} distinct solutions",
    }
    print(_dump(doc))
    if args.csv:
        write_csv(args.csv, found.solutions)
    print(_summary_table(report), file=sys.stderr)
    print(f"found {len(found)} distinct solutions from {found.starts_used} starts", file=sys.stderr)
    return EXIT_OK if len(found) else EXIT_NO_SOLUTION


def cmd_spectra(args) -> int:
    if args.n < 1:
        print("error: N must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    doc = spectral_json(args.n)
    chk = doc["closed_form_check"]
    print(f"N = {args.n}")
    print(f"lambda1 = {doc['lambda1']:.12g}")
    print(f"lambda2 = {doc['lambda2']:.12g}")
    print(f"4 sin^2(pi/(2(N+1))) = {chk['lambda1_closed_form']:.12g} "
          f"(|difference| = {chk['abs_error']:.3g}, {'ok' if chk['passed'] else 'MISMATCH'})")
    return EXIT_OK


def cmd_verify(args) -> int:
    reports = [
        harness.lemma4_suite(args.n_max, args.samples, args.seed),
        harness.lemma6_suite(args.n_max, args.samples, args.seed),
    ]
    doc = {
        r.name: {"passed": r.passed, **{k: _jsonable(v) for k, v in r.stats.items()},
                 "failures": len(r.failures)}
        for r in reports
    }
    print(_dump(doc))
    for r in reports:
        print(r.summary(), file=sys.stderr)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_SUITE_FAILED


def cmd_oracle(args) -> int:
    problem = load_problem(args.problem)
    result = harness.brute_force_oracle(problem, args.radius, args.step)
    sols = []
    for pt in result.critical_points:
        x = np.array(pt)
        y = make_grid_function(problem.n, x)
        sols.append({
            "interior": list(pt),
            "energy": float(energy_interior(problem, x)),
            "residual_norm": float(np.max(np.abs(residual_stencil(problem, y)))),
            "classification": solvers.classify(hessian_interior(problem, x)),
        })
    doc = {
        "problem": problem_to_dict(problem),
        "oracle": {"scan_radius": result.scan_radius, "grid_step": result.grid_step,
                   "refined": result.refined, "seeds": result.seeds},
        "solutions": sols,
    }
    print(_dump(doc))
    print(f"oracle: {len(sols)} critical points in [-{args.radius:g}, {args.radius:g}]^{problem.n}",
          file=sys.stderr)
    return EXIT_OK


# --- argument parsing ----------------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discrete-bvp4",
        description="Certify and solve fourth-order discrete Dirichlet BVPs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    parser.subcommands = sub.choices

    p = sub.add_parser("check", help="check every theorem hypothesis")
    p.add_argument("problem")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="deflated multistart Newton search")
    p.add_argument("problem")
    p.add_argument("--starts", type=_positive_int, default=64)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--radius", type=_positive_float, default=10.0)
    p.add_argument("--tol", type=_positive_float, default=1e-10)
    p.add_argument("--max-solutions", type=_positive_int, default=None)
    p.add_argument("--csv", default=None, metavar="PATH")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("spectra", help="print lambda1, lambda2 for N")
    p.add_argument("n", type=int, metavar="N")
    p.set_defaults(func=cmd_spectra)

    p = sub.add_parser("verify", help="run the norm-inequality suites")
    p.add_argument("--n-max", type=_positive_int, default=50)
    p.add_argument("--samples", type=_positive_int, default=10_000)
    p.add_argument("--seed", type=_nonneg_int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force critical points (N <= 3)")
    p.add_argument("problem")
    p.add_argument("--radius", type=_positive_float, default=10.0)
    p.add_argument("--step", type=_positive_float, default=0.05)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        if extra:
            # report against the subcommand so its valid flags are listed
            parser.subcommands[args.command].error(f"unrecognized arguments: {' '.join(extra)}")
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (ProblemFileError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
