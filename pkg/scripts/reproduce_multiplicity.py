"""Certificate, deflated search and brute-force oracle for f = s³/3 - 20s, p = q = 1.

    python3 scripts/reproduce_multiplicity.py --n 1 2 3 --radius 12
"""
import argparse
import time

import numpy as np

from discrete_bvp4 import PolyNonlinearity, Problem, SolverOptions, check_all, deflated_search
from discrete_bvp4.harness import brute_force_oracle


def run(n: int, radius: float, step: float, seed: int):
    pr = Problem.uniform(n, PolyNonlinearity.shared((0.0, -20.0, 0.0, 1.0 / 3.0)))
    report = check_all(pr)
    t0 = time.perf_counter()
    found = deflated_search(pr, SolverOptions(start_radius=radius, seed=seed))
    t_search = time.perf_counter() - t0
    t0 = time.perf_counter()
    oracle = np.array(brute_force_oracle(pr, radius, step).critical_points)
    t_oracle = time.perf_counter() - t0
    pts = np.array([s.interior for s in found.solutions])
    matched = len(pts) == len(oracle) and all(
        np.min(np.max(np.abs(oracle - p), axis=1)) <= 1e-8 for p in pts)
    print(f"N={n}: certificate {report.guaranteed_count.value}, "
          f"search {len(pts)} ({t_search:.1f} s), oracle {len(oracle)} ({t_oracle:.1f} s), "
          f"sets {'match' if matched else 'DIFFER'}")
    for s in found.solutions:
        print(f"   {np.array2string(s.interior, precision=8, floatmode='fixed'):>40}  "
              f"J={s.energy:12.6f}  {s.classification}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--radius", type=float, default=12.0)
    ap.add_argument("--step", type=float, default=0.05)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for n in args.n:
        run(n, args.radius, args.step, args.seed)


if __name__ == "__main__":
    main()
