"""Audit of f = s³/3 + s with p = q = 1, N = 2.

The multiplicity hypothesis compares the slope of f at zero with alpha2.
This script prints both that comparison and the fixed threshold
min{12, 16 - lambda1}, then lists what the solver and the oracle find.
"""
import numpy as np

from discrete_bvp4 import PolyNonlinearity, Problem, check_all, deflated_search
from discrete_bvp4.energy import hessian_interior
from discrete_bvp4.harness import brute_force_oracle


def main():
    pr = Problem.uniform(2, PolyNonlinearity.shared((0.0, 1.0, 0.0, 1.0 / 3.0)))
    r = check_all(pr)
    c = r.constants
    slope0 = r.slope_at_zero.value
    print(f"lambda1 = {c.lambda1:.12g}, lambda2 = {c.lambda2:.12g}")
    print(f"alpha1 = {c.alpha1:g}, alpha2 = {c.alpha2:g}, alpha3 = {c.alpha3:g}")
    print(f"slope at zero = {slope0:g}")
    print(f"  < min(12, 16 - lambda1) = {min(12, 16 - c.lambda1):g}: {slope0 < min(12, 16 - c.lambda1)}")
    print(f"  < alpha2 = {c.alpha2:g}: {slope0 < c.alpha2}")
    for t in r.theorems:
        print(f"{t.name:<11} {t.verdict}")
    print(f"certified: {r.guaranteed_count.value}")
    for note in r.notes:
        print(f"note: {note}")

    # the gradient map is strictly monotone: H(y) - H(0) = diag(y_k²) is positive semidefinite
    print("Hessian at θ eigenvalues:", np.linalg.eigvalsh(hessian_interior(pr, np.zeros(2))))
    found = deflated_search(pr)
    print("solver:", [s.interior.tolist() for s in found.solutions])
    print("oracle:", brute_force_oracle(pr, 10.0, 0.05).critical_points)


if __name__ == "__main__":
    main()
