"""Smallest eigenvalues of VᵀV and WᵀW against the sine closed form.

    python3 scripts/spectra_table.py --n-max 30
"""
import argparse

from discrete_bvp4.spectra import spectral_bounds


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=20)
    args = ap.parse_args()
    print(f"{'N':>4} {'lambda1':>16} {'closed form':>16} {'|diff|':>9} {'lambda2':>16}")
    for n in range(1, args.n_max + 1):
        b = spectral_bounds(n)
        print(f"{n:4d} {b.lambda1:16.12f} {b.lambda1_closed_form:16.12f} "
              f"{b.closed_form_error:9.1e} {b.lambda2:16.12f}")


if __name__ == "__main__":
    main()
