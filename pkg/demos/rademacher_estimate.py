"""How close the truncated Rademacher-type sum gets to the exact coefficient.

Run: python3 demos/rademacher_estimate.py
"""

from fractions import Fraction

import mpmath

from qborwein import estimate, mth1_quantities
from qborwein.asymptotics import corollary_N, theorem_mth_error_bound


def main():
    print("p=5, delta=3/2: exact coefficient, N-term main term, error, bound")
    for n in (10, 50, 150, 300):
        for N in (1, 2, 3):
            r = estimate(5, Fraction(3, 2), n, N)
            err = abs(mpmath.mpf(r.exact_coeff.numerator) / r.exact_coeff.denominator - r.main_term)
            print(
                f"  n={n:3d} N={N}  c={float(r.exact_coeff):+.6e}  main={mpmath.nstr(r.main_term, 8):>15}"
                f"  |diff|={mpmath.nstr(err, 3):>9}  bound={mpmath.nstr(r.error_bound, 3):>9}  ok={r.within_bound}"
            )

    # The bound shrinks like exp(const / N^2): more terms buy a lot at first.
    print("\nbound for p=3, delta=1, n=500 as N grows")
    for N in (1, 2, 4, 8, 16, corollary_N(1, 500)):
        print(f"  N={N:3d}  {mpmath.nstr(theorem_mth_error_bound(3, 1, 500, N), 6)}")

    print("\np=3 growth estimate: M(L) must fall below |cos| for the sign to be forced")
    for n in (10, 158, 500, 2000):
        q = mth1_quantities(Fraction(3, 2), n)
        print(f"  n={n:4d}  L={mpmath.nstr(q.L, 6):>8}  M={mpmath.nstr(q.M, 6)}")


if __name__ == "__main__":
    main()
