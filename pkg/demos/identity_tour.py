"""Exact residuals of the theta-function identities, and the transformation law numerically.

Run: python3 demos/identity_tour.py
"""

from fractions import Fraction

import mpmath

from qborwein import (
    TransformContext,
    cubic_theta_check,
    theorem_main_residual,
    theta_dissection_residual,
    two_squares_check,
    verify_modular_transform,
)
from qborwein.identities import lambert_derivative_check


def main():
    for k in range(1, 8):
        print(f"(q;q)^3 expansion, k={k}: residual {theorem_main_residual(k, 200)}")
    for k in range(1, 5):
        print(f"theta(z;q) {k}-dissection: residual {theta_dissection_residual(k, 8, 80)}")
    print(f"r_2(n) = 4(d_1 - d_3) to n=300: residual {two_squares_check(300)}")
    print(f"cubic theta identities to 200 all exact: {cubic_theta_check(200).all_zero()}")

    # A central difference has O(h^2) error; watch it shrink by ~4 per halving.
    for h in ("1e-2", "5e-3", "2.5e-3"):
        d = lambert_derivative_check(0, Fraction(1, 3), "0.3", h)
        print(f"theta log-derivative, step {h}: discrepancy {mpmath.nstr(d, 4)}")

    for p, h, k in ((3, 1, 3), (5, 2, 5), (7, 3, 14)):
        ctx = TransformContext.build(h, k, p)
        r = verify_modular_transform(ctx, Fraction(3, 2))
        print(f"transformation p={p}, h/k={h}/{k}: residual {mpmath.nstr(r, 3)}")


if __name__ == "__main__":
    main()
