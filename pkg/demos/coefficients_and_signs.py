"""Exact coefficients of (q;q)^delta / (q^3;q^3)^delta and their sign pattern.

Run: python3 demos/coefficients_and_signs.py
"""

from fractions import Fraction

from qborwein import borwein_coeffs, conjecture1_check, predicted_sign, sign_pattern_check, vanishing_classes


def sign_char(x):
    return "+" if x > 0 else "-" if x < 0 else "0"


def main():
    for delta in (Fraction(1), Fraction(3, 2), Fraction(3)):
        c = borwein_coeffs(3, delta, 30)
        print(f"delta = {delta}: first coefficients")
        print("  ", [str(x) for x in c.coeffs[:10]])
        print("   signs      ", "".join(sign_char(x) for x in c.coeffs[1:31]))
        print("   cosine sign", "".join(sign_char(predicted_sign(delta, n)) for n in range(1, 31)))

    # For delta = 3 every third coefficient is zero; the residue classes come
    # from a quadratic congruence.
    for k in (3, 5, 7, 9):
        print(f"c_{k}^(3)(n) = 0 whenever n mod {k} is in {sorted(vanishing_classes(k))}")

    print()
    for p in (2, 3, 5, 7):
        r = sign_pattern_check(p, 1, 400)
        print(f"p={p}, delta=1: c(n) c(n+{p}) < 0 happens {r.violations} times up to n=400")

    # Below the conjectured delta range the 3-dissection picks up negative terms.
    for delta in (Fraction(1, 5), Fraction(1, 4), Fraction(1), Fraction(3)):
        r = conjecture1_check(delta, 300)
        print(f"delta={delta}: in conjectured range={r.in_range}, first negative index per component {r.first_negative}")


if __name__ == "__main__":
    main()
