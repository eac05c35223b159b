from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from mpmath import mp

from oracles import divisor_count_mod4, hexagonal_count, jacobi_cube, lattice_r2
from qborwein.identities import (
    BivariateSeries,
    _ell_range,
    _hexagonal_lattice,
    conjecture1_check,
    conjecture1_components,
    conjecture1_in_range,
    corollary_sign_check,
    cubic_theta_check,
    dissect,
    divisibility_check,
    interleave,
    jacobi_triple_product,
    lambert_derivative_check,
    lambert_series,
    sign_pattern_check,
    theorem_main_residual,
    theorem_main_sides,
    theta_bivariate,
    theta_derivative_check,
    theta_dissection_residual,
    theta_numeric,
    theta_series,
    two_squares_check,
    vanishing_check,
    vanishing_classes,
)
from qborwein.series import EtaLikeProduct, TruncatedSeries, borwein_coeffs, expand_product

PUBLISHED = {3: {2}, 5: {2, 4}, 7: {2, 4, 5}, 9: {2, 4, 5, 7, 8}}


# --- building blocks ------------------------------------------------------------

def test_lambert_series_counts_divisors():
    got = lambert_series([(e, 1) for e in range(1, 13)], 12)
    assert list(got.coeffs) == [0, 1, 2, 2, 3, 2, 4, 2, 4, 3, 4, 2, 6]


def test_alternating_lambert():
    # q/(1+q) = q - q^2 + q^3 - ...
    assert list(lambert_series([(1, 1)], 5, alternating=True).coeffs) == [0, 1, -1, 1, -1, 1]


def test_lambert_rejects_zero_exponent():
    with pytest.raises(ValueError):
        lambert_series([(0, 1)], 5)


def test_triple_product_against_product_form():
    # (q, q^2, q^3; q^3) = (q;q)_inf
    got = jacobi_triple_product(1, 1, 3, 80)
    assert got == expand_product(EtaLikeProduct([(1, 1)]), 80)
    with pytest.raises(ValueError):
        jacobi_triple_product(1, 3, 3, 10)


def test_theta_series():
    assert list(theta_series(10).coeffs) == [1, 2, 0, 0, 2, 0, 0, 0, 0, 2, 0]


def test_hexagonal_lattice_first_terms():
    assert list(_hexagonal_lattice(7).coeffs) == [1, 6, 0, 6, 6, 0, 0, 12]
    assert list(_hexagonal_lattice(60).coeffs) == [hexagonal_count(n) for n in range(61)]


# --- main identity --------------------------------------------------------------

@pytest.mark.parametrize("k", range(1, 10))
def test_theorem_main(k):
    assert theorem_main_residual(k, 300) == 0


def test_theorem_main_k2_lhs_is_euler_cube():
    lhs, rhs = theorem_main_sides(2, 200)
    assert list(lhs.coeffs) == jacobi_cube(200)
    assert lhs == rhs


def test_theorem_main_k1_is_empty():
    lhs, rhs = theorem_main_sides(1, 50)
    assert lhs == rhs == TruncatedSeries([], 50)


# --- theta dissection -------------------------------------------------------

@pytest.mark.parametrize("k", range(1, 8))
def test_ell_range_has_k_integers(k):
    assert len(_ell_range(k)) == k


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_theta_dissection(k):
    assert theta_dissection_residual(k, 10, 100) == 0


def test_theta_dissection_larger_k():
    assert theta_dissection_residual(5, 12, 80) == 0


def test_theta_bivariate_matches_product_numerically():
    th = theta_bivariate(14, 40)
    z, q = Fraction(1, 3), Fraction(1, 10)
    with mp.workprec(128):
        total = mp.fsum(
            mp.mpf(th[m, n].numerator) / th[m, n].denominator * (mp.mpf(1) / 3) ** m * (mp.mpf(1) / 10) ** n
            for m in range(-14, 15)
            for n in range(41)
        )
        assert abs(total - theta_numeric(mp.mpf(z.numerator) / z.denominator, mp.mpf(q.numerator) / q.denominator)) < 1e-12
    assert th.z_degree == 14 and th.q_order == 40


def test_bivariate_window_is_min_of_both():
    a = BivariateSeries.from_monomials([(0, 0, 1), (3, 2, 5)], 3, 10)
    b = BivariateSeries.from_monomials([(1, 1, 2)], 2, 20)
    c = a + b
    assert (c.z_degree, c.q_order) == (2, 10)
    assert c[1, 1] == 2 and c[0, 0] == 1
    assert (a - a).max_abs() == 0


# --- derivative lemma -----------------------------------------------------------

@pytest.mark.parametrize("parity", [0, 1])
@pytest.mark.parametrize("alpha", [Fraction(1, 2), Fraction(1, 3), Fraction(4, 5)])
def test_lambert_derivative(parity, alpha):
    assert lambert_derivative_check(parity, alpha, "0.1", "1e-6") < 1e-10


def test_lambert_derivative_second_order():
    a = lambert_derivative_check(0, Fraction(1, 3), "0.3", "1e-2")
    b = lambert_derivative_check(0, Fraction(1, 3), "0.3", "5e-3")
    assert 3.5 < a / b < 4.5


def test_theta_derivative_identity():
    assert theta_derivative_check("0.2", "1e-6") < 1e-10


def test_lambert_derivative_domain():
    with pytest.raises(ValueError):
        lambert_derivative_check(0, 1, "0.1", "1e-6")
    with pytest.raises(ValueError):
        lambert_derivative_check(0, Fraction(1, 2), "1.5", "1e-6")
    with pytest.raises(ValueError):
        theta_derivative_check("0", "1e-6")


# --- classical corollaries ----------------------------------------------------------

def test_two_squares():
    assert two_squares_check(500) == 0


def test_two_squares_oracle_agreement():
    r2 = lattice_r2(200)
    assert r2[1] == 4 and r2[3] == 0
    for n in range(1, 201):
        d1, d3 = divisor_count_mod4(n)
        assert r2[n] == 4 * (d1 - d3)


def test_cubic_theta():
    res = cubic_theta_check(300)
    assert res.all_zero()
    assert (res.residual_cth, res.residual_abc2, res.residual_cubic, res.residual_a) == (0, 0, 0, 0)


# --- vanishing and divisibility -------------------------------------------------------

@pytest.mark.parametrize("k", sorted(PUBLISHED))
def test_vanishing_classes_published(k):
    assert vanishing_classes(k) == PUBLISHED[k]


@pytest.mark.parametrize("k", sorted(PUBLISHED))
def test_vanishing_holds(k):
    assert all(not bad for bad in vanishing_check(k, 600).values())


def test_vanishing_on_exact_coefficients():
    c = borwein_coeffs(3, 3, 600)
    assert all(c[n] == 0 for n in range(2, 601, 3))


def test_vanishing_requires_odd_k():
    with pytest.raises(ValueError):
        vanishing_classes(4)


@given(st.integers(1, 60).map(lambda j: 2 * j + 1))
def test_vanishing_class_definition(k):
    classes = vanishing_classes(k)
    for h in range(k):
        solvable = any(((2 * l + 1) ** 2 - 1 - 8 * h) % k == 0 for l in range(k))
        assert (h in classes) != solvable


@pytest.mark.parametrize("k", [1, 3, 5, 7, 9])
def test_divisibility(k):
    assert divisibility_check(k, 600)


def test_divisibility_first_index():
    assert borwein_coeffs(3, 3, 1)[1] % 3 == 0


def test_divisibility_requires_odd_k():
    with pytest.raises(ValueError):
        divisibility_check(2, 10)


# --- dissections -----------------------------------------------------------------

def test_dissect_small():
    d = dissect(TruncatedSeries([1, 1, 1, 1], 3), 3)
    assert [list(c.coeffs) for c in d.components] == [[1, 1], [1], [1]]


@given(
    st.lists(st.fractions(-5, 5, max_denominator=7), min_size=1, max_size=60),
    st.integers(1, 8),
)
def test_dissect_round_trip(coeffs, m):
    s = TruncatedSeries(coeffs, len(coeffs) - 1)
    if s.order < m - 1:
        with pytest.raises(ValueError):
            dissect(s, m)
        return
    assert interleave(dissect(s, m)) == s


def test_conjecture_sign_convention():
    s = TruncatedSeries([5, 7, 11, 13], 3)
    a, b, c = conjecture1_components(s)
    assert list(a.coeffs) == [5, 13] and list(b.coeffs) == [-7] and list(c.coeffs) == [-11]


# --- sign patterns ----------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3, 5, 7])
@pytest.mark.parametrize("delta", [1, 3])
def test_sign_patterns(p, delta):
    r = sign_pattern_check(p, delta, 600)
    assert r.claimed and r.holds and r.first_violation is None


def test_sign_pattern_exploratory_not_claimed():
    assert not sign_pattern_check(3, Fraction(1, 2), 50).claimed
    assert not sign_pattern_check(4, 1, 50).claimed


def test_corollary_regime_three_halves():
    assert corollary_sign_check(Fraction(3, 2), 600).holds


def test_conjecture1_range():
    assert conjecture1_in_range(Fraction("0.22799812734") + Fraction(1, 10**9))
    assert not conjecture1_in_range(Fraction("0.2279"))
    assert conjecture1_in_range(1) and conjecture1_in_range(2) and conjecture1_in_range(3)
    assert not conjecture1_in_range(Fraction(3, 2))
    assert not conjecture1_in_range(Fraction(1, 5))


@pytest.mark.parametrize("delta", [1, 3])
def test_conjecture1_known_cases(delta):
    r = conjecture1_check(delta, 600)
    assert r.in_range and r.holds


def test_conjecture1_below_range_is_reported():
    r = conjecture1_check(Fraction(1, 5), 300)
    assert not r.in_range
    assert not r.holds
    assert r.first_negative["A"] == 1
