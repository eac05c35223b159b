from fractions import Fraction
from math import gcd

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp

from oracles import dedekind_by_floors
from qborwein.modular import (
    PhaseAngle,
    TransformContext,
    dedekind_sum,
    dedekind_sum_direct,
    is_prime,
    kloosterman_A,
    kloosterman_A_interval,
    kloosterman_angles,
    modular_transform_sides,
    omega,
    phase_ratio_angle,
    phase_ratio_pow,
    verify_modular_transform,
)

iv = mpmath.iv


@st.composite
def coprime_pairs(draw, kmax=400):
    k = draw(st.integers(1, kmax))
    h = draw(st.integers(-3 * k, 3 * k))
    if gcd(h, k) != 1:
        h = 1
    return h, k


# --- Dedekind sums --------------------------------------------------------------

@pytest.mark.parametrize(
    "h, k, expected",
    [(0, 1, 0), (1, 2, 0), (1, 3, Fraction(1, 18)), (2, 3, Fraction(-1, 18)), (1, 5, Fraction(1, 5))],
)
def test_small_dedekind_sums(h, k, expected):
    assert dedekind_sum(h, k) == expected
    assert dedekind_sum_direct(h, k) == expected
    assert dedekind_by_floors(h, k) == expected


def test_dedekind_needs_coprime():
    with pytest.raises(ValueError):
        dedekind_sum(2, 4)
    with pytest.raises(ValueError):
        dedekind_sum_direct(3, 6)
    with pytest.raises(ValueError):
        dedekind_sum(1, 0)


@given(coprime_pairs(60))
@settings(max_examples=80)
def test_direct_sum_matches_floor_definition(hk):
    h, k = hk
    assert dedekind_sum_direct(h, k) == dedekind_by_floors(h, k)


@given(coprime_pairs())
@settings(max_examples=200)
def test_fast_matches_direct(hk):
    h, k = hk
    assert dedekind_sum(h, k) == dedekind_sum_direct(h, k)


@given(coprime_pairs())
@settings(max_examples=200)
def test_odd_symmetry(hk):
    h, k = hk
    assert dedekind_sum(k - h, k) == -dedekind_sum(h, k)


@given(st.integers(1, 10**12), st.integers(1, 10**12))
@settings(max_examples=200)
def test_reciprocity_large_arguments(h, k):
    if gcd(h, k) != 1:
        return
    lhs = dedekind_sum(h, k) + dedekind_sum(k, h)
    assert lhs == Fraction(-1, 4) + (Fraction(h, k) + Fraction(k, h) + Fraction(1, h * k)) / 12


# --- phases ------------------------------------------------------------------

def test_phase_angle_reduction():
    assert PhaseAngle(Fraction(1)).theta_over_pi == -1
    assert PhaseAngle(Fraction(-1)).theta_over_pi == -1
    assert PhaseAngle(Fraction(7, 3)).theta_over_pi == Fraction(1, 3)
    assert PhaseAngle(Fraction(-5, 4)).theta_over_pi == Fraction(3, 4)


@given(st.fractions(min_value=-50, max_value=50, max_denominator=40))
def test_phase_angle_range(t):
    a = PhaseAngle(t)
    assert -1 <= a.theta_over_pi < 1
    assert (a.theta_over_pi - t) % 2 == 0


def test_omega_values():
    assert omega(0, 1).theta_over_pi == 0
    assert omega(1, 3).theta_over_pi == Fraction(1, 18)
    assert omega(2, 3).theta_over_pi == Fraction(-1, 18)


def test_phase_ratio_for_k3():
    assert phase_ratio_angle(1, 3, 3).theta_over_pi == Fraction(-1, 18)
    for delta in (Fraction(1), Fraction(5, 2), Fraction(1, 7)):
        got = phase_ratio_pow(1, 3, 3, delta, 128)
        with mp.workprec(128):
            expected = mp.expjpi(-delta.numerator * mp.mpf(1) / (18 * delta.denominator))
            assert abs(got - expected) < mp.mpf(2) ** -120


def test_phase_ratio_zero_power_is_one():
    assert phase_ratio_pow(2, 9, 3, 0) == 1


def test_phase_ratio_needs_divisibility():
    with pytest.raises(ValueError):
        phase_ratio_pow(1, 4, 3, 1)


@given(st.integers(1, 40), st.integers(0, 200), st.integers(2, 5))
@settings(max_examples=60)
def test_integer_powers_are_branch_free(j, h, delta):
    k = 3 * j
    if gcd(h, k) != 1:
        return
    base = phase_ratio_pow(h, k, 3, 1, 128)
    got = phase_ratio_pow(h, k, 3, delta, 128)
    with mp.workprec(128):
        assert abs(got - base**delta) < mp.mpf(2) ** -110


# --- Kloosterman-type sums --------------------------------------------------------------

@pytest.mark.parametrize("delta", [Fraction(1), Fraction(1, 4), Fraction(3), Fraction(7, 3)])
@pytest.mark.parametrize("n", range(6))
def test_A3_cosine_form(delta, n):
    got = kloosterman_A(3, 3, delta, n, 128)
    with mp.workprec(128):
        t = delta / 18 + Fraction(2 * n, 3)
        expected = mp.mpf(2) / 3 * mp.cospi(mp.mpf(t.numerator) / t.denominator)
        assert abs(got - expected) < mp.mpf(2) ** -120


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_A_p_zero_power(p):
    got = kloosterman_A(p, p, 0, 0, 128)
    with mp.workprec(128):
        assert abs(got - mp.mpf(p - 1) / p) < mp.mpf(2) ** -100


@pytest.mark.parametrize("n", range(6))
def test_A6_direct_two_terms(n):
    # residues 1 and 5 mod 6
    terms = []
    with mp.workprec(160):
        for h in (1, 5):
            theta = dedekind_by_floors(h, 2) - dedekind_by_floors(h, 6)
            terms.append(mp.expjpi(mp.mpf(theta.numerator) / theta.denominator) * mp.expjpi(mp.mpf(-2 * h * n) / 6))
        expected = (terms[0] + terms[1]) / 6
    got = kloosterman_A(3, 6, 1, n, 128)
    with mp.workprec(128):
        assert abs(expected.imag) < mp.mpf(2) ** -120
        assert abs(got - expected.real) < mp.mpf(2) ** -120


@given(st.sampled_from([2, 3, 5]), st.integers(1, 12), st.fractions(0, 6, max_denominator=5), st.integers(0, 60))
@settings(max_examples=40)
def test_A_periodic_in_n(p, j, delta, n):
    k = p * j
    a = kloosterman_angles(p, k, delta, n)
    b = kloosterman_angles(p, k, delta, n + k)
    assert a == b


@given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 15), st.fractions(0, 6, max_denominator=7), st.integers(0, 40))
@settings(max_examples=40)
def test_A_is_real_and_enclosed(p, j, delta, n):
    k = p * j
    value = kloosterman_A(p, k, delta, n, 128)  # raises if the imaginary part is not negligible
    iv.prec = 128
    enclosure = kloosterman_A_interval(p, k, delta, n)
    assert enclosure.a <= value <= enclosure.b


def test_A_needs_divisibility():
    with pytest.raises(ValueError):
        kloosterman_A(3, 4, 1, 0)


# --- transformation ---------------------------------------------------------------

def test_context_inverses():
    ctx = TransformContext.build(2, 9, 3)
    assert ctx.d == 3
    assert (ctx.h * ctx.h_prime + 1) % 9 == 0
    assert (ctx.h * 3 // 3 * ctx.h_d_prime + 1) % 3 == 0
    assert TransformContext.build(11, 9, 3).h == 2


def test_context_validation():
    with pytest.raises(ValueError):
        TransformContext.build(3, 9, 3)
    with pytest.raises(ValueError):
        TransformContext.build(1, 4, 4)
    with pytest.raises(ValueError):
        TransformContext(h=1, k=5, p=5, d=5, h_prime=1, h_d_prime=0)


@pytest.mark.parametrize("p, h, k", [(3, 0, 1), (2, 1, 2), (3, 1, 3), (5, 2, 5), (2, 1, 3), (5, 1, 7), (3, 2, 9), (7, 3, 14)])
@pytest.mark.parametrize("delta", [Fraction(1), Fraction(3, 2), Fraction(1, 3), 2])
def test_transformation_holds(p, h, k, delta):
    ctx = TransformContext.build(h, k, p)
    assert verify_modular_transform(ctx, delta, 1, 60, 128) < mp.mpf(10) ** -20


def test_transformation_complex_z():
    ctx = TransformContext.build(2, 5, 5)
    z = mpmath.mpc("1.3", "0.4")
    assert verify_modular_transform(ctx, Fraction(7, 2), z, 0, 128) < mp.mpf(10) ** -20


def test_zero_power_both_sides_one():
    ctx = TransformContext.build(1, 3, 3)
    lhs, rhs = modular_transform_sides(ctx, 0)
    assert lhs == 1 and rhs == 1


def test_p3_exponent_forms_agree():
    for h, k in [(0, 1), (1, 3), (2, 3), (1, 6)]:
        ctx = TransformContext.build(h, k, 3)
        assert verify_modular_transform(ctx, Fraction(3, 2), exponent_form="as-stated") < mp.mpf(10) ** -20


def test_p3_specific_exponent_fails_for_other_p():
    ctx = TransformContext.build(2, 5, 5)
    assert verify_modular_transform(ctx, 1, exponent_form="as-stated") > mp.mpf(10) ** -3


def test_plus_one_inverse_convention_only_works_for_small_k():
    for h, k, p in [(1, 2, 2), (0, 1, 3)]:
        ctx = TransformContext.build(h, k, p, inverse_sign=1)
        assert verify_modular_transform(ctx, 1) < mp.mpf(10) ** -20
    ctx = TransformContext.build(1, 3, 3, inverse_sign=1)
    assert verify_modular_transform(ctx, 1) > mp.mpf(10) ** -3


def test_residual_shrinks_with_precision():
    ctx = TransformContext.build(2, 5, 5)
    ladder = [verify_modular_transform(ctx, Fraction(3, 2), 1, 60, bits) for bits in (64, 128, 256)]
    assert ladder[0] > ladder[1] > ladder[2]
    with mp.workprec(256):
        assert ladder[2] < mp.mpf(2) ** -240


def test_transformation_needs_positive_real_part():
    ctx = TransformContext.build(1, 3, 3)
    with pytest.raises(ValueError):
        verify_modular_transform(ctx, 1, z=mpmath.mpc(-1, 1))


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
