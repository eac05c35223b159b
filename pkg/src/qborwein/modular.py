"""Dedekind sums, the eta multiplier and the Borwein-product transformation.

Angles are carried exactly as rational multiples of pi (:class:`PhaseAngle`)
and only turned into floating values at the very end, so principal-branch
reduction never depends on rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Literal

import mpmath
from mpmath import mp

from .series import as_rational

__all__ = [
    "PhaseAngle",
    "TransformContext",
    "dedekind_sum",
    "dedekind_sum_direct",
    "omega",
    "phase_ratio_angle",
    "phase_ratio_pow",
    "kloosterman_angles",
    "kloosterman_A",
    "kloosterman_A_interval",
    "log_euler_product",
    "modular_transform_sides",
    "verify_modular_transform",
    "is_prime",
]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"p must be prime, got {p}")


@dataclass(frozen=True)
class PhaseAngle:
    """The angle pi * theta_over_pi, reduced so that -1 <= theta_over_pi < 1."""

    theta_over_pi: Fraction

    def __post_init__(self):
        t = as_rational(self.theta_over_pi)
        t = (t + 1) % 2 - 1
        object.__setattr__(self, "theta_over_pi", t)

    def __add__(self, other: "PhaseAngle") -> "PhaseAngle":
        return PhaseAngle(self.theta_over_pi + other.theta_over_pi)

    def __neg__(self) -> "PhaseAngle":
        return PhaseAngle(-self.theta_over_pi)

    def __sub__(self, other: "PhaseAngle") -> "PhaseAngle":
        return self + (-other)

    def scale(self, factor) -> "PhaseAngle":
        """Angle of the principal power: factor * theta, then reduced."""
        return PhaseAngle(self.theta_over_pi * as_rational(factor))

    def cos(self, ctx=mp):
        t = self.theta_over_pi
        return ctx.cos(ctx.pi * ctx.mpf(t.numerator) / t.denominator)

    def sin(self, ctx=mp):
        t = self.theta_over_pi
        return ctx.sin(ctx.pi * ctx.mpf(t.numerator) / t.denominator)

    def unit(self, precision_bits: int = 128):
        """e^{i theta} at the requested precision."""
        with mp.workprec(precision_bits):
            return mpmath.mpc(self.cos(), self.sin())


# ---------------------------------------------------------------------------
# Dedekind sums
# ---------------------------------------------------------------------------

def _check_coprime(h: int, k: int) -> None:
    if k <= 0:
        raise ValueError(f"k must be positive, got {k}")
    if gcd(h, k) != 1:
        raise ValueError(f"Dedekind sum needs gcd(h, k) = 1, got h={h}, k={k}")


def dedekind_sum_direct(h: int, k: int) -> Fraction:
    """s(h, k) straight from the sawtooth definition; O(k)."""
    _check_coprime(h, k)
    # ((j/k)) * ((jh/k)) = (2j - k)(2(jh mod k) - k) / (4k^2) for 1 <= j < k
    total = 0
    for j in range(1, k):
        total += (2 * j - k) * (2 * (j * h % k) - k)
    return Fraction(total, 4 * k * k)


def dedekind_sum(h: int, k: int) -> Fraction:
    """s(h, k) by Euclidean descent on the reciprocity law; O(log k)."""
    _check_coprime(h, k)
    h %= k
    total = Fraction(0)
    sign = 1
    while k > 1:
        # s(h,k) = (h^2 + k^2 + 1)/(12hk) - 1/4 - s(k mod h, h)
        total += sign * (Fraction(h * h + k * k + 1, 12 * h * k) - Fraction(1, 4))
        sign = -sign
        h, k = k % h, h
    return total


def omega(h: int, k: int) -> PhaseAngle:
    """Argument of omega_{h,k} = exp(pi i s(h,k))."""
    return PhaseAngle(dedekind_sum(h, k))


@dataclass(frozen=True)
class TransformContext:
    """(h, k, p) together with d = gcd(p, k) and the two modular inverses.

    ``h_prime`` and ``h_d_prime`` solve h h' = s (mod k) and
    (hp/d) h_d' = s (mod k/d) with s = ``inverse_sign``.  The transformation
    only holds for s = -1 (the classical Hardy-Ramanujan convention); s = +1
    is accepted so the discrepancy can be demonstrated, and agrees with s = -1
    only when k <= 2.
    """

    h: int
    k: int
    p: int
    d: int
    h_prime: int
    h_d_prime: int
    inverse_sign: int = -1

    @classmethod
    def build(cls, h: int, k: int, p: int, inverse_sign: int = -1) -> "TransformContext":
        _require_prime(p)
        if k <= 0:
            raise ValueError("k must be positive")
        if inverse_sign not in (1, -1):
            raise ValueError("inverse_sign must be +1 or -1")
        h %= k
        if gcd(h, k) != 1:
            raise ValueError(f"gcd(h, k) must be 1, got h={h}, k={k}")
        d = gcd(p, k)
        kd = k // d
        h_prime = inverse_sign * pow(h, -1, k) % k if k > 1 else 0
        h_d_prime = inverse_sign * pow(h * p // d, -1, kd) % kd if kd > 1 else 0
        return cls(h, k, p, d, h_prime, h_d_prime, inverse_sign)

    def __post_init__(self):
        if gcd(self.h, self.k) != 1:
            raise ValueError("gcd(h, k) must be 1")
        if self.d != gcd(self.p, self.k):
            raise ValueError("d must equal gcd(p, k)")
        if (self.h * self.h_prime - self.inverse_sign) % self.k:
            raise ValueError("h h' does not satisfy its congruence mod k")
        if (self.h * self.p // self.d * self.h_d_prime - self.inverse_sign) % (self.k // self.d):
            raise ValueError("(hp/d) h_d' does not satisfy its congruence mod k/d")


def phase_ratio_angle(h: int, k: int, p: int) -> PhaseAngle:
    """Arg of omega_{h,k}^{-1} omega_{ph/d, k/d}, d = gcd(p, k), reduced to [-pi, pi)."""
    if k <= 0:
        raise ValueError("k must be positive")
    h %= k
    d = gcd(p, k)
    return PhaseAngle(dedekind_sum(p * h // d, k // d) - dedekind_sum(h, k))


def phase_ratio_pow(h: int, k: int, p: int, delta, precision_bits: int = 128):
    """(omega_{h,k}^{-1} omega_{h,k/p})^delta on the principal branch."""
    delta = as_rational(delta)
    if k % p:
        raise ValueError(f"p={p} must divide k={k}")
    angle = phase_ratio_angle(h, k, p).scale(delta)
    return angle.unit(precision_bits)


@lru_cache(maxsize=4096)
def _scaled_phases(p: int, k: int, delta: Fraction) -> tuple[tuple[int, PhaseAngle], ...]:
    return tuple(
        (h, phase_ratio_angle(h, k, p).scale(delta)) for h in range(k) if gcd(h, k) == 1
    )


def kloosterman_angles(p: int, k: int, delta, n: int) -> list[tuple[int, PhaseAngle]]:
    """Exact angle of every term of A_k^(delta)(n), keyed by h."""
    delta = as_rational(delta)
    if k <= 0 or k % p:
        raise ValueError(f"p={p} must divide k={k}")
    return [(h, base + PhaseAngle(Fraction(-2 * h * n, k))) for h, base in _scaled_phases(p, k, delta)]


def kloosterman_A(p: int, k: int, delta, n: int, precision_bits: int = 128):
    """A_k^(delta)(n) as a real mpf.

    The sum is conjugate-symmetric; an imaginary part above
    2^(-precision_bits/2) signals a bug and raises.
    """
    angles = kloosterman_angles(p, k, delta, n)
    with mp.workprec(precision_bits + 16):
        re = mp.fsum(a.cos() for _, a in angles)
        im = mp.fsum(a.sin() for _, a in angles)
    with mp.workprec(precision_bits):
        re, im = +re / k, +im / k
        if abs(im) > mp.ldexp(1, -(precision_bits // 2)):
            raise ArithmeticError(f"A_{k}({n}) has imaginary part {im}")
        return re


def kloosterman_A_interval(p: int, k: int, delta, n: int):
    """Enclosure of A_k^(delta)(n) at the current ``mpmath.iv`` precision."""
    return _kloosterman_iv(p, k, as_rational(delta), n % k, mpmath.iv.prec)


@lru_cache(maxsize=65536)
def _kloosterman_iv(p: int, k: int, delta: Fraction, n: int, prec: int):
    iv = mpmath.iv
    total = iv.mpf(0)
    for _, a in kloosterman_angles(p, k, delta, n):
        total += a.cos(iv)
    return total / k


# ---------------------------------------------------------------------------
# the transformation formula
# ---------------------------------------------------------------------------

def log_euler_product(q, precision_bits: int, min_terms: int = 0):
    """sum_{n>=1} log(1 - q^n) with principal logs, i.e. -log f(q).

    Stops once |q^n| < 2^(-precision_bits-8), but not before ``min_terms``.
    """
    if abs(q) >= 1:
        raise ValueError("nome must satisfy |q| < 1")
    eps = mp.ldexp(1, -precision_bits - 8)
    total = mpmath.mpc(0)
    qn = q
    n = 1
    while n <= min_terms or abs(qn) >= eps:
        total += mpmath.log(1 - qn)
        qn *= q
        n += 1
    return total


def modular_transform_sides(
    ctx: TransformContext,
    delta,
    z=1,
    order: int = 0,
    precision_bits: int = 128,
    exponent_form: Literal["proof-general", "as-stated"] = "proof-general",
):
    """Both sides of the modular transformation of G_p(q)^delta.

    Left: G_p(exp(2 pi i h/k - 2 pi z/k^2))^delta.  Right:
    (p/d)^(delta/2) (omega_{h,k}^-1 omega_{ph/d,k/d})^delta
    exp(pi delta (d^2 - p)/(12 p z) - delta (p-1) pi z/(12 k^2)) Ghat^delta.
    ``exponent_form="as-stated"`` swaps in the p = 3 constants
    pi delta (d^2-3)/(36 z) - pi delta z/(6 k^2).

    Each infinite product uses at least ``order`` factors and keeps going
    until the factors are within 2^(-precision_bits-8) of 1.
    """
    delta = as_rational(delta)
    h, k, p, d = ctx.h, ctx.k, ctx.p, ctx.d
    with mp.workprec(precision_bits + 32):
        z = mpmath.mpc(z)
        if z.real <= 0:
            raise ValueError("transformation needs Re(z) > 0")
        dl = mp.mpf(delta.numerator) / delta.denominator
        two_pi_i = 2j * mp.pi
        q1 = mp.exp(two_pi_i * h / k - 2 * mp.pi * z / k**2)
        log_lhs = log_euler_product(q1, precision_bits, order) - log_euler_product(
            q1**p, precision_bits, order
        )
        lhs = mp.exp(dl * log_lhs)

        q3 = mp.exp(two_pi_i * d * ctx.h_d_prime / k - 2 * mp.pi * d * d / (p * z))
        q4 = mp.exp(two_pi_i * ctx.h_prime / k - 2 * mp.pi / z)
        log_ghat = -log_euler_product(q3, precision_bits, order) + log_euler_product(
            q4, precision_bits, order
        )
        theta = phase_ratio_angle(h, k, p).scale(delta).theta_over_pi
        if exponent_form == "proof-general":
            expo = mp.pi * dl * (d * d - p) / (12 * p * z) - dl * (p - 1) * mp.pi * z / (12 * k**2)
        elif exponent_form == "as-stated":
            expo = mp.pi * dl * (d * d - 3) / (36 * z) - mp.pi * dl * z / (6 * k**2)
        else:
            raise ValueError(f"unknown exponent_form {exponent_form!r}")
        log_rhs = (
            dl / 2 * mp.log(mp.mpf(p) / d)
            + 1j * mp.pi * mp.mpf(theta.numerator) / theta.denominator
            + expo
            + dl * log_ghat
        )
        rhs = mp.exp(log_rhs)
    with mp.workprec(precision_bits):
        return +lhs, +rhs


def verify_modular_transform(
    ctx: TransformContext,
    delta,
    z=1,
    order: int = 0,
    precision_bits: int = 128,
    exponent_form: Literal["proof-general", "as-stated"] = "proof-general",
):
    """|LHS - RHS| of :func:`modular_transform_sides`."""
    lhs, rhs = modular_transform_sides(ctx, delta, z, order, precision_bits, exponent_form)
    with mp.workprec(precision_bits):
        return abs(lhs - rhs)
