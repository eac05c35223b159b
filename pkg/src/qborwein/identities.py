"""Exact checks of the theta-function identities and sign patterns.

Residual functions return the largest absolute coefficient difference as a
:class:`~fractions.Fraction`; an identity holds to the requested order iff
the residual is exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Iterable

from mpmath import mp

from .asymptotics import predicted_sign
from .modular import is_prime
from .series import (
    EtaLikeProduct,
    TruncatedSeries,
    as_rational,
    borwein_coeffs,
    expand_product,
    partition_numbers,
)

__all__ = [
    "BivariateSeries",
    "Dissection",
    "dissect",
    "interleave",
    "conjecture1_components",
    "lambert_series",
    "jacobi_triple_product",
    "theorem_main_sides",
    "theorem_main_residual",
    "theta_series",
    "theta_dissection_rhs",
    "theta_dissection_residual",
    "theta_numeric",
    "lambert_derivative_check",
    "theta_derivative_check",
    "two_squares_check",
    "cubic_theta_check",
    "vanishing_classes",
    "vanishing_check",
    "divisibility_check",
    "SignPatternReport",
    "sign_pattern_check",
    "CorollarySignReport",
    "corollary_sign_check",
    "Conjecture1Report",
    "conjecture1_in_range",
    "conjecture1_check",
]


def _eta(order: int, *factors: tuple[int, object]) -> TruncatedSeries:
    return expand_product(EtaLikeProduct(factors), order)


# ---------------------------------------------------------------------------
# bivariate series in z and q
# ---------------------------------------------------------------------------

class BivariateSeries:
    """sum c[m][n] z^m q^n for |m| <= z_degree and 0 <= n <= q_order.

    Stored as one :class:`TruncatedSeries` per power of z.  Binary
    operations work on the intersection of the two windows.
    """

    __slots__ = ("z_degree", "q_order", "_rows")

    def __init__(self, rows: dict[int, TruncatedSeries] | None, z_degree: int, q_order: int):
        if z_degree < 0 or q_order < 0:
            raise ValueError("window sizes must be non-negative")
        self.z_degree = z_degree
        self.q_order = q_order
        zero = TruncatedSeries([], q_order)
        rows = rows or {}
        self._rows = {}
        for m in range(-z_degree, z_degree + 1):
            r = rows.get(m, zero)
            if r.order < q_order:
                raise ValueError(f"row z^{m} is only known to q^{r.order}")
            self._rows[m] = r.truncate(q_order)

    @classmethod
    def from_monomials(
        cls, terms: Iterable[tuple[int, int, object]], z_degree: int, q_order: int
    ) -> "BivariateSeries":
        """Sum of c z^m q^n over ``terms``; monomials outside the window are dropped."""
        table: dict[int, dict[int, Fraction]] = {}
        for m, n, c in terms:
            if abs(m) <= z_degree and 0 <= n <= q_order:
                row = table.setdefault(m, {})
                row[n] = row.get(n, 0) + as_rational(c)
        rows = {}
        for m, entries in table.items():
            coeffs = [0] * (q_order + 1)
            for n, c in entries.items():
                coeffs[n] = c
            rows[m] = TruncatedSeries(coeffs, q_order)
        return cls(rows, z_degree, q_order)

    def row(self, m: int) -> TruncatedSeries:
        """Coefficient of z^m as a q-series."""
        return self._rows[m]

    def __getitem__(self, mn: tuple[int, int]) -> Fraction:
        m, n = mn
        return self._rows[m][n]

    def _window(self, other: "BivariateSeries") -> tuple[int, int]:
        return min(self.z_degree, other.z_degree), min(self.q_order, other.q_order)

    def __add__(self, other: "BivariateSeries") -> "BivariateSeries":
        M, N = self._window(other)
        return BivariateSeries(
            {m: self._rows[m].truncate(N) + other._rows[m].truncate(N) for m in range(-M, M + 1)}, M, N
        )

    def __neg__(self) -> "BivariateSeries":
        return BivariateSeries({m: -r for m, r in self._rows.items()}, self.z_degree, self.q_order)

    def __sub__(self, other: "BivariateSeries") -> "BivariateSeries":
        return self + (-other)

    def mul_q(self, s: TruncatedSeries) -> "BivariateSeries":
        """Multiply every z-row by the q-series ``s``."""
        N = min(self.q_order, s.order)
        return BivariateSeries({m: r.truncate(N) * s.truncate(N) for m, r in self._rows.items()}, self.z_degree, N)

    def max_abs(self) -> Fraction:
        return max((r.max_abs() for r in self._rows.values()), default=Fraction(0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, BivariateSeries):
            return NotImplemented
        return (self.z_degree, self.q_order, self._rows) == (other.z_degree, other.q_order, other._rows)

    def __repr__(self) -> str:
        return f"BivariateSeries(z_degree={self.z_degree}, q_order={self.q_order})"


# ---------------------------------------------------------------------------
# dissections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Dissection:
    """Residue-class split: component r holds the coefficients of q^(mn+r)."""

    modulus: int
    order: int
    components: tuple[TruncatedSeries, ...]


def dissect(series: TruncatedSeries, m: int) -> Dissection:
    if m < 1:
        raise ValueError("modulus must be positive")
    N = series.order
    if N < m - 1:
        raise ValueError(f"need order >= {m - 1} to fill every residue class")
    c = series.coeffs
    comps = tuple(TruncatedSeries(c[r::m], (N - r) // m) for r in range(m))
    return Dissection(m, N, comps)


def interleave(d: Dissection) -> TruncatedSeries:
    """Inverse of :func:`dissect`."""
    out = [Fraction(0)] * (d.order + 1)
    for r, comp in enumerate(d.components):
        out[r :: d.modulus] = comp.coeffs
    return TruncatedSeries(out, d.order)


def conjecture1_components(series: TruncatedSeries) -> tuple[TruncatedSeries, TruncatedSeries, TruncatedSeries]:
    """(A, B, C) with series = A(q^3) - q B(q^3) - q^2 C(q^3)."""
    a, b, c = dissect(series, 3).components
    return a, -b, -c


# ---------------------------------------------------------------------------
# building blocks
# ---------------------------------------------------------------------------

def lambert_series(terms: Iterable[tuple[int, int]], order: int, alternating: bool = False) -> TruncatedSeries:
    """sum c q^e / (1 - q^e) over (e, c) in ``terms``, to ``order``.

    With ``alternating`` each term is c q^e / (1 + q^e) instead.  Expanded by
    adding c (or (-1)^(j-1) c) at every multiple e*j.
    """
    acc = [0] * (order + 1)
    for e, c in terms:
        if e < 1:
            raise ValueError("Lambert exponents must be positive")
        sign = 1
        for idx in range(e, order + 1, e):
            acc[idx] += sign * c
            if alternating:
                sign = -sign
    return TruncatedSeries(acc, order)


def _progression(a: int, b: int, order: int) -> Iterable[int]:
    """a, a + b, a + 2b, ... up to ``order``."""
    return range(a, order + 1, b)


def jacobi_triple_product(sign: int, a: int, modulus: int, order: int) -> TruncatedSeries:
    """(x, Q/x, Q; Q)_inf for x = sign * q^a, Q = q^modulus, 0 < a < modulus.

    Uses sum_n (-1)^n Q^(n(n-1)/2) x^n = sum_n (-sign)^n q^(modulus n(n-1)/2 + a n).
    """
    if not 0 < a < modulus:
        raise ValueError("need 0 < a < modulus")
    acc = [0] * (order + 1)
    for direction in (1, -1):
        n = 0 if direction == 1 else -1
        while True:
            e = modulus * n * (n - 1) // 2 + a * n
            if e > order:
                break
            acc[e] += (-sign) ** abs(n)
            n += direction
    return TruncatedSeries(acc, order)


def theta_series(order: int) -> TruncatedSeries:
    """sum_{n in Z} q^(n^2)."""
    acc = [0] * (order + 1)
    r = isqrt(order)
    for n in range(-r, r + 1):
        acc[n * n] += 1
    return TruncatedSeries(acc, order)


def _hexagonal_lattice(order: int) -> TruncatedSeries:
    """sum over (m, n) in Z^2 of q^(m^2 + mn + n^2).

    m^2 + mn + n^2 >= (m^2 + n^2)/2, so |m|, |n| <= sqrt(2 order) covers
    every exponent up to ``order``.
    """
    acc = [0] * (order + 1)
    r = isqrt(2 * order) + 1
    for m in range(-r, r + 1):
        for n in range(-r, r + 1):
            e = m * m + m * n + n * n
            if e <= order:
                acc[e] += 1
    return TruncatedSeries(acc, order)


# ---------------------------------------------------------------------------
# the cubic identity for (q;q)^3
# ---------------------------------------------------------------------------

def theorem_main_sides(k: int, order: int) -> tuple[TruncatedSeries, TruncatedSeries]:
    """Both sides of the finite-sum expansion of (q;q)_inf^3 at modulus k.

    Left: (q;q)^3, minus (-1)^((k-1)/2) k q^((k^2-1)/8) (q^{k^2};q^{k^2})^3
    when k is odd.  Right: sum over 0 <= l < (k-1)/2 of
    (-1)^l q^(l(l+1)/2) (s q^a, s q^b, q^{k^2}; q^{k^2})
    (2l + 1 -+ 2k * Lambert), with a = k(k-1-2l)/2, b = k(k+1+2l)/2 and
    s = -1 for even k, +1 for odd k.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    K = k * k
    lhs = _eta(order, (1, 3))
    if k % 2:
        corr = _eta(order, (K, 3)).shift((K - 1) // 8) if (K - 1) // 8 <= order else TruncatedSeries([], order)
        lhs = lhs - corr * ((-1) ** ((k - 1) // 2) * k)
    even = k % 2 == 0
    rhs = TruncatedSeries([], order)
    l = 0
    while 2 * l < k - 1:
        a = k * (k - 1 - 2 * l) // 2
        b = k * (k + 1 + 2 * l) // 2
        shift = l * (l + 1) // 2
        if shift <= order:
            jtp = jacobi_triple_product(-1 if even else 1, a, K, order)
            lam = lambert_series(
                [(e, 1) for e in _progression(a, K, order)] + [(e, -1) for e in _progression(b, K, order)],
                order,
                alternating=even,
            )
            factor = TruncatedSeries.one(order) * (2 * l + 1) + lam * (-2 * k if even else 2 * k)
            rhs = rhs + (jtp * factor).shift(shift) * ((-1) ** l)
        l += 1
    return lhs, rhs


def theorem_main_residual(k: int, order: int) -> Fraction:
    lhs, rhs = theorem_main_sides(k, order)
    return (lhs - rhs).max_abs()


# ---------------------------------------------------------------------------
# theta(z; q) and its k-dissection
# ---------------------------------------------------------------------------

def _ell_range(k: int) -> range:
    lo = -((k - 1) // 2)  # ceil((1-k)/2)
    hi = k // 2  # ceil((k-1)/2)
    return range(lo, hi + 1)


def _theta_numerator(z_degree: int, order: int) -> BivariateSeries:
    """sum_n (-1)^n q^(n(n-1)/2) z^n."""
    terms = ((n, n * (n - 1) // 2, (-1) ** abs(n)) for n in range(-z_degree, z_degree + 1))
    return BivariateSeries.from_monomials(terms, z_degree, order)


def theta_bivariate(z_degree: int, order: int) -> BivariateSeries:
    """theta(z; q) = (z, q/z; q)_inf on the window |m| <= z_degree, n <= order."""
    return _theta_numerator(z_degree, order).mul_q(partition_numbers(order))


def theta_dissection_rhs(k: int, z_degree: int, order: int) -> BivariateSeries:
    """(q^{k^2};q^{k^2}) / (q;q) * sum_l (-1)^l q^(l(l-1)/2) z^l theta((-1)^(k-1) z^k q^(k(k-1+2l)/2); q^{k^2}).

    Each inner theta is itself expanded as its bilateral sum over
    (q^{k^2};q^{k^2}); the monomial from (l, n) is z^(l+kn) q^((l+kn)(l+kn-1)/2)
    with sign (-1)^l ((-1)^n (-1)^((k-1)n)).
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    K = k * k
    terms = []
    for l in _ell_range(k):
        n_lo = -((z_degree + l) // k) - 1
        n_hi = (z_degree - l) // k + 1
        for n in range(n_lo, n_hi + 1):
            m = l + k * n
            if abs(m) > z_degree:
                continue
            e = l * (l - 1) // 2 + K * n * (n - 1) // 2 + n * k * (k - 1 + 2 * l) // 2
            sign = (-1) ** (abs(l) + abs(n) * k)
            terms.append((m, e, sign))
    inner = BivariateSeries.from_monomials(terms, z_degree, order)
    inner = inner.mul_q(_eta(order, (K, -1)))
    return inner.mul_q(_eta(order, (1, -1), (K, 1)))


def theta_dissection_residual(k: int, z_degree: int, order: int) -> Fraction:
    return (theta_bivariate(z_degree, order) - theta_dissection_rhs(k, z_degree, order)).max_abs()


# ---------------------------------------------------------------------------
# derivative of theta, numerically
# ---------------------------------------------------------------------------

def theta_numeric(x, q, precision_bits: int = 128):
    """theta(x; q) = prod_{n>=0} (1 - x q^n)(1 - q^(n+1)/x) by truncated product."""
    with mp.workprec(precision_bits + 16):
        x, q = mp.mpf(x), mp.mpf(q)
        eps = mp.ldexp(1, -precision_bits - 8)
        prod = mp.mpf(1)
        qn = mp.mpf(1)
        while True:
            prod *= (1 - x * qn) * (1 - qn * q / x)
            qn *= q
            if qn * (abs(x) + 1 / abs(x)) < eps:
                return prod


def _lemma_lambert(sign: int, alpha, q, precision_bits: int):
    eps = mp.ldexp(1, -precision_bits - 8)
    total = mp.mpf(0)
    n = 0
    while True:
        u = sign * q ** (n + alpha)
        v = sign * q ** (n + 1 - alpha)
        total += u / (1 - u) - v / (1 - v)
        if abs(u) < eps and abs(v) < eps:
            return total
        n += 1


def lambert_derivative_check(k_parity: int, alpha, q_value, step, precision_bits: int = 128):
    """|central difference of theta((-1)^k q^alpha e^(-x); q) at 0 - theta * Lambert sum|."""
    alpha = as_rational(alpha)
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    with mp.workprec(precision_bits + 16):
        q = mp.mpf(q_value)
        h = mp.mpf(step)
        if not 0 < q < 1:
            raise ValueError("q must lie in (0, 1)")
        if h <= 0:
            raise ValueError("step must be positive")
        sign = -1 if k_parity % 2 else 1
        al = mp.mpf(alpha.numerator) / alpha.denominator
        x0 = sign * q**al
        deriv = (theta_numeric(x0 * mp.exp(-h), q, precision_bits) - theta_numeric(x0 * mp.exp(h), q, precision_bits)) / (
            2 * h
        )
        rhs = theta_numeric(x0, q, precision_bits) * _lemma_lambert(sign, al, q, precision_bits)
        out = abs(deriv - rhs)
    with mp.workprec(precision_bits):
        return +out


def theta_derivative_check(q_value, step, precision_bits: int = 128):
    """|central difference of theta(e^(-x); q) at 0 - (q;q)_inf^2|."""
    with mp.workprec(precision_bits + 16):
        q = mp.mpf(q_value)
        h = mp.mpf(step)
        if not 0 < q < 1:
            raise ValueError("q must lie in (0, 1)")
        deriv = (theta_numeric(mp.exp(-h), q, precision_bits) - theta_numeric(mp.exp(h), q, precision_bits)) / (2 * h)
        out = abs(deriv - mp.qp(q) ** 2)
    with mp.workprec(precision_bits):
        return +out


# ---------------------------------------------------------------------------
# classical corollaries
# ---------------------------------------------------------------------------

def two_squares_check(order: int) -> Fraction:
    """(sum q^(n^2))^2 against 1 + 4 sum (q^(4n+1)/(1-q^(4n+1)) - q^(4n+3)/(1-q^(4n+3)))."""
    lhs = theta_series(order) ** 2
    lam = lambert_series(
        [(e, 1) for e in _progression(1, 4, order)] + [(e, -1) for e in _progression(3, 4, order)], order
    )
    rhs = TruncatedSeries.one(order) + lam * 4
    return (lhs - rhs).max_abs()


@dataclass(frozen=True)
class CubicThetaResiduals:
    residual_cth: Fraction
    residual_abc2: Fraction
    residual_cubic: Fraction
    residual_a: Fraction

    def all_zero(self) -> bool:
        return not (self.residual_cth or self.residual_abc2 or self.residual_cubic or self.residual_a)


def cubic_theta_check(order: int) -> CubicThetaResiduals:
    """Residuals of four identities between a(q), b(q), c(q).

    a is built by lattice enumeration, b = (q;q)^3/(q^3;q^3),
    c(q^3) = 3q (q^9;q^9)^3/(q^3;q^3) and c^3 = 27q (q^3;q^3)^9/(q;q)^3.
    """
    a = _hexagonal_lattice(order)
    b = _eta(order, (1, 3), (3, -1))
    c_of_q3 = (_eta(order, (9, 3), (3, -1)) * 3).shift(1)

    lhs_cth = (_eta(order, (1, 3)) + (_eta(order, (9, 3)) * 3).shift(1)) * _eta(order, (3, -1))
    rhs_cth = TruncatedSeries.one(order) + lambert_series(
        [(e, 6) for e in _progression(3, 9, order)] + [(e, -6) for e in _progression(6, 9, order)], order
    )

    a3 = a.truncate(order // 3).dilate(3, order)
    c_cubed = (_eta(order, (3, 9), (1, -3)) * 27).shift(1)

    rhs_a = TruncatedSeries.one(order) + lambert_series(
        [(e, 6) for e in _progression(1, 3, order)] + [(e, -6) for e in _progression(2, 3, order)], order
    )
    return CubicThetaResiduals(
        residual_cth=(lhs_cth - rhs_cth).max_abs(),
        residual_abc2=(a3 - b - c_of_q3).max_abs(),
        residual_cubic=(a**3 - b**3 - c_cubed).max_abs(),
        residual_a=(a - rhs_a).max_abs(),
    )


# ---------------------------------------------------------------------------
# cubic Borwein coefficients: vanishing, divisibility
# ---------------------------------------------------------------------------

def _require_odd(k: int) -> None:
    if k < 1 or k % 2 == 0:
        raise ValueError(f"k must be an odd positive integer, got {k}")


def vanishing_classes(k: int) -> frozenset[int]:
    """Residues h mod k for which (2l+1)^2 = 1 + 8h (mod k) has no solution l."""
    _require_odd(k)
    squares = {(2 * l + 1) ** 2 % k for l in range(k)}
    return frozenset(h for h in range(k) if (1 + 8 * h) % k not in squares)


def vanishing_check(k: int, order: int) -> dict[int, list[int]]:
    """For each vanishing class h, the indices kn + h <= order with c_k^(3) != 0.

    Empty lists everywhere means the prediction holds to ``order``.
    """
    classes = vanishing_classes(k)
    if k == 1 or not classes:
        return {h: [] for h in classes}
    c = borwein_coeffs(k, 3, order)
    return {h: [i for i in range(h, order + 1, k) if c[i] != 0] for h in sorted(classes)}


def divisibility_check(k: int, order: int) -> bool:
    """True iff k divides c_k^(3)(kn + (k^2-1)/8) for every such index <= order."""
    _require_odd(k)
    if k == 1:
        return True
    c = borwein_coeffs(k, 3, order).integer_coeffs()
    start = (k * k - 1) // 8
    return all(c[i] % k == 0 for i in range(start, order + 1, k))


# ---------------------------------------------------------------------------
# sign patterns
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SignPatternReport:
    """c_p^(delta)(n) c_p^(delta)(n+p) >= 0 for 0 <= n, n + p <= order."""

    p: int
    delta: Fraction
    order: int
    violations: int
    first_violation: int | None
    claimed: bool

    @property
    def holds(self) -> bool:
        return self.violations == 0


def sign_pattern_check(p: int, delta, order: int) -> SignPatternReport:
    """Count n with c(n) c(n+p) < 0.

    ``claimed`` marks the cases covered by a proven result (p prime and
    delta = 1 or 3); anything else is exploratory and only reported.
    """
    delta = as_rational(delta)
    c = borwein_coeffs(p, delta, order)
    bad = [n for n in range(order - p + 1) if c[n] * c[n + p] < 0]
    return SignPatternReport(
        p=p,
        delta=delta,
        order=order,
        violations=len(bad),
        first_violation=bad[0] if bad else None,
        claimed=delta in (1, 3) and is_prime(p),
    )


@dataclass(frozen=True)
class CorollarySignReport:
    """Signs of c_3^(delta)(n) for n_min <= n <= order against the cosine prediction."""

    delta: Fraction
    n_min: int
    order: int
    mismatches: tuple[int, ...]
    product_failures: tuple[int, ...]

    @property
    def holds(self) -> bool:
        return not self.mismatches and not self.product_failures


def corollary_sign_check(delta, order: int, n_min: int = 158) -> CorollarySignReport:
    """sign c_3^(delta)(n) = predicted_sign(delta, n) and c(n) c(n+3) > 0 for n_min <= n."""
    delta = as_rational(delta)
    c = borwein_coeffs(3, delta, order)
    sgn = lambda x: (x > 0) - (x < 0)  # noqa: E731
    mismatches = tuple(n for n in range(n_min, order + 1) if sgn(c[n]) != predicted_sign(delta, n))
    products = tuple(n for n in range(n_min, order - 2) if not c[n] * c[n + 3] > 0)
    return CorollarySignReport(delta, n_min, order, mismatches, products)


@dataclass(frozen=True)
class Conjecture1Report:
    delta: Fraction
    order: int
    in_range: bool
    first_negative: dict

    @property
    def nonnegative(self) -> dict:
        return {name: idx is None for name, idx in self.first_negative.items()}

    @property
    def holds(self) -> bool:
        return all(idx is None for idx in self.first_negative.values())


def conjecture1_in_range(delta) -> bool:
    """delta in [(9 - sqrt 73)/2, 1] or [2, 3], decided exactly."""
    delta = as_rational(delta)
    if 2 <= delta <= 3:
        return True
    if delta > 1 or delta <= 0:
        return False
    # delta >= (9 - sqrt 73)/2  <=>  (9 - 2 delta)^2 <= 73 when 9 - 2 delta > 0
    return (9 - 2 * delta) ** 2 <= 73


def conjecture1_check(delta, order: int) -> Conjecture1Report:
    """Nonnegativity of A, B, C in G_3^delta = A(q^3) - q B(q^3) - q^2 C(q^3)."""
    delta = as_rational(delta)
    comps = conjecture1_components(borwein_coeffs(3, delta, order))
    first = {}
    for name, s in zip("ABC", comps):
        first[name] = next((i for i, v in enumerate(s.coeffs) if v < 0), None)
    return Conjecture1Report(delta, order, conjecture1_in_range(delta), first)
