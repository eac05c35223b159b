"""Exact truncated power series over the rationals.

Coefficients are stored as a tuple of integer numerators over one common
positive denominator, which keeps the integer-coefficient case (eta products,
partition numbers, integer powers of Borwein products) on a pure ``int`` fast
path.  Products go through Kronecker substitution: both operands are packed
into a single big integer, multiplied once, and unpacked.

The public surface mirrors the usual q-series toolkit::

    >>> from qborwein.series import borwein_coeffs
    >>> [int(c) for c in borwein_coeffs(3, 1, 6).coeffs]
    [1, -1, -1, 1, -1, 0, 2]
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from numbers import Rational
from typing import Iterable, Sequence

__all__ = [
    "TruncatedSeries",
    "EtaLikeProduct",
    "as_rational",
    "series_mul",
    "series_inv",
    "series_pow",
    "pentagonal_series",
    "expand_product",
    "borwein_coeffs",
    "partition_numbers",
]


def as_rational(value) -> Fraction:
    """Convert ``value`` to an exact :class:`Fraction`.

    Strings may be ``"a/b"`` or decimals (``"0.227"`` becomes ``227/1000``).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as exc:
            raise ValueError(f"not an exact rational literal: {value!r}") from exc
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


# ---------------------------------------------------------------------------
# integer kernels
# ---------------------------------------------------------------------------

def _pack(vals: Sequence[int], wb: int) -> int:
    w = 8 * wb
    mod = 1 << w
    raw = b"".join((v % mod).to_bytes(wb, "little") for v in vals)
    packed = int.from_bytes(raw, "little")
    one = (1).to_bytes(wb, "little")
    zero = bytes(wb)
    negmask = int.from_bytes(b"".join(one if v < 0 else zero for v in vals), "little")
    return packed - (negmask << w)


def _unpack(x: int, wb: int, count: int) -> list[int]:
    w = 8 * wb
    half = 1 << (w - 1)
    offset = int.from_bytes((bytes(wb - 1) + b"\x80") * count, "little")
    y = (x + offset) & ((1 << (w * count)) - 1)
    raw = y.to_bytes(wb * count, "little")
    return [int.from_bytes(raw[i * wb:(i + 1) * wb], "little") - half for i in range(count)]


def _mul_ints(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    """Coefficients 0..n of the product of two integer polynomials."""
    a = a[: n + 1]
    b = b[: n + 1]
    nza = [(i, v) for i, v in enumerate(a) if v]
    nzb = [(i, v) for i, v in enumerate(b) if v]
    out = [0] * (n + 1)
    if not nza or not nzb:
        return out
    if len(nza) <= 4 or len(nzb) <= 4:
        sparse, dense = (nza, b) if len(nza) <= len(nzb) else (nzb, a)
        for i, v in sparse:
            for j in range(min(len(dense), n + 1 - i)):
                d = dense[j]
                if d:
                    out[i + j] += v * d
        return out
    ma = max(abs(v) for _, v in nza)
    mb = max(abs(v) for _, v in nzb)
    bound = ma * mb * min(len(nza), len(nzb))
    wb = (bound.bit_length() + 2 + 7) // 8
    digits = _unpack(_pack(a, wb) * _pack(b, wb), wb, n + 1)
    return digits


def _inv_ints(a: Sequence[int], n: int) -> list[int]:
    """Inverse of an integer series with constant term +-1."""
    a0 = a[0]
    if a0 not in (1, -1):
        raise ValueError("integer inverse needs constant term +-1")
    nz = [(k, v) for k, v in enumerate(a[1: n + 1], start=1) if v]
    b = [0] * (n + 1)
    b[0] = a0
    for j in range(1, n + 1):
        s = 0
        for k, v in nz:
            if k > j:
                break
            s += v * b[j - k]
        b[j] = -a0 * s
    return b


def _ipow_ints(a: Sequence[int], k: int, n: int) -> list[int]:
    result = [1] + [0] * n
    base = list(a[: n + 1]) + [0] * max(0, n + 1 - len(a))
    while k:
        if k & 1:
            result = _mul_ints(result, base, n)
        k >>= 1
        if k:
            base = _mul_ints(base, base, n)
    return result


def _pentagonal_ints(order: int, m: int = 1) -> list[int]:
    """Coefficients of prod_{n>=1} (1 - q^{mn}) up to q^order (Euler)."""
    out = [0] * (order + 1)
    out[0] = 1
    j = 1
    while True:
        e1 = m * j * (3 * j - 1) // 2
        if e1 > order:
            break
        sign = -1 if j & 1 else 1
        out[e1] += sign
        e2 = m * j * (3 * j + 1) // 2
        if e2 <= order:
            out[e2] += sign
        j += 1
    return out


# ---------------------------------------------------------------------------
# TruncatedSeries
# ---------------------------------------------------------------------------

class TruncatedSeries:
    """Power series sum c_n q^n known exactly for 0 <= n <= order.

    ``coeffs`` may be shorter than ``order + 1``; missing coefficients are
    zero.  Instances are immutable.
    """

    __slots__ = ("_num", "_den", "_order", "_fractions")

    def __init__(self, coeffs: Iterable, order: int):
        if order < 0:
            raise ValueError("order must be non-negative")
        fr = [as_rational(c) for c in coeffs]
        if len(fr) > order + 1:
            fr = fr[: order + 1]
        den = 1
        for c in fr:
            den = den * c.denominator // gcd(den, c.denominator)
        nums = [c.numerator * (den // c.denominator) for c in fr]
        nums.extend([0] * (order + 1 - len(nums)))
        self._set(nums, den, order)

    def _set(self, nums: list[int], den: int, order: int) -> None:
        if den < 0:
            nums = [-v for v in nums]
            den = -den
        g = den
        for v in nums:
            if g == 1:
                break
            g = gcd(g, v)
        if g > 1:
            nums = [v // g for v in nums]
            den //= g
        self._num = tuple(nums)
        self._den = den
        self._order = order
        self._fractions = None

    @classmethod
    def _from_ints(cls, nums: Sequence[int], den: int, order: int) -> "TruncatedSeries":
        obj = cls.__new__(cls)
        nums = list(nums[: order + 1])
        nums.extend([0] * (order + 1 - len(nums)))
        obj._set(nums, den, order)
        return obj

    @classmethod
    def one(cls, order: int) -> "TruncatedSeries":
        return cls._from_ints([1], 1, order)

    @classmethod
    def monomial(cls, coefficient, exponent: int, order: int) -> "TruncatedSeries":
        c = as_rational(coefficient)
        if exponent > order:
            return cls._from_ints([], 1, order)
        nums = [0] * exponent + [c.numerator]
        return cls._from_ints(nums, c.denominator, order)

    # --- accessors -----------------------------------------------------
    @property
    def order(self) -> int:
        return self._order

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        if self._fractions is None:
            d = self._den
            self._fractions = tuple(Fraction(v, d) for v in self._num)
        return self._fractions

    @property
    def numerators(self) -> tuple[int, ...]:
        """Integer numerators over the common :attr:`denominator`."""
        return self._num

    @property
    def denominator(self) -> int:
        return self._den

    def is_integral(self) -> bool:
        return self._den == 1

    def integer_coeffs(self) -> tuple[int, ...]:
        if self._den != 1:
            raise ValueError("series has non-integer coefficients")
        return self._num

    def __getitem__(self, n: int) -> Fraction:
        if not 0 <= n <= self._order:
            raise IndexError(f"coefficient q^{n} is outside the known range 0..{self._order}")
        return Fraction(self._num[n], self._den)

    def __len__(self) -> int:
        return self._order + 1

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self._order == other._order and self._den == other._den and self._num == other._num

    def __hash__(self) -> int:
        return hash((self._order, self._den, self._num))

    def __repr__(self) -> str:
        terms = []
        for n, c in enumerate(self.coeffs[:8]):
            if c:
                terms.append(f"{c}*q^{n}" if n else f"{c}")
        body = " + ".join(terms) or "0"
        return f"TruncatedSeries({body} + O(q^{self._order + 1}))"

    # --- arithmetic ----------------------------------------------------
    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self._order:
            raise ValueError("truncation cannot extend a series")
        return TruncatedSeries._from_ints(self._num, self._den, order)

    def _aligned(self, other: "TruncatedSeries"):
        n = min(self._order, other._order)
        d = self._den * other._den // gcd(self._den, other._den)
        fa, fb = d // self._den, d // other._den
        a = [v * fa for v in self._num[: n + 1]]
        b = [v * fb for v in other._num[: n + 1]]
        return a, b, d, n

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries([other], self._order)
        a, b, d, n = self._aligned(other)
        return TruncatedSeries._from_ints([x + y for x, y in zip(a, b)], d, n)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries._from_ints([-v for v in self._num], self._den, self._order)

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries([other], self._order)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        c = as_rational(other)
        return TruncatedSeries._from_ints(
            [v * c.numerator for v in self._num], self._den * c.denominator, self._order
        )

    __rmul__ = __mul__

    def __pow__(self, exponent):
        return series_pow(self, as_rational(exponent))

    def shift(self, k: int) -> "TruncatedSeries":
        """Multiply by q^k (k >= 0), keeping the order."""
        if k < 0:
            raise ValueError("negative shifts would need Laurent series")
        return TruncatedSeries._from_ints([0] * k + list(self._num), self._den, self._order)

    def dilate(self, m: int, order: int | None = None) -> "TruncatedSeries":
        """Substitute q -> q^m.  Result is exact up to ``m*(self.order+1) - 1``."""
        if m < 1:
            raise ValueError("dilation factor must be positive")
        top = m * (self._order + 1) - 1
        order = top if order is None else order
        if order > top:
            raise ValueError(f"dilated series is only known to order {top}")
        nums = [0] * (order + 1)
        for i, v in enumerate(self._num):
            if i * m > order:
                break
            nums[i * m] = v
        return TruncatedSeries._from_ints(nums, self._den, order)

    def max_abs(self) -> Fraction:
        return Fraction(max((abs(v) for v in self._num), default=0), self._den)

    # --- serialization -------------------------------------------------
    def to_json(self) -> str:
        payload = {
            "order": self._order,
            "coeffs": [f"{c.numerator}/{c.denominator}" for c in self.coeffs],
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "TruncatedSeries":
        payload = json.loads(text)
        return cls([Fraction(s) for s in payload["coeffs"]], int(payload["order"]))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "numerator", "denominator"])
        for n, c in enumerate(self.coeffs):
            writer.writerow([n, c.numerator, c.denominator])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "TruncatedSeries":
        rows = list(csv.DictReader(io.StringIO(text)))
        coeffs = [Fraction(int(r["numerator"]), int(r["denominator"])) for r in rows]
        return cls(coeffs, len(coeffs) - 1)


# ---------------------------------------------------------------------------
# series operations
# ---------------------------------------------------------------------------

def series_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated to ``min(a.order, b.order)``."""
    n = min(a.order, b.order)
    nums = _mul_ints(a.numerators, b.numerators, n)
    return TruncatedSeries._from_ints(nums, a.denominator * b.denominator, n)


def series_inv(a: TruncatedSeries) -> TruncatedSeries:
    """Multiplicative inverse; the constant term must be nonzero."""
    num, den, n = a.numerators, a.denominator, a.order
    a0 = num[0]
    if a0 == 0:
        raise ValueError("series with zero constant term has no inverse")
    if a0 in (1, -1):
        # a = A/den with A(0) = +-1, so 1/a = den * (1/A)
        return TruncatedSeries._from_ints([den * v for v in _inv_ints(num, n)], 1, n)
    # b_j = B_j / a0^(j+1) keeps everything integral
    nz = [(k, v) for k, v in enumerate(num[1:], start=1) if v]
    big = [0] * (n + 1)
    big[0] = 1
    powers = [1]
    for _ in range(n):
        powers.append(powers[-1] * a0)
    for j in range(1, n + 1):
        s = 0
        for k, v in nz:
            if k > j:
                break
            s += v * powers[k - 1] * big[j - k]
        big[j] = -s
    top = powers[n] * a0
    scaled = [bj * (top // powers[j] // a0) for j, bj in enumerate(big)]
    return TruncatedSeries._from_ints([den * v for v in scaled], top, n)


def series_pow(a: TruncatedSeries, delta) -> TruncatedSeries:
    """Principal power a**delta for a series with constant term 1.

    Solves a*F' = delta*a'*F coefficientwise:
    n F_n = sum_{k=1}^{n} ((delta+1) k - n) a_k F_{n-k}.
    """
    delta = as_rational(delta)
    num, den, n = a.numerators, a.denominator, a.order
    if num[0] != den:
        raise ValueError("series_pow needs constant term exactly 1")
    if delta == 0:
        return TruncatedSeries.one(n)
    if den == 1:
        return _pow_integral(num, delta, n)
    return _pow_fraction(a.coeffs, delta, n)


def _pow_integral(a: Sequence[int], delta: Fraction, n: int) -> TruncatedSeries:
    # F_n = V_n / (b^n * n!) scaled to one denominator D = b^N N!
    p, b = delta.numerator, delta.denominator
    nz = [(k, v) for k, v in enumerate(a[1: n + 1], start=1) if v]
    scale = b ** n
    for j in range(2, n + 1):
        scale *= j
    vals = [0] * (n + 1)
    vals[0] = scale
    pb = p + b
    for m in range(1, n + 1):
        s = 0
        for k, v in nz:
            if k > m:
                break
            s += (pb * k - b * m) * v * vals[m - k]
        q, r = divmod(s, b * m)
        assert r == 0, "scaled power recurrence lost integrality"
        vals[m] = q
    return TruncatedSeries._from_ints(vals, scale, n)


def _pow_fraction(a: Sequence[Fraction], delta: Fraction, n: int) -> TruncatedSeries:
    nz = [(k, v) for k, v in enumerate(a[1: n + 1], start=1) if v]
    out = [Fraction(0)] * (n + 1)
    out[0] = Fraction(1)
    d1 = delta + 1
    for m in range(1, n + 1):
        s = Fraction(0)
        for k, v in nz:
            if k > m:
                break
            s += (d1 * k - m) * v * out[m - k]
        out[m] = s / m
    return TruncatedSeries(out, n)


def pentagonal_series(order: int, m: int = 1) -> TruncatedSeries:
    """(q^m; q^m)_inf to the given order via Euler's pentagonal number theorem."""
    return TruncatedSeries._from_ints(_pentagonal_ints(order, m), 1, order)


def partition_numbers(order: int) -> TruncatedSeries:
    """p(0..order) by the pentagonal recurrence."""
    if order < 0:
        raise ValueError("order must be non-negative")
    return TruncatedSeries._from_ints(_inv_ints(_pentagonal_ints(order), order), 1, order)


# ---------------------------------------------------------------------------
# eta-like products
# ---------------------------------------------------------------------------

def _rational_gcd(values: Iterable[Fraction]) -> Fraction:
    g_num, l_den = 0, 1
    for v in values:
        g_num = gcd(g_num, v.numerator)
        l_den = l_den * v.denominator // gcd(l_den, v.denominator)
    return Fraction(g_num, l_den)


@dataclass(frozen=True)
class EtaLikeProduct:
    """prod over (m, e) of (q^m; q^m)_inf ** e.

    Repeated moduli are merged and zero exponents dropped on construction, so
    ``factors`` always has distinct moduli in ascending order.
    """

    factors: tuple[tuple[int, Fraction], ...]

    def __init__(self, factors: Iterable[tuple[int, object]] = ()):
        merged: dict[int, Fraction] = {}
        for m, e in factors:
            m = int(m)
            if m < 1:
                raise ValueError("moduli must be positive integers")
            merged[m] = merged.get(m, Fraction(0)) + as_rational(e)
        clean = tuple(sorted((m, e) for m, e in merged.items() if e != 0))
        object.__setattr__(self, "factors", clean)

    @classmethod
    def borwein(cls, p: int, delta) -> "EtaLikeProduct":
        """G_p(q)^delta = (q;q)^delta / (q^p;q^p)^delta."""
        delta = as_rational(delta)
        return cls([(1, delta), (p, -delta)])

    def __mul__(self, other: "EtaLikeProduct") -> "EtaLikeProduct":
        return EtaLikeProduct(self.factors + other.factors)

    def __pow__(self, exponent) -> "EtaLikeProduct":
        e = as_rational(exponent)
        return EtaLikeProduct((m, x * e) for m, x in self.factors)


def expand_product(prod: EtaLikeProduct, order: int) -> TruncatedSeries:
    """Exact q-expansion of an :class:`EtaLikeProduct` to ``order``.

    Exponents are written as g * k_m with g the rational gcd, the integer
    product prod (q^m;q^m)^{k_m} is built from sparse pentagonal factors, and
    one rational power by g finishes the job.
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    active = [(m, e) for m, e in prod.factors if m <= order]
    if not active:
        return TruncatedSeries.one(order)
    g = _rational_gcd(e for _, e in active)
    numer = [1] + [0] * order
    denom = [1] + [0] * order
    for m, e in active:
        k = int(e / g)
        pent = _pentagonal_ints(order, m)
        if k > 0:
            numer = _mul_ints(numer, _ipow_ints(pent, k, order), order)
        else:
            denom = _mul_ints(denom, _ipow_ints(pent, -k, order), order)
    if any(denom[1:]):
        numer = _mul_ints(numer, _inv_ints(denom, order), order)
    base = TruncatedSeries._from_ints(numer, 1, order)
    return base if g == 1 else series_pow(base, g)


@lru_cache(maxsize=128)
def _borwein_cached(p: int, delta: Fraction, order: int) -> TruncatedSeries:
    return expand_product(EtaLikeProduct.borwein(p, delta), order)


def borwein_coeffs(p: int, delta, order: int) -> TruncatedSeries:
    """c_p^(delta)(n) for 0 <= n <= order: the q-expansion of G_p(q)^delta.

    ``p`` need not be prime.  ``delta = 0`` gives the constant series 1.
    """
    delta = as_rational(delta)
    if int(p) != p or p < 2:
        raise ValueError(f"p must be an integer >= 2, got {p!r}")
    if delta < 0:
        raise ValueError(f"delta must be non-negative, got {delta}")
    if order < 0:
        raise ValueError("order must be non-negative")
    return _borwein_cached(int(p), delta, int(order))
