"""Rademacher-type main term, its explicit error bound, and the p = 3 estimates.

Every numeric routine takes an mpmath context ``ctx``: ``mp`` for plain
values at ``precision_bits`` and ``mpmath.iv`` for rigorous enclosures.
Verdicts (``within_bound``, :func:`check_mth1_inequality`, ...) are always
computed with intervals: the left side is enclosed from above, the right side
from below, so ``True`` is a proof at the stated precision.

``mpmath.iv`` keeps its precision in a process-global attribute; these
routines set it for the duration of a call and are therefore not safe to run
from several threads at once.  Use processes for parallelism.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Literal, NamedTuple, Sequence

import mpmath
from mpmath import mp

from .modular import is_prime, kloosterman_A, kloosterman_A_interval
from .series import as_rational, borwein_coeffs

iv = mpmath.iv

Variant = Literal["proof-general", "as-stated"]
CHatForm = Literal["main-term", "half"]

DEFAULT_PRECISION = 128
GUARD_BITS = 8

# numeric constants of the p = 3 growth estimate, kept as exact decimals
_W_HALF_LOG = Fraction(1, 2)
_W_SCALE = Fraction("0.736")
_W_BASE1 = Fraction("1.689")
_W_SHIFT = Fraction("1.222")
_W_BASE2 = Fraction("1.002")
_W_BASE3 = Fraction("1.692")
_W_OFFSET = Fraction("0.119")
MTH1_DELTA_MIN = Fraction("0.227")
MTH1_DELTA_MAX = Fraction(3)

__all__ = [
    "DEFAULT_PRECISION",
    "EstimateReport",
    "working_precision",
    "bessel_I1",
    "euler_f",
    "check_mth_hypotheses",
    "rademacher_main",
    "rademacher_main_interval",
    "theorem_mth_error_bound",
    "estimate",
    "estimate_range",
    "Mth1Quantities",
    "mth1_quantities",
    "check_mth1_inequality",
    "check_corollary_margin",
    "mth1_error_constant",
    "corollary_N",
    "w_delta",
    "lemma_e_bound",
    "predicted_sign",
]


@contextmanager
def working_precision(bits: int):
    """Set both ``mp`` and ``iv`` to ``bits`` of precision."""
    if bits < 53:
        raise ValueError("precision_bits must be at least 53")
    old = iv.prec
    iv.prec = bits
    try:
        with mp.workprec(bits):
            yield
    finally:
        iv.prec = old


def _to_ctx(ctx, x):
    if isinstance(x, Fraction):
        return ctx.mpf(x.numerator) / x.denominator
    if isinstance(x, int):
        return ctx.mpf(x)
    return ctx.convert(x) if ctx is iv else ctx.mpf(x)


def _lower(x):
    return x.a if isinstance(x, iv.mpf) else x


def _upper(x):
    return x.b if isinstance(x, iv.mpf) else x


# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------

def bessel_I1(x, precision_bits: int = DEFAULT_PRECISION, ctx=mp):
    """I_1(x) = sum (x/2)^(2n+1) / (n! (n+1)!) for x >= 0.

    Terms are summed until the next one drops below 2^(-precision_bits-8)
    times the partial sum.  With ``ctx=iv`` the remaining tail is enclosed by
    the geometric bound t r / (1 - r), r being the next term ratio, so the
    result is a rigorous enclosure.
    """
    with working_precision(precision_bits + GUARD_BITS):
        x = _to_ctx(ctx, x)
        if _lower(x) < 0:
            raise ValueError("bessel_I1 is only implemented for x >= 0")
        if _upper(x) == 0:
            return ctx.mpf(0)
        eps = mp.ldexp(1, -precision_bits - GUARD_BITS)
        half = x / 2
        h2 = half * half
        h2_up = _upper(h2)
        term = half
        total = term
        n = 0
        while True:
            n += 1
            term = term * h2 / (n * (n + 1))
            total += term
            ratio = h2_up / ((n + 1) * (n + 2))
            if ratio < 0.5 and _upper(term) <= eps * _lower(total):
                break
        if ctx is iv:
            tail = iv.mpf(_upper(term)) * ratio / (1 - iv.mpf(ratio))
            total += iv.mpf([0, tail.b])
    with working_precision(precision_bits):
        return +total if ctx is mp else total


def euler_f(x, precision_bits: int = DEFAULT_PRECISION, ctx=mp):
    """f(x) = prod_{n>=1} 1/(1 - x^n) for real 0 < x < 1.

    The truncated tail prod_{n>T} 1/(1-x^n) lies in
    [1, exp(x^(T+1) / ((1-x)(1-x^(T+1))))]; with ``ctx=iv`` that factor is
    folded into the enclosure.
    """
    with working_precision(precision_bits + GUARD_BITS):
        x = _to_ctx(ctx, x)
        if not (0 < _lower(x) and _upper(x) < 1):
            raise ValueError("euler_f needs 0 < x < 1")
        eps = mp.ldexp(1, -precision_bits - GUARD_BITS)
        prod = ctx.mpf(1)
        xn = x
        while True:
            prod = prod / (1 - xn)
            xn = xn * x
            if _upper(xn) < eps:
                break
        if ctx is iv:
            tail = iv.exp(xn / ((1 - x) * (1 - xn)))
            prod = prod * iv.mpf([1, tail.b])
    with working_precision(precision_bits):
        return +prod if ctx is mp else prod


# ---------------------------------------------------------------------------
# general-p main term and bound
# ---------------------------------------------------------------------------

def check_mth_hypotheses(p: int, delta: Fraction, n: int, N: int) -> Fraction:
    if not is_prime(p):
        raise ValueError(f"p must be prime, got {p}")
    top = Fraction(24, p - 1)
    if not 0 < delta <= top:
        raise ValueError(f"hypothesis of the estimate violated: delta={delta} not in (0, 24/(p-1)] = (0, {top}]")
    if n < 1:
        raise ValueError(f"the estimate is stated for n >= 1, got n={n}")
    if N < 1:
        raise ValueError(f"N must be a positive integer, got {N}")
    gap = Fraction(24 * n, p - 1) - delta
    if gap <= 0:
        raise ValueError(f"24n/(p-1) - delta must be positive, got {gap}")
    return gap


def _main_term_parts(ctx, p: int, delta: Fraction, n: int, N: int, gap: Fraction):
    """Prefactor and the per-k summands A_{pk}(n) I_1(...) for k = 1..N."""
    d = _to_ctx(ctx, delta)
    g = _to_ctx(ctx, gap)
    root = ctx.sqrt(d * g)
    prefactor = 2 * ctx.pi * ctx.sqrt(d) / ctx.sqrt(g)
    parts = []
    for k in range(1, N + 1):
        arg = (p - 1) * ctx.pi / (6 * p * k) * root
        if ctx is iv:
            a = kloosterman_A_interval(p, p * k, delta, n)
        else:
            a = kloosterman_A(p, p * k, delta, n, ctx.prec)
        parts.append(a * bessel_I1(arg, ctx.prec, ctx))
    return prefactor, parts


def rademacher_main(p: int, delta, n: int, N: int, precision_bits: int = DEFAULT_PRECISION):
    """The N-term main term of c_p^(delta)(n).

    (2 pi delta^(1/2) / sqrt(24n/(p-1) - delta))
      * sum_{k<=N} A_{pk}^(delta)(n) I_1((p-1) pi/(6pk) sqrt(delta (24n/(p-1) - delta)))
    """
    delta = as_rational(delta)
    gap = check_mth_hypotheses(p, delta, n, N)
    with working_precision(precision_bits + GUARD_BITS):
        pre, parts = _main_term_parts(mp, p, delta, n, N, gap)
        total = pre * mp.fsum(parts)
    with mp.workprec(precision_bits):
        return +total


def rademacher_main_interval(p: int, delta, n: int, N: int, precision_bits: int = DEFAULT_PRECISION):
    """Interval enclosure of :func:`rademacher_main`."""
    delta = as_rational(delta)
    gap = check_mth_hypotheses(p, delta, n, N)
    with working_precision(precision_bits):
        pre, parts = _main_term_parts(iv, p, delta, n, N, gap)
        total = iv.mpf(0)
        for t in parts:
            total += t
        return pre * total


def _bound_bracket(ctx, p: int, delta: Fraction, variant: Variant):
    """The n- and N-independent constant multiplying exp(...) in the bound."""
    prec = ctx.prec
    d = _to_ctx(ctx, delta)
    pi = ctx.pi
    if variant == "proof-general":
        f_big = euler_f(ctx.exp(-2 * p * pi), prec, ctx)
    elif variant == "as-stated":
        f_big = euler_f(ctx.exp(-6 * pi), prec, ctx)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    f_2pi = euler_f(ctx.exp(-2 * pi), prec, ctx)
    f_p = euler_f(ctx.exp(-2 * pi / p), prec, ctx)
    first = (
        (p - 1) * ctx.exp((p - 1) * pi * d / 12) / (p * p)
        * (pi * ctx.sqrt(2) - 2 + 2 * ctx.exp(d * ctx.log(f_big * f_2pi)))
    )
    second = (
        2 * (p - 1) * ctx.exp(-pi * (p - 1) * d / (12 * p))
        / ctx.exp((1 - d / 2) * ctx.log(p))
        * ctx.exp(d * ctx.log(f_p * f_2pi))
    )
    return first + second


_bracket_cache: dict = {}


def _cached_bracket(ctx, p, delta, variant):
    key = (ctx is iv, p, delta, variant, ctx.prec)
    if key not in _bracket_cache:
        _bracket_cache[key] = _bound_bracket(ctx, p, delta, variant)
    return _bracket_cache[key]


def _error_bound(ctx, p, delta, n, N, variant):
    expo = (24 * n - (p - 1) * _to_ctx(ctx, delta)) * ctx.pi / (6 * p * p * N * N)
    return ctx.exp(expo) * _cached_bracket(ctx, p, delta, variant)


def theorem_mth_error_bound(
    p: int,
    delta,
    n: int,
    N: int,
    precision_bits: int = DEFAULT_PRECISION,
    variant: Variant = "proof-general",
    ctx=mp,
):
    """exp((24n - (p-1) delta) pi / (6 p^2 N^2)) times the bracketed constant.

    ``variant="as-stated"`` uses f(e^{-6 pi})^delta in the first bracket,
    ``"proof-general"`` uses f(e^{-2 p pi})^delta; they coincide at p = 3.
    """
    delta = as_rational(delta)
    check_mth_hypotheses(p, delta, n, N)
    with working_precision(precision_bits):
        out = _error_bound(ctx, p, delta, n, N, variant)
        return +out if ctx is mp else out


def _sign(x: Fraction | int) -> int:
    return (x > 0) - (x < 0)


def _interval_sign(x) -> int:
    if x.a > 0:
        return 1
    if x.b < 0:
        return -1
    return 0


@dataclass(frozen=True)
class EstimateReport:
    """Exact coefficient against the N-term main term and its error bound."""

    p: int
    delta: Fraction
    n: int
    N: int
    exact_coeff: Fraction
    main_term: mpmath.mpf = field(repr=False)
    error_bound: mpmath.mpf = field(repr=False)
    within_bound: bool
    predicted_sign: int
    actual_sign: int
    variant: str = "proof-general"

    def as_dict(self) -> dict:
        c = self.exact_coeff
        return {
            "p": self.p,
            "delta": f"{self.delta.numerator}/{self.delta.denominator}",
            "n": self.n,
            "N": self.N,
            "exact_coeff": f"{c.numerator}/{c.denominator}",
            "main_term": mpmath.nstr(self.main_term, 30),
            "error_bound": mpmath.nstr(self.error_bound, 30),
            "within_bound": self.within_bound,
            "predicted_sign": self.predicted_sign,
            "actual_sign": self.actual_sign,
            "variant": self.variant,
        }


def _report(p, delta, n, N, exact, precision_bits, variant) -> EstimateReport:
    gap = check_mth_hypotheses(p, delta, n, N)
    with working_precision(precision_bits):
        pre, parts = _main_term_parts(iv, p, delta, n, N, gap)
        main = iv.mpf(0)
        for t in parts:
            main += t
        main = pre * main
        bound = _error_bound(iv, p, delta, n, N, variant)
        diff = abs(_to_ctx(iv, exact) - main)
        within = bool(diff.b <= bound.a)
        if p == 3:
            pred = predicted_sign(delta, n)
        else:
            pred = _interval_sign(main)
        return EstimateReport(
            p=p,
            delta=delta,
            n=n,
            N=N,
            exact_coeff=exact,
            main_term=mp.mpf(main.mid.a),
            error_bound=mp.mpf(bound.mid.a),
            within_bound=within,
            predicted_sign=pred,
            actual_sign=_sign(exact),
            variant=variant,
        )


def estimate(
    p: int,
    delta,
    n: int,
    N: int,
    precision_bits: int = DEFAULT_PRECISION,
    variant: Variant = "proof-general",
) -> EstimateReport:
    """One :class:`EstimateReport` for (p, delta, n, N).

    ``predicted_sign`` is the exact cosine sign for p = 3 and the sign of
    the main-term enclosure otherwise (0 when the enclosure straddles 0).
    """
    delta = as_rational(delta)
    check_mth_hypotheses(p, delta, n, N)
    exact = borwein_coeffs(p, delta, n)[n]
    return _report(p, delta, n, N, exact, precision_bits, variant)


def estimate_range(
    p: int,
    delta,
    ns: Sequence[int],
    N: int,
    precision_bits: int = DEFAULT_PRECISION,
    variant: Variant = "proof-general",
) -> list[EstimateReport]:
    """Reports for several n sharing one exact expansion."""
    delta = as_rational(delta)
    ns = list(ns)
    for n in ns:
        check_mth_hypotheses(p, delta, n, N)
    if not ns:
        return []
    series = borwein_coeffs(p, delta, max(ns))
    return [_report(p, delta, n, N, series[n], precision_bits, variant) for n in ns]


# ---------------------------------------------------------------------------
# p = 3: growth estimate and sign prediction
# ---------------------------------------------------------------------------

class Mth1Quantities(NamedTuple):
    L: object
    c_hat: object
    w: object
    M: object


def _check_mth1_range(delta: Fraction, n: int) -> None:
    if not MTH1_DELTA_MIN < delta <= MTH1_DELTA_MAX:
        raise ValueError(f"growth estimate needs delta in (0.227, 3], got {delta}")
    if 12 * n - delta <= 0:
        raise ValueError(f"12n - delta must be positive, got n={n}")


def w_delta(delta, precision_bits: int = DEFAULT_PRECISION, ctx=mp):
    """w(delta) = log(1/delta)/2 + 0.736 (1.689^d (1.222 + 1.002^d) + 3 * 1.692^d)/d + 0.119."""
    delta = as_rational(delta)
    with working_precision(precision_bits):
        d = _to_ctx(ctx, delta)
        c = lambda v: _to_ctx(ctx, v)  # noqa: E731
        powd = lambda base: ctx.exp(d * ctx.log(c(base)))  # noqa: E731
        inner = powd(_W_BASE1) * (c(_W_SHIFT) + powd(_W_BASE2)) + 3 * powd(_W_BASE3)
        out = c(_W_HALF_LOG) * ctx.log(1 / d) + c(_W_SCALE) * inner / d + c(_W_OFFSET)
        return +out if ctx is mp else out


def _M_of(ctx, L, w, i1_2L, prec):
    return (L * w + L * ctx.log(L) + 2 * bessel_I1(L, prec, ctx)) / i1_2L


def mth1_quantities(
    delta,
    n: int,
    precision_bits: int = DEFAULT_PRECISION,
    ctx=mp,
    c_hat_form: CHatForm = "main-term",
) -> Mth1Quantities:
    """L, c_hat, w(delta) and M(L) of the p = 3 growth estimate.

    L = (pi/18) sqrt(delta (12n - delta)) and
    M = (L w + L log L + 2 I_1(L)) / I_1(2L).

    ``c_hat_form="main-term"`` takes c_hat = (2 pi^2 delta / 27) I_1(2L) / L
    = 4 pi delta^(1/2) I_1(2L) / (3 sqrt(12n - delta)), which is exactly the
    N = 1 main term divided by cos(pi delta/18 + 2 pi n/3).
    ``"half"`` uses 2 pi delta^(1/2) I_1(2L) / (3 sqrt(12n - delta)), half of
    that; with it c/c_hat tends to 2 cos(...) and the inequality fails for
    large n.
    """
    delta = as_rational(delta)
    _check_mth1_range(delta, n)
    if c_hat_form == "main-term":
        scale = 4
    elif c_hat_form == "half":
        scale = 2
    else:
        raise ValueError(f"unknown c_hat_form {c_hat_form!r}")
    with working_precision(precision_bits):
        d = _to_ctx(ctx, delta)
        g = _to_ctx(ctx, 12 * n - delta)
        L = ctx.pi / 18 * ctx.sqrt(d * g)
        i1_2L = bessel_I1(2 * L, precision_bits, ctx)
        c_hat = scale * ctx.pi * ctx.sqrt(d) / (3 * ctx.sqrt(g)) * i1_2L
        w = w_delta(delta, precision_bits, ctx)
        M = _M_of(ctx, L, w, i1_2L, precision_bits)
        if ctx is mp:
            return Mth1Quantities(+L, +c_hat, +w, +M)
        return Mth1Quantities(L, c_hat, w, M)


def _cos_angle(ctx, delta: Fraction, n: int):
    t = (delta / 18 + Fraction(2 * n, 3)) % 2
    return ctx.cos(ctx.pi * _to_ctx(ctx, t))


def check_mth1_inequality(
    delta,
    n: int,
    exact_c,
    precision_bits: int = DEFAULT_PRECISION,
    c_hat_form: CHatForm = "main-term",
) -> bool:
    """Rigorous test of |c/c_hat - cos(pi delta/18 + 2 pi n/3)| <= M(L)."""
    delta = as_rational(delta)
    exact_c = as_rational(exact_c)
    q = mth1_quantities(delta, n, precision_bits, iv, c_hat_form)
    with working_precision(precision_bits):
        lhs = abs(_to_ctx(iv, exact_c) / q.c_hat - _cos_angle(iv, delta, n))
        return bool(lhs.b <= q.M.a)


def check_corollary_margin(delta, n: int, precision_bits: int = DEFAULT_PRECISION) -> bool:
    """Rigorous test of |cos(pi delta/18 + 2 pi n/3)| > M(L_{delta,n})."""
    delta = as_rational(delta)
    q = mth1_quantities(delta, n, precision_bits, iv)
    with working_precision(precision_bits):
        c = abs(_cos_angle(iv, delta, n))
        return bool(c.a > q.M.b)


def mth1_error_constant(delta, precision_bits: int = DEFAULT_PRECISION, ctx=mp):
    """(4/9) e^(3/(5 pi)) (1.689^d (1.222 + 1.002^d) + 3 * 1.692^d)."""
    delta = as_rational(delta)
    with working_precision(precision_bits):
        d = _to_ctx(ctx, delta)
        c = lambda v: _to_ctx(ctx, v)  # noqa: E731
        powd = lambda base: ctx.exp(d * ctx.log(c(base)))  # noqa: E731
        inner = powd(_W_BASE1) * (c(_W_SHIFT) + powd(_W_BASE2)) + 3 * powd(_W_BASE3)
        out = c(Fraction(4, 9)) * ctx.exp(3 / (5 * ctx.pi)) * inner
        return +out if ctx is mp else out


def corollary_N(delta, n: int, precision_bits: int = DEFAULT_PRECISION) -> int:
    """N = ceil(sqrt(20 L^2 / delta)) with 20 L^2/delta = 20 pi^2 (12n - delta)/324."""
    delta = as_rational(delta)
    if 12 * n - delta <= 0:
        raise ValueError("12n - delta must be positive")
    with working_precision(precision_bits):
        root = iv.sqrt(20 * iv.pi**2 * _to_ctx(iv, 12 * n - delta) / 324)
        lo, hi = ceil(root.a), ceil(root.b)
        if lo != hi:
            raise ArithmeticError("precision too low to fix the ceiling")
        return int(lo)


def lemma_e_bound(x, y: int, precision_bits: int = DEFAULT_PRECISION, ctx=mp):
    """x log y + 2 I_1(x) - (2 - gamma - 1/(2y)) x, for x > 0 and integer y > 2."""
    if int(y) != y or y <= 2:
        raise ValueError(f"y must be an integer > 2, got {y}")
    with working_precision(precision_bits):
        x = _to_ctx(ctx, as_rational(x) if isinstance(x, (int, Fraction, str)) else x)
        if _lower(x) <= 0:
            raise ValueError("x must be positive")
        out = x * ctx.log(y) + 2 * bessel_I1(x, precision_bits, ctx) - (2 - ctx.euler - ctx.mpf(1) / (2 * y)) * x
        return +out if ctx is mp else out


def predicted_sign(delta, n: int) -> int:
    """Sign of cos(pi delta/18 + 2 pi n/3), decided exactly.

    The angle is a rational multiple of pi; reduced to t in [0, 2), cosine is
    positive on [0, 1/2) and (3/2, 2), zero at 1/2 and 3/2, negative between.
    """
    delta = as_rational(delta)
    t = (delta / 18 + Fraction(2 * n, 3)) % 2
    half, three_half = Fraction(1, 2), Fraction(3, 2)
    if t == half or t == three_half:
        return 0
    if t < half or t > three_half:
        return 1
    return -1

