"""Exact checkers for the quantitative bounds satisfied by Ruban expansions.

Square roots and logarithms are enclosed in intervals with rational (dyadic)
endpoints, so every check is decided by comparing rationals.  A check passes
only when the enclosure of the left side lies entirely below the enclosure of
the right side.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Union

from .convergents import Convergents, convergents
from .padic import LRational, PartialQuotient
from .quadratic import QuadraticSurd, expand_surd, field_valuation
from .rational import Outcome, RationalExpansion, expand_rational

__all__ = [
    "DEFAULT_BITS",
    "RationalInterval",
    "GrowthConstants",
    "ExpansionRecord",
    "sqrt_interval",
    "log_interval",
    "lambda_interval",
    "growth_constants",
    "height_interval",
    "mahler_measure_interval",
    "record_rational",
    "record_surd",
    "check_qn_bound",
    "check_height_bounds",
    "check_growth_bounds",
    "check_ladic_approx",
]

DEFAULT_BITS = 32

Number = Union[int, Fraction]


def _floor_dyadic(x: Fraction, bits: int) -> Fraction:
    return Fraction((x.numerator << bits) // x.denominator, 1 << bits)


def _ceil_dyadic(x: Fraction, bits: int) -> Fraction:
    return Fraction(-((-x.numerator << bits) // x.denominator), 1 << bits)


@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: Number) -> "RationalInterval":
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x: Number) -> bool:
        return self.lo <= x <= self.hi

    def rounded(self, bits: int) -> "RationalInterval":
        """Outward rounding to multiples of 2**-bits."""
        return RationalInterval(_floor_dyadic(self.lo, bits), _ceil_dyadic(self.hi, bits))

    @staticmethod
    def _lift(other) -> "RationalInterval":
        if isinstance(other, RationalInterval):
            return other
        return RationalInterval.point(other)

    def __add__(self, other) -> "RationalInterval":
        o = self._lift(other)
        return RationalInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self) -> "RationalInterval":
        return RationalInterval(-self.hi, -self.lo)

    def __sub__(self, other) -> "RationalInterval":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "RationalInterval":
        return self._lift(other) - self

    def __mul__(self, other) -> "RationalInterval":
        o = self._lift(other)
        ends = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi]
        return RationalInterval(min(ends), max(ends))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalInterval":
        o = self._lift(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("divisor interval contains 0")
        return self * RationalInterval(1 / o.hi, 1 / o.lo)

    def __pow__(self, n: int) -> "RationalInterval":
        if self.lo < 0:
            raise ValueError("power of an interval with negative points")
        return RationalInterval(self.lo**n, self.hi**n)

    def abs(self) -> "RationalInterval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RationalInterval(0, max(-self.lo, self.hi))

    def max_with(self, x: Number) -> "RationalInterval":
        return RationalInterval(max(self.lo, x), max(self.hi, x))

    def certainly_le(self, other) -> bool:
        return self.hi <= self._lift(other).lo

    def certainly_lt(self, other) -> bool:
        return self.hi < self._lift(other).lo


def _is_rational_square(x: Fraction) -> bool:
    return x >= 0 and isqrt(x.numerator) ** 2 == x.numerator and isqrt(x.denominator) ** 2 == x.denominator


def sqrt_interval(x: Number, bits: int = DEFAULT_BITS) -> RationalInterval:
    """Enclosure of sqrt(x) of width 2**-bits (a point when x is a rational square)."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("square root of a negative number")
    if _is_rational_square(x):
        return RationalInterval.point(Fraction(isqrt(x.numerator), isqrt(x.denominator)))
    s = isqrt((x.numerator << (2 * bits)) // x.denominator)
    return RationalInterval(Fraction(s, 1 << bits), Fraction(s + 1, 1 << bits))


def _atanh(z_lo: Fraction, z_hi: Fraction, bits: int) -> RationalInterval:
    """Enclosure of atanh on [z_lo, z_hi] inside [0, 1/3]."""
    eps = Fraction(1, 1 << (bits + 4))

    def partial(z: Fraction) -> tuple[Fraction, Fraction]:
        total, power, z2, j = Fraction(0), z, z * z, 0
        while True:
            total += power / (2 * j + 1)
            power *= z2
            j += 1
            tail = power / ((2 * j + 1) * (1 - z2))
            if tail < eps:
                return total, tail

    lo, _ = partial(z_lo)
    hi, tail = partial(z_hi)
    return RationalInterval(lo, hi + tail).rounded(bits + 4)


@lru_cache(maxsize=64)
def _log2(bits: int) -> RationalInterval:
    return 2 * _atanh(Fraction(1, 3), Fraction(1, 3), bits + 1)


def log_interval(x: Number, bits: int = DEFAULT_BITS) -> RationalInterval:
    """Enclosure of log(x), x > 0, of width about 2**-bits."""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("log of a non-positive number")
    if x == 1:
        return RationalInterval.point(0)
    if x < 1:
        return -log_interval(1 / x, bits)
    k = x.numerator.bit_length() - x.denominator.bit_length()
    y = x / Fraction(2) ** k
    if y < 1:
        k -= 1
        y *= 2
    # y in [1, 2): log y = 2 atanh((y - 1)/(y + 1)) with the argument in [0, 1/3)
    guard = bits + 8
    z = (y - 1) / (y + 1)
    part = 2 * _atanh(_floor_dyadic(z, guard), _ceil_dyadic(z, guard), bits + 2)
    if k == 0:
        return part
    return (part + k * _log2(bits + abs(k).bit_length() + 2)).rounded(bits + 2)


def log_range(iv: RationalInterval, bits: int = DEFAULT_BITS) -> RationalInterval:
    return RationalInterval(log_interval(iv.lo, bits).lo, log_interval(iv.hi, bits).hi)


def lambda_interval(a: PartialQuotient | Number, bits: int = DEFAULT_BITS) -> RationalInterval:
    """Enclosure of the positive root (a + sqrt(a**2 + 4))/2 of x**2 - a x - 1."""
    v = a.value if isinstance(a, PartialQuotient) else Fraction(a)
    if v < 0:
        raise ValueError("a must be non-negative")
    return (v + sqrt_interval(v * v + 4, bits + 1)) * Fraction(1, 2)


@dataclass(frozen=True)
class GrowthConstants:
    C2: RationalInterval
    C3: Fraction
    C4: RationalInterval


def growth_constants(x: QuadraticSurd, bits: int = DEFAULT_BITS) -> GrowthConstants:
    """Constants bounding |b_n|, |c_n l**f_n| <= C3 C2**n and f_n < 3n + C4."""
    p = x.prime
    C2 = (p * p + 2 + p * sqrt_interval(p * p + 4, bits + 4)) * Fraction(1, 2)
    k0 = Fraction(p) ** x.f * x.c
    k_prev = (x.Delta - x.b * x.b) / k0
    C3 = abs(k_prev) + abs(k0) + abs(x.b)
    C4 = log_interval(C3, bits) / log_interval(p, bits)
    return GrowthConstants(C2, C3, C4)


def mahler_measure_interval(A: int, B: int, C: int, bits: int = DEFAULT_BITS) -> RationalInterval:
    """Mahler measure of A x**2 + B x + C (A != 0)."""
    D = B * B - 4 * A * C
    if D < 0:
        # complex conjugate roots of modulus sqrt(C/A)
        return RationalInterval.point(max(abs(A), abs(C)))
    root = sqrt_interval(D, bits + 8)
    two_a = 2 * A
    r1 = ((-B + root) / two_a).abs().max_with(1)
    r2 = ((-B - root) / two_a).abs().max_with(1)
    return abs(A) * r1 * r2


def height_interval(x, bits: int = DEFAULT_BITS) -> RationalInterval:
    """Logarithmic Weil height of a rational or a quadratic surd."""
    if isinstance(x, QuadraticSurd):
        A, B, C = x.minimal_polynomial()
        return log_range(mahler_measure_interval(A, B, C, bits), bits) * Fraction(1, 2)
    if isinstance(x, LRational):
        x = x.value
    x = Fraction(x)
    return log_interval(max(abs(x.numerator), x.denominator), bits)


@dataclass
class ExpansionRecord:
    """Partial quotients a_0..a_{N-1} with complete quotients alpha_0, alpha_1, ...

    ``complete_quotients`` holds Fractions (rational input) or surds.
    ``finite`` marks a terminating expansion, whose last complete quotient
    equals its partial quotient.
    """

    prime: int
    quotients: list[PartialQuotient]
    complete_quotients: list
    finite: bool = False
    alpha: object = None
    conv: Convergents | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if self.alpha is None:
            self.alpha = self.complete_quotients[0]
        if self.conv is None:
            self.conv = convergents(self.quotients, self.prime)


def record_rational(exp: RationalExpansion | LRational, extra_periods: int = 0) -> ExpansionRecord:
    if isinstance(exp, LRational):
        exp = expand_rational(exp)
    return ExpansionRecord(
        int(exp.prime),
        exp.all_quotients(extra_periods),
        exp.complete_quotients_extended(extra_periods),
        finite=exp.outcome is Outcome.FINITE,
    )


def record_surd(x: QuadraticSurd, steps: int) -> ExpansionRecord:
    quotients, cqs = expand_surd(x, steps)
    return ExpansionRecord(int(x.prime), quotients, cqs)


def check_qn_bound(exp: ExpansionRecord, bits: int = DEFAULT_BITS) -> bool:
    """q_n <= lambda(a_{n-1})...lambda(a_1) and p_n <= lambda(a_{n-1})...lambda(a_0)."""
    conv = exp.conv
    p_bound = RationalInterval.point(1)
    q_bound = RationalInterval.point(1)
    for n in range(len(conv)):
        if n >= 1:
            lam = lambda_interval(exp.quotients[n - 1], bits)
            p_bound = (p_bound * lam).rounded(bits)
            if n >= 2:
                q_bound = (q_bound * lam).rounded(bits)
        if not (RationalInterval.point(conv.p(n)).certainly_le(p_bound)):
            return False
        if not (RationalInterval.point(conv.q(n)).certainly_le(q_bound)):
            return False
    return True


def _alpha_valuation(exp: ExpansionRecord) -> int:
    a = exp.alpha
    if isinstance(a, QuadraticSurd):
        return a.valuation()
    return int(LRational(Fraction(a), exp.prime).val)


def check_height_bounds(
    exp: ExpansionRecord,
    alpha_height: RationalInterval | None = None,
    bits: int = DEFAULT_BITS,
) -> bool:
    """h(alpha_n) <= h(alpha) + s_n log l + n log 2l and h(alpha_n) <= 2**n (h(alpha) + log 2l) - log 2l.

    Requires v(alpha) <= 0.  At n = 0 both sides are h(alpha) itself, so the
    comparison starts at n = 1.
    """
    if _alpha_valuation(exp) > 0:
        raise ValueError("height bounds need v(alpha) <= 0")
    p = exp.prime
    h_alpha = alpha_height if alpha_height is not None else height_interval(exp.alpha, bits)
    log_p = log_interval(p, bits)
    log_2p = log_interval(2 * p, bits)
    s = 0
    for n, x in enumerate(exp.complete_quotients):
        if n >= 1:
            s += exp.quotients[n - 1].e
            h_n = height_interval(x, bits)
            linear = h_alpha + s * log_p + n * log_2p
            doubling = (2**n) * (h_alpha + log_2p) - log_2p
            if not (h_n.certainly_le(linear) and h_n.certainly_le(doubling)):
                return False
    return True


def check_growth_bounds(exp: ExpansionRecord, bits: int = DEFAULT_BITS) -> bool:
    """|b_n| <= C3 C2**n, |c_n l**f_n| <= C3 C2**n and f_n < 3n + C4 along a surd expansion."""
    x0 = exp.complete_quotients[0]
    consts = growth_constants(x0, bits)
    growth = Fraction(consts.C3)
    for n, x in enumerate(exp.complete_quotients):
        if n:
            growth *= consts.C2.lo
        k = abs(Fraction(x.prime) ** x.f * x.c)
        if abs(x.b) > growth or k > growth:
            return False
        if not x.f < 3 * n + consts.C4.lo:
            return False
    return True


def check_ladic_approx(exp: ExpansionRecord, alpha=None) -> bool:
    """v(p_n - alpha q_n) = s_{n+1} - e_0 for every step before termination.

    For a finite expansion the last convergent must equal alpha exactly.
    """
    alpha = exp.alpha if alpha is None else alpha
    conv = exp.conv
    p = exp.prime
    e0 = exp.quotients[0].e if exp.quotients else 0
    n_steps = len(exp.quotients)
    for n in range(n_steps):
        target = conv.s[n + 1] - e0
        pn, qn = conv.p(n), conv.q(n)
        if isinstance(alpha, QuadraticSurd):
            r, s = alpha.field_coords()
            v = field_valuation(pn - r * qn, -s * qn, alpha)
        else:
            diff = pn - Fraction(alpha) * qn
            if diff == 0:
                return False
            v = int(LRational(diff, p).val)
        if v != target:
            return False
    if exp.finite and not isinstance(alpha, QuadraticSurd):
        return conv.p(n_steps) == Fraction(alpha) * conv.q(n_steps)
    return True
