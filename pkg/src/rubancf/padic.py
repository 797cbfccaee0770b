"""Exact l-adic primitives.

Valuations, the Ruban integral part of a rational number, a digit expansion
used as an independent oracle for it, and square roots of integers in Q_l
obtained by Hensel lifting to an explicitly requested precision.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import isqrt
from typing import Union

import sympy

__all__ = [
    "Prime",
    "LRational",
    "PartialQuotient",
    "HenselRoot",
    "UndefinedValuationError",
    "RationalSquareError",
    "NoSquareRootError",
    "InvalidBranchError",
    "vp",
    "split_power",
    "is_square",
    "valuation",
    "padic_floor",
    "digit_expansion",
    "sqrt_exists",
    "validate_branch",
    "hensel_sqrt",
    "sqrt_mod",
]


class UndefinedValuationError(ValueError):
    """The valuation of zero was requested."""


class RationalSquareError(ValueError):
    """The radicand is a perfect square, so its root is rational."""


class NoSquareRootError(ValueError):
    """The radicand has no square root in Q_l."""


class InvalidBranchError(ValueError):
    """The branch residue does not select a square root of the radicand."""


class Prime(int):
    """An integer that passed a primality check at construction."""

    def __new__(cls, value: int) -> "Prime":
        if isinstance(value, Prime):
            return value
        value = int(value)
        # sympy.isprime is deterministic below 2**64 and BPSW above.
        if value < 2 or not sympy.isprime(value):
            raise ValueError(f"{value} is not a prime")
        return super().__new__(cls, value)

    def __repr__(self) -> str:
        return f"Prime({int(self)})"

    def __str__(self) -> str:
        return int.__repr__(self)


def vp(n: int, p: int) -> int:
    """Exponent of ``p`` in the nonzero integer ``n``."""
    if n == 0:
        raise UndefinedValuationError("valuation of 0 is undefined")
    n = abs(n)
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def split_power(n: int, p: int) -> tuple[int, int]:
    """Write ``n = p**k * m`` with ``p`` not dividing ``m``; return ``(k, m)``."""
    k = vp(n, p)
    return k, n // p**k


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


RationalLike = Union[int, Fraction]


@dataclass(frozen=True)
class LRational:
    """A rational number together with a distinguished prime."""

    value: Fraction
    prime: Prime
    val: float | int = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", Fraction(self.value))
        object.__setattr__(self, "prime", Prime(self.prime))
        if self.value == 0:
            v: float | int = float("inf")
        else:
            v = _frac_val(self.value, self.prime)
        object.__setattr__(self, "val", v)

    @classmethod
    def parse(cls, text: str, prime: int) -> "LRational":
        return cls(Fraction(text.strip()), Prime(prime))

    @property
    def num(self) -> int:
        return self.value.numerator

    @property
    def den(self) -> int:
        return self.value.denominator

    def _lift(self, other: "LRational | PartialQuotient | RationalLike") -> Fraction:
        if isinstance(other, (LRational, PartialQuotient)):
            if other.prime != self.prime:
                raise ValueError("mixed primes")
            return other.value
        return Fraction(other)

    def __sub__(self, other) -> "LRational":
        return LRational(self.value - self._lift(other), self.prime)

    def __add__(self, other) -> "LRational":
        return LRational(self.value + self._lift(other), self.prime)

    def __neg__(self) -> "LRational":
        return LRational(-self.value, self.prime)

    def reciprocal(self) -> "LRational":
        return LRational(1 / self.value, self.prime)

    def height(self) -> int:
        """Multiplicative height max(|num|, den) of the reduced fraction."""
        return max(abs(self.num), self.den)

    def __str__(self) -> str:
        return str(self.value)


def _frac_val(x: Fraction, p: int) -> int:
    if x.numerator % p == 0:
        return vp(x.numerator, p)
    if x.denominator % p == 0:
        return -vp(x.denominator, p)
    return 0


@dataclass(frozen=True, order=True)
class PartialQuotient:
    """The element r / l**e of Z[1/l], lying in [0, l)."""

    r: int
    e: int
    prime: Prime = field(compare=False)

    def __post_init__(self) -> None:
        p = self.prime
        if self.e < 0 or not 0 <= self.r < p ** (self.e + 1):
            raise ValueError(f"({self.r}, {self.e}) is not a partial quotient for l={p}")
        if self.e > 0 and self.r % p == 0:
            raise ValueError("r must be prime to l when e > 0")

    @classmethod
    def from_fraction(cls, a: Fraction, prime: int) -> "PartialQuotient":
        p = Prime(prime)
        a = Fraction(a)
        if a == 0:
            return cls(0, 0, p)
        k, rest = split_power(a.denominator, p)
        if rest != 1:
            raise ValueError(f"{a} is not in Z[1/{p}]")
        return cls(a.numerator, k, p)

    @property
    def value(self) -> Fraction:
        return Fraction(self.r, self.prime**self.e)

    def __str__(self) -> str:
        return str(self.value)


def valuation(x: LRational) -> int:
    """The l-adic valuation of a nonzero rational."""
    if x.value == 0:
        raise UndefinedValuationError("valuation of 0 is undefined")
    return int(x.val)


def padic_floor(x: LRational) -> PartialQuotient:
    """Ruban integral part: the unique a in Z[1/l], 0 <= a < l, with |x - a|_l < 1."""
    p = x.prime
    if x.value == 0 or x.val >= 1:
        return PartialQuotient(0, 0, p)
    e = -int(x.val)
    mod = p ** (e + 1)
    # x * l**e is an l-adic unit; reduce it modulo l**(e+1)
    scaled = x.value * p**e
    r = scaled.numerator * pow(scaled.denominator, -1, mod) % mod
    return PartialQuotient(r, e, p)


def digit_expansion(x: LRational, lo: int, hi: int) -> list[int]:
    """Digits c_lo..c_hi of the canonical expansion x = sum c_i l**i."""
    if lo > hi:
        raise ValueError("lo must not exceed hi")
    p = x.prime
    if x.value != 0 and lo > x.val:
        raise ValueError(f"lo={lo} exceeds the valuation {x.val}")
    y = x.value / Fraction(p) ** lo
    digits = []
    for _ in range(lo, hi + 1):
        c = y.numerator * pow(y.denominator, -1, p) % p
        digits.append(c)
        y = (y - c) / p
    return digits


def sqrt_exists(D: int, p: int) -> bool:
    """Whether sqrt(D) lies in Q_l.  Perfect squares raise RationalSquareError."""
    p = Prime(p)
    if D == 0:
        raise ValueError("D must be nonzero")
    if is_square(D):
        raise RationalSquareError(f"{D} is a perfect square")
    h, unit = split_power(D, p)
    if h % 2:
        return False
    if p == 2:
        return unit % 8 == 1
    return pow(unit % p, (p - 1) // 2, p) == 1


def _branch_modulus(p: int) -> int:
    return 8 if p == 2 else p


def validate_branch(D: int, p: int, branch: int) -> int:
    """Normalize ``branch`` and check it selects a root of the l-free part of D.

    For odd l the branch is the residue of the root mod l; for l = 2 it is the
    residue mod 8 (checked against D mod 16, which separates +delta from -delta).
    """
    p = Prime(p)
    _, unit = split_power(D, p)
    if p == 2:
        b = branch % 8
        if b % 2 == 0 or (b * b - unit) % 16:
            raise InvalidBranchError(f"branch {branch} is not a 2-adic root of {unit} mod 8")
        return b
    b = branch % p
    if b == 0 or (b * b - unit) % p:
        raise InvalidBranchError(f"branch {branch} does not square to {unit} mod {p}")
    return b


@dataclass(frozen=True)
class HenselRoot:
    """A square root of ``target`` known modulo l**modulus_exp."""

    delta_mod: int
    modulus_exp: int
    target: int
    branch: int
    prime: Prime

    def to(self, k: int) -> "HenselRoot":
        """The same root at precision ``k`` (truncating or lifting)."""
        return hensel_sqrt(self.target, self.prime, self.branch, k)


@lru_cache(maxsize=4096)
def _lift(D: int, p: int, branch: int, k: int) -> int:
    if p == 2:
        if k <= 3:
            return branch % 2**k
        # Newton: x' - d = (x - d)**2 / (2x), so precision j becomes 2j - 1
        j = max(3, (k + 2) // 2)
        x = _lift(D, p, branch, j)
        mod = 2**k
        return (x - (x * x - D) // 2 * pow(x, -1, mod)) % mod
    if k <= 1:
        return branch % p**k
    j = (k + 1) // 2
    x = _lift(D, p, branch, j)
    mod = p**k
    return (x - (x * x - D) * pow(2 * x, -1, mod)) % mod


def hensel_sqrt(D: int, p: int, branch: int, k: int) -> HenselRoot:
    """The root of D selected by ``branch``, reduced mod l**k.  Requires l not dividing D."""
    p = Prime(p)
    if k < 0:
        raise ValueError("precision must be non-negative")
    if D % p == 0:
        raise ValueError(f"{p} divides {D}; strip the l-part first")
    if not sqrt_exists(D, p):
        raise NoSquareRootError(f"sqrt({D}) is not in Q_{p}")
    b = validate_branch(D, p, branch)
    return HenselRoot(_lift(D, int(p), b, k), k, D, b, p)


def sqrt_mod(D: int, p: int, branch: int, k: int) -> int:
    """Residue mod l**k of the root delta of D (l may divide D, even power).

    ``branch`` refers to the root of the l-free part, i.e. delta / l**(h/2).
    """
    if k <= 0:
        return 0
    h, unit = split_power(D, p)
    half = h // 2
    if k <= half:
        return 0
    return p**half * _lift(unit, int(p), branch, k - half) % p**k
