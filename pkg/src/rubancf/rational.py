"""Ruban continued fractions of rational numbers.

A rational number either has a terminating expansion or, after a computable
preperiod, reaches the complete quotient -1/l, whose expansion is the single
quotient l - 1/l repeated.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import sympy

from .convergents import ConvergentState
from .padic import LRational, PartialQuotient, Prime, padic_floor

__all__ = [
    "Outcome",
    "TERMINAL",
    "step_rational",
    "RationalClassification",
    "RationalExpansion",
    "MalformedExpansionError",
    "bound_b1",
    "bound_b2",
    "bound_decision",
    "classify_rational",
    "expand_rational",
    "reconstruct_rational",
    "scan_primes_rational",
    "rational_threshold",
]


class Outcome(str, Enum):
    FINITE = "finite"
    PERIODIC = "periodic"
    APERIODIC = "aperiodic"


class MalformedExpansionError(ValueError):
    pass


TERMINAL = None


def step_rational(x: LRational) -> tuple[PartialQuotient, LRational | None]:
    """One step: the floor of x and the next complete quotient (None when x = a)."""
    a = padic_floor(x)
    rest = x - a
    if rest.value == 0:
        return a, TERMINAL
    return a, rest.reciprocal()


def bound_b1(x: LRational) -> int:
    """max(ceil(log b / log l), 2) for the reduced denominator b, by integer comparison."""
    b, p = x.den, x.prime
    k, power = 0, 1
    while power < b:
        power *= p
        k += 1
    return max(k, 2)


def bound_decision(x: LRational) -> int:
    """Smallest even 2k >= 2 with l**(2k) > b.

    If alpha_0..alpha_{2k} are all non-negative the expansion stops at
    alpha_{2k}, so this index always decides.  It can exceed ``bound_b1``
    (255/76 with l = 5 first turns negative at alpha_4, while B1 = 3).
    """
    b, p = x.den, x.prime
    k = 1
    while p ** (2 * k) <= b:
        k += 1
    return 2 * k


def bound_b2(x: LRational) -> int:
    return 32 * x.prime * x.height() ** 2


@dataclass(frozen=True)
class RationalClassification:
    outcome: Outcome
    index: int  # n such that alpha_n decided: negative, or alpha_n = a_n
    bound: int  # B1


def classify_rational(x: LRational) -> RationalClassification:
    """Decide finite vs periodic, stopping at the first negative complete quotient.

    Complete quotients alpha_0, alpha_1, ... are inspected up to the index
    ``max(B1, bound_decision(x))``.
    """
    b1 = bound_b1(x)
    limit = max(b1, bound_decision(x))
    cur = x
    for n in range(limit + 1):
        if cur.value < 0:
            return RationalClassification(Outcome.PERIODIC, n, b1)
        _, nxt = step_rational(cur)
        if nxt is TERMINAL:
            return RationalClassification(Outcome.FINITE, n, b1)
        cur = nxt
    raise AssertionError(f"{x} undecided after {limit} steps")


@dataclass(frozen=True)
class RationalExpansion:
    """Expansion of a rational: ``quotients`` is the whole finite expansion,
    or the preperiod when the outcome is periodic (the period is then
    ``[l - 1/l]``)."""

    prime: Prime
    quotients: tuple[PartialQuotient, ...]
    outcome: Outcome
    complete_quotients: tuple[Fraction, ...]
    state: ConvergentState
    bound: int = 0
    steps: int = 0

    @property
    def preperiod_len(self) -> int:
        return len(self.quotients) if self.outcome is Outcome.PERIODIC else 0

    @property
    def period(self) -> tuple[PartialQuotient, ...]:
        if self.outcome is Outcome.FINITE:
            return ()
        p = self.prime
        return (PartialQuotient(p * p - 1, 1, p),)

    def all_quotients(self, extra_periods: int = 0) -> list[PartialQuotient]:
        """Preperiod followed by ``extra_periods`` copies of the period."""
        return list(self.quotients) + list(self.period) * extra_periods

    def complete_quotients_extended(self, extra_periods: int = 0) -> list[Fraction]:
        cq = list(self.complete_quotients)
        if self.outcome is Outcome.PERIODIC:
            cq += [Fraction(-1, self.prime)] * extra_periods
        return cq


def expand_rational(x: LRational) -> RationalExpansion:
    """Full expansion, stopping on termination or on the complete quotient -1/l."""
    p = x.prime
    bound = bound_b2(x)
    stop = Fraction(-1, p)
    cur = x
    quotients: list[PartialQuotient] = []
    cqs: list[Fraction] = []
    state = ConvergentState(p)
    for i in range(1, bound + 2):
        cqs.append(cur.value)
        if cur.value == stop:
            return RationalExpansion(p, tuple(quotients), Outcome.PERIODIC, tuple(cqs), state, bound, i)
        a, nxt = step_rational(cur)
        quotients.append(a)
        state = state.advance(a)
        if nxt is TERMINAL:
            return RationalExpansion(p, tuple(quotients), Outcome.FINITE, tuple(cqs), state, bound, i)
        cur = nxt
    raise AssertionError(f"expansion of {x} did not resolve within {bound + 1} steps")


def _evaluate(quotients: list[Fraction], tail: Fraction | None) -> Fraction:
    """[a_0, ..., a_{k-1}, tail] (tail omitted when None), evaluated from the back."""
    if tail is None:
        if not quotients:
            raise MalformedExpansionError("empty finite expansion")
        acc = quotients[-1]
        body = quotients[:-1]
    else:
        acc = tail
        body = quotients
    for a in reversed(body):
        if acc == 0:
            raise MalformedExpansionError("zero complete quotient")
        acc = a + 1 / acc
    return acc


def reconstruct_rational(exp: RationalExpansion) -> LRational:
    """Recover the expanded number; a periodic tail is the complete quotient -1/l."""
    p = exp.prime
    values = [a.value for a in exp.quotients]
    if exp.outcome is Outcome.FINITE:
        return LRational(_evaluate(values, None), p)
    if exp.outcome is not Outcome.PERIODIC:
        raise MalformedExpansionError(f"unexpected outcome {exp.outcome}")
    if [a.value for a in exp.period] != [p - Fraction(1, p)]:
        raise MalformedExpansionError("rational period must be [l - 1/l]")
    if not values:
        return LRational(Fraction(-1, p), p)
    # alpha = (alpha_n p_n + p_{n-1}) / (alpha_n q_n + q_{n-1}) with alpha_n = -1/l
    st = exp.state
    scale = Fraction(1, p**st.s)
    scale_prev = Fraction(1, p**st.s_prev)
    tail = Fraction(-1, p)
    num = tail * st.p * scale + st.p_prev * scale_prev
    den = tail * st.q * scale + st.q_prev * scale_prev
    return LRational(num / den, p)


def rational_threshold(x: Fraction) -> tuple[int, Outcome]:
    """(T, outcome): every prime l > T is predicted to give ``outcome``."""
    x = Fraction(x)
    if x < 0:
        return 1, Outcome.PERIODIC
    if x.denominator == 1:
        return x.numerator, Outcome.FINITE
    return max(x.numerator, x.denominator), Outcome.PERIODIC


def scan_primes_rational(x: Fraction, l_max: int) -> list[tuple[int, Outcome]]:
    x = Fraction(x)
    if x == 0:
        raise ValueError("x must be nonzero")
    return [
        (int(p), classify_rational(LRational(x, p)).outcome)
        for p in sympy.primerange(2, l_max + 1)
    ]
