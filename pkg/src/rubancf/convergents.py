"""Convergent bookkeeping shared by the rational and quadratic expansions.

Indices follow the convention p_0 = 1, q_0 = 0, p_1 = a_0, q_1 = 1, so that
p_n / q_n = [a_0, ..., a_{n-1}].  The integer versions p~_n = l**s_n p_n and
q~_n = l**s_n q_n are built with the cleared recurrence, never by scaling.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .padic import PartialQuotient

__all__ = ["ConvergentState", "convergents", "Convergents"]


@dataclass(frozen=True)
class ConvergentState:
    """State after consuming a_0..a_{n-1}."""

    prime: int
    n: int = 0
    p: int = 1  # p~_n
    p_prev: int = 0  # p~_{n-1}
    q: int = 0
    q_prev: int = 0
    exponents: tuple[int, ...] = ()
    s: int = 0  # s_n = e_0 + ... + e_{n-1}

    def advance(self, a: PartialQuotient) -> "ConvergentState":
        l = self.prime
        e, r = a.e, a.r
        if self.n == 0:
            p, q = r, l**e
        else:
            lift = l ** (e + self.exponents[-1])
            p = r * self.p + lift * self.p_prev
            q = r * self.q + lift * self.q_prev
        return ConvergentState(
            prime=l,
            n=self.n + 1,
            p=p,
            p_prev=self.p,
            q=q,
            q_prev=self.q,
            exponents=self.exponents + (e,),
            s=self.s + e,
        )

    @property
    def s_prev(self) -> int:
        return self.s - self.exponents[-1] if self.exponents else 0

    def determinant(self) -> int:
        """p~_n q~_{n-1} - p~_{n-1} q~_n, which equals (-1)**n l**(s_n + s_{n-1})."""
        return self.p * self.q_prev - self.p_prev * self.q

    def convergent(self) -> Fraction | None:
        """p_n / q_n, or None while q_n = 0."""
        return Fraction(self.p, self.q) if self.q else None


@dataclass
class Convergents:
    """Full history p~_n, q~_n, s_n for n = 0..N."""

    prime: int
    p_tilde: list[int] = field(default_factory=list)
    q_tilde: list[int] = field(default_factory=list)
    s: list[int] = field(default_factory=list)
    exponents: list[int] = field(default_factory=list)

    def p(self, n: int) -> Fraction:
        return Fraction(self.p_tilde[n], self.prime ** self.s[n])

    def q(self, n: int) -> Fraction:
        return Fraction(self.q_tilde[n], self.prime ** self.s[n])

    def __len__(self) -> int:
        return len(self.p_tilde)


def convergents(quotients: Iterable[PartialQuotient], prime: int) -> Convergents:
    """Fold the quotients through :class:`ConvergentState`, keeping every state."""
    state = ConvergentState(prime)
    out = Convergents(prime, [state.p], [state.q], [state.s])
    for a in quotients:
        state = state.advance(a)
        out.p_tilde.append(state.p)
        out.q_tilde.append(state.q)
        out.s.append(state.s)
        out.exponents.append(a.e)
    return out
