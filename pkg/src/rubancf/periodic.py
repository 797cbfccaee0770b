"""Enumeration of purely periodic surds with a fixed ordinate.

A purely periodic (b + delta)/(l**f c) has exactly one positive real embedding,
|x|_l > 1, |conj x|_l < 1, and its consecutive denominators satisfy
l**(f + f') |c c'| <= Delta.  Since f' >= 1 this leaves finitely many
(b, c, f) to try, and expanding each survivor decides it.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt

from .padic import PartialQuotient, Prime, is_square, sqrt_exists, validate_branch, NoSquareRootError
from .quadratic import (
    QuadraticSurd,
    advance,
    embedding_signs,
    make_surd,
    _minimal_period,
)

__all__ = [
    "Candidate",
    "PellSolution",
    "candidate_list",
    "ppp_filter",
    "determine_pure_periodic",
    "pell_period1",
    "default_branch",
    "funnel",
]


def default_branch(Delta: int, prime: int) -> int:
    """Smallest residue selecting a root of the l-free part of Delta."""
    p = Prime(prime)
    mod = 8 if p == 2 else p
    for br in range(1, mod):
        try:
            return validate_branch(Delta, p, br)
        except ValueError:
            continue
    raise NoSquareRootError(f"sqrt({Delta}) is not in Q_{p}")


@dataclass
class Candidate:
    surd: QuadraticSurd
    sign_ok: bool = False
    valuation_ok: bool = False
    shape_ok: bool = False

    @property
    def passed(self) -> bool:
        return self.sign_ok and self.valuation_ok and self.shape_ok

    def sort_key(self) -> tuple[int, int, int]:
        return self.surd.b, self.surd.c, self.surd.f


def candidate_list(Delta: int, prime: int, branch: int | None = None) -> list[Candidate]:
    """All (b, c, f) with |b| <= isqrt(Delta), f >= 1, l not dividing c and
    l**(f+1) |c| <= Delta.  Flags are left unset; see :func:`ppp_filter`."""
    p = Prime(prime)
    if Delta <= 0 or is_square(Delta):
        raise ValueError("Delta must be a positive non-square")
    if Delta % p == 0:
        raise ValueError(f"{p} divides {Delta}; strip square factors of l first")
    if not sqrt_exists(Delta, p):
        return []
    if branch is None:
        branch = default_branch(Delta, p)
    branch = validate_branch(Delta, p, branch)
    t = isqrt(Delta)
    out = []
    f = 1
    while p ** (f + 1) <= Delta:
        cmax = Delta // p ** (f + 1)
        for c in range(1, cmax + 1):
            if c % p == 0:
                continue
            for sc in (c, -c):
                for b in range(-t, t + 1):
                    out.append(Candidate(QuadraticSurd(Delta, b, sc, f, p, branch)))
        f += 1
    out.sort(key=Candidate.sort_key)
    return out


def ppp_filter(cands: list[Candidate]) -> list[Candidate]:
    """Set the flags and keep candidates passing all of them."""
    kept = []
    for cand in cands:
        x = cand.surd
        signs = embedding_signs(x)
        cand.sign_ok = signs.count(1) == 1
        cand.shape_ok = (x.Delta - x.b * x.b) % (x.prime**x.f * x.c) == 0
        cand.valuation_ok = x.valuation() < 0 < x.conjugate_valuation()
        if cand.passed:
            kept.append(cand)
    return kept


def determine_pure_periodic(
    Delta: int, prime: int, branch: int | None = None
) -> list[tuple[QuadraticSurd, list[PartialQuotient]]]:
    """The purely periodic surds of ordinate Delta, with their minimal periods."""
    filtered = ppp_filter(candidate_list(Delta, prime, branch))
    keys = {c.surd.key() for c in filtered}
    limit = len(filtered) + 1
    found = []
    for cand in filtered:
        start = cand.surd
        cur = start
        quotients = []
        for _ in range(limit):
            a, cur = advance(cur)
            quotients.append(a)
            k = cur.key()
            if k == start.key():
                found.append((start, _minimal_period(quotients)))
                break
            if k not in keys:
                break
    found.sort(key=lambda item: (item[0].b, item[0].c, item[0].f))
    return found


def funnel(Delta: int, prime: int, branch: int | None = None) -> tuple[int, int, int]:
    """(candidates, after filters, confirmed) counts."""
    cands = candidate_list(Delta, prime, branch)
    kept = ppp_filter(cands)
    return len(cands), len(kept), len(determine_pure_periodic(Delta, prime, branch))


@dataclass
class PellSolution:
    """t**2 - u**2 Delta = -4 l**(2h) with 0 <= t < l**(h+1) and l not dividing t.

    The surd (t + u*delta)/(2 l**h) or its conjugate, whichever has negative
    valuation, has the expansion [t / l**h] repeated.
    """

    t: int
    u: int
    h: int
    prime: int
    surds: tuple[QuadraticSurd, ...] = field(default_factory=tuple)
    sign: int = 1  # the surd is (t + sign*u*delta) / (2 l**h)

    @property
    def quotient(self) -> Fraction:
        return Fraction(self.t, self.prime**self.h)

    def describe(self, Delta: int) -> str:
        op = "+" if self.sign > 0 else "-"
        t, u, den = self.t, self.u, f"(2*{self.prime}^{self.h})"
        if self.halved:
            (t, u), den = self.halved, f"{self.prime}^{self.h}"
        coeff = "" if u == 1 else f"{u}*"
        return f"({t}{op}{coeff}sqrt({Delta}))/{den}"

    @property
    def halved(self) -> tuple[int, int] | None:
        """(t/2, u/2), the solution of t**2 - u**2 Delta = -l**(2h), when both are even."""
        if self.t % 2 or self.u % 2:
            return None
        return self.t // 2, self.u // 2


def pell_period1(Delta: int, prime: int, h_max: int = 8, branch: int | None = None) -> dict[int, list[PellSolution]]:
    """Brute-force search for the period-1 expansions [t / l**h], h = 1..h_max."""
    p = Prime(prime)
    if Delta <= 0 or is_square(Delta):
        raise ValueError("Delta must be a positive non-square")
    has_root = sqrt_exists(Delta, p)
    if has_root and branch is None:
        branch = default_branch(Delta, p)
    table: dict[int, list[PellSolution]] = {}
    for h in range(1, h_max + 1):
        sols = []
        lift = 4 * p ** (2 * h)
        for t in range(p ** (h + 1)):
            if t % p == 0:
                continue
            num = t * t + lift
            if num % Delta:
                continue
            u2 = num // Delta
            if not is_square(u2):
                continue
            u = isqrt(u2)
            surds: tuple[QuadraticSurd, ...] = ()
            sign = 1
            if has_root:
                x = make_surd(Delta, t, 2, h, p, branch, u=u)
                if x.valuation() >= 0:
                    sign = -1
                    x = make_surd(Delta, t, 2, h, p, branch, u=-u)
                surds = (x,)
            sols.append(PellSolution(t, u, h, int(p), surds, sign))
        table[h] = sols
    return table
