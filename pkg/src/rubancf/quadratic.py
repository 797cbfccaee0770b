"""Ruban expansions of quadratic irrationals.

A surd is stored as (b + delta) / (l**f * c) where delta is the l-adic square
root of the ordinate Delta selected by a branch residue.  The branch always
refers to the root of the l-free part of Delta, delta / l**(v(Delta)/2), so it
survives the removal of l-power factors during the expansion.  Every rescaling
performed here multiplies delta by a positive integer, which keeps the labels of
the two real embeddings (delta -> +sqrt(Delta), delta -> -sqrt(Delta)) stable.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd, isqrt

from sympy.ntheory.factor_ import core

from .padic import (
    NoSquareRootError,
    PartialQuotient,
    Prime,
    RationalSquareError,
    is_square,
    split_power,
    sqrt_exists,
    sqrt_mod,
    validate_branch,
    vp,
)
from .rational import Outcome

__all__ = [
    "QuadraticSurd",
    "QuadraticClassification",
    "NoRealEmbeddingError",
    "ReduciblePolynomialError",
    "make_surd",
    "surd_floor",
    "surd_step",
    "strip",
    "advance",
    "is_standard",
    "reduce_to_standard",
    "embedding_signs",
    "both_negative",
    "n_alpha",
    "classify_quadratic",
    "expand_surd",
    "aperiodicity_threshold",
    "family_nonperiodic_check",
    "roots_of",
    "canonical_form",
    "same_value",
    "field_valuation",
]


class NoRealEmbeddingError(ValueError):
    """Delta < 0: Q(delta) has no real embedding."""


class ReduciblePolynomialError(ValueError):
    pass


@dataclass(frozen=True)
class QuadraticSurd:
    """The l-adic number (b + delta) / (l**f * c) with delta**2 = Delta."""

    Delta: int
    b: int
    c: int
    f: int
    prime: Prime
    branch: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "prime", Prime(self.prime))
        if self.c == 0 or self.c % self.prime == 0:
            raise ValueError(f"c={self.c} must be nonzero and prime to l")

    @property
    def h(self) -> int:
        """v(Delta); always even for a surd in Q_l."""
        return vp(self.Delta, self.prime)

    @property
    def unit_part(self) -> int:
        return self.Delta // self.prime**self.h

    @property
    def denominator(self) -> Fraction:
        return Fraction(self.prime) ** self.f * self.c

    def delta_mod(self, k: int) -> int:
        return sqrt_mod(self.Delta, self.prime, self.branch, k)

    def field_coords(self) -> tuple[Fraction, Fraction]:
        """(r, s) with value r + s * d0, where d0 = delta / l**(h/2) is fixed by the branch."""
        den = self.denominator
        return Fraction(self.b) / den, Fraction(self.prime ** (self.h // 2)) / den

    def key(self) -> tuple[Fraction, Fraction, int]:
        """Representation-independent identity of the value (for fixed l-free ordinate)."""
        r, s = self.field_coords()
        return r, s, self.unit_part

    def minimal_polynomial(self) -> tuple[int, int, int]:
        """Primitive (A, B, C), A > 0, with A x**2 + B x + C = 0."""
        K = self.denominator
        coeffs = [K * K, -2 * self.b * K, Fraction(self.b * self.b - self.Delta)]
        den = 1
        for q in coeffs:
            den = den * q.denominator // gcd(den, q.denominator)
        ints = [int(q * den) for q in coeffs]
        g = gcd(*ints)
        A, B, C = (v // g for v in ints)
        if A < 0:
            A, B, C = -A, -B, -C
        return A, B, C

    def valuation(self) -> int:
        return _val_linear(self, 1) - self.f

    def conjugate_valuation(self) -> int:
        return _val_linear(self, -1) - self.f

    def __str__(self) -> str:
        return f"({self.b}+sqrt({self.Delta}))/({self.c}*{self.prime}^{self.f})"

    def pretty(self) -> str:
        """Human rendering such as -(19+sqrt(37))/9 or (2-sqrt(13))/3."""
        den = self.denominator
        root = f"sqrt({self.Delta})"
        b = self.b
        if den > 0:
            num = f"{b}+{root}" if b else root
            sign = ""
        elif b > 0:
            num, sign = f"{b}+{root}", "-"
        else:
            num, sign = (f"{-b}-{root}" if b else f"-{root}"), ""
        den = abs(den)
        if den == 1:
            return f"{sign}({num})" if sign or b else num
        return f"{sign}({num})/{den}"

    def to_dict(self) -> dict:
        return {
            "Delta": self.Delta,
            "b": self.b,
            "c": self.c,
            "f": self.f,
            "prime": int(self.prime),
            "branch": self.branch,
        }


def _val_linear(x: QuadraticSurd, sign: int) -> int:
    """v(b + sign*delta).  Since v(b - sign*delta) >= 0 it is at most v(Delta - b**2)."""
    p = x.prime
    if x.b == 0:
        return x.h // 2
    k = vp(x.Delta - x.b * x.b, p) + 1
    mod = p**k
    n = (x.b + sign * x.delta_mod(k)) % mod
    return vp(n, p)


def canonical_form(x: QuadraticSurd) -> tuple[Fraction, Fraction, int, int]:
    """(r, s, D0, branch0) with value r + s*delta0, D0 squarefree and delta0 its
    root selected by branch0.  Equal values give equal forms."""
    p = x.prime
    D0 = core(abs(x.Delta), 2) * (1 if x.Delta > 0 else -1)
    m = isqrt(x.Delta // D0)
    _, m_unit = split_power(m, p)
    mod = 8 if p == 2 else p
    branch0 = validate_branch(D0, p, x.branch * pow(m_unit, -1, mod) % mod)
    # the two roots are +-delta0; always express the value over the smaller residue
    sign = 1
    if mod - branch0 < branch0:
        branch0, sign = mod - branch0, -1
    den = x.denominator
    return Fraction(x.b) / den, sign * Fraction(m) / den, D0, branch0


def same_value(x: QuadraticSurd, y: QuadraticSurd) -> bool:
    return x.prime == y.prime and canonical_form(x) == canonical_form(y)


def field_valuation(r: Fraction, s: Fraction, x: QuadraticSurd) -> int:
    """v(r + s*d0) where d0 = delta / l**(h/2) is the branch-selected root of x's l-free ordinate."""
    p = x.prime
    r, s = Fraction(r), Fraction(s)
    if r == 0 and s == 0:
        raise ValueError("valuation of 0 is undefined")
    den = r.denominator * s.denominator
    X, Y = int(r * den), int(s * den)
    shift = vp(den, p)
    if Y == 0:
        return vp(X, p) - shift
    if X == 0:
        return vp(Y, p) - shift
    unit = x.unit_part
    # v(X + Y d0) <= v(X**2 - Y**2 unit) since v(X - Y d0) >= 0
    k = vp(X * X - Y * Y * unit, p) + 1
    mod = p**k
    n = (X + Y * sqrt_mod(unit, p, x.branch, k)) % mod
    return vp(n, p) - shift


def make_surd(Delta: int, b: int, c: int, f: int, prime: int, branch: int, u: int = 1) -> QuadraticSurd:
    """Build (b + u*delta) / (c * l**f), normalized so that c | Delta - b**2.

    The coefficient u is folded into the ordinate (Delta -> u**2 Delta); a
    negative u or c is moved into the sign of c.
    """
    p = Prime(prime)
    if Delta == 0 or is_square(Delta):
        raise RationalSquareError(f"{Delta} is a perfect square; use the rational path")
    if not sqrt_exists(Delta, p):
        raise NoSquareRootError(f"sqrt({Delta}) is not in Q_{p}")
    if u == 0 or c == 0:
        raise ValueError("u and c must be nonzero")
    branch = validate_branch(Delta, p, branch)
    if u < 0:
        b, c, u = -b, -c, -u
    k, c_unit = split_power(c, p)
    f += k
    c = c_unit
    if u != 1:
        _, u_unit = split_power(u, p)
        Delta *= u * u
        branch = validate_branch(Delta, p, branch * u_unit)
    d = abs(c) // gcd(c, Delta - b * b)
    if d != 1:
        b, c, Delta = b * d, c * d, Delta * d * d
        branch = validate_branch(Delta, p, branch * d)
    return QuadraticSurd(Delta, b, c, f, p, branch)


def surd_floor(x: QuadraticSurd) -> PartialQuotient:
    """The l-adic integral part, from delta mod l**(f+1)."""
    p = x.prime
    v = x.valuation()
    if v >= 1:
        return PartialQuotient(0, 0, p)
    e = -v
    w = x.f - e  # v(b + delta)
    mod = p ** (x.f + 1)
    n = (x.b + x.delta_mod(x.f + 1)) % mod
    r = (n // p**w) * pow(x.c, -1, p ** (e + 1)) % p ** (e + 1)
    return PartialQuotient(r, e, p)


def surd_step(x: QuadraticSurd) -> tuple[PartialQuotient, QuadraticSurd]:
    """a = floor(x) and the next complete quotient 1/(x - a), via the (b, c, f) recurrence."""
    p = x.prime
    a = surd_floor(x)
    b1 = a.r * p ** (x.f - a.e) * x.c - x.b if a.r else -x.b
    n = x.Delta - b1 * b1
    w = vp(n, p)
    rest = n // p**w
    if rest % x.c:
        raise ValueError(f"{x} violates c | Delta - b^2")
    return a, QuadraticSurd(x.Delta, b1, rest // x.c, w - x.f, p, x.branch)


def strip(x: QuadraticSurd) -> QuadraticSurd:
    """Cancel common l-powers between b and delta."""
    p = x.prime
    k = x.h // 2
    if x.b:
        k = min(k, vp(x.b, p))
    if k == 0:
        return x
    return replace(x, b=x.b // p**k, Delta=x.Delta // p ** (2 * k), f=x.f - k)


def advance(x: QuadraticSurd) -> tuple[PartialQuotient, QuadraticSurd]:
    a, nxt = surd_step(x)
    return a, strip(nxt)


def is_standard(x: QuadraticSurd) -> bool:
    p = x.prime
    if x.Delta % p == 0 or x.f < 0:
        return False
    if (x.Delta - x.b * x.b) % (p**x.f * x.c):
        return False
    target = -x.f if p != 2 else 1 - x.f
    return target < 0 and x.valuation() == target


def reduce_to_standard(x: QuadraticSurd) -> tuple[list[PartialQuotient], QuadraticSurd]:
    """Expand until a complete quotient has the standard shape.

    For v(x) <= 0 this takes at most v(Delta)/2 + 2 steps.
    """
    x = make_surd(x.Delta, x.b, x.c, x.f, x.prime, x.branch)
    limit = x.h // 2 + 2 + (1 if x.valuation() > 0 else 0)
    prefix = []
    for _ in range(limit):
        a, x = advance(x)
        prefix.append(a)
        if is_standard(x):
            return prefix, x
    raise AssertionError(f"no standard shape after {limit} steps")


def embedding_signs(x: QuadraticSurd) -> tuple[int, int]:
    """Signs of the real images under delta -> +sqrt(Delta) and delta -> -sqrt(Delta)."""
    if x.Delta < 0:
        raise NoRealEmbeddingError(f"Delta={x.Delta} < 0 has no real embedding")
    b, D = x.b, x.Delta
    plus = 1 if b >= 0 else (1 if D > b * b else -1)
    minus = -1 if b <= 0 else (1 if b * b > D else -1)
    s = 1 if x.c > 0 else -1
    return plus * s, minus * s


def both_negative(x: QuadraticSurd) -> bool:
    return embedding_signs(x) == (-1, -1)


def _n_formula(extra: int, D: int) -> int:
    t = isqrt(D)
    return extra + (2 * t + 1) * D - t * (t + 1) * (2 * t + 1) // 3 + 1


def n_alpha(x: QuadraticSurd, improved: bool = False) -> int:
    """Step bound within which a repetition or a both-negative quotient occurs."""
    if x.Delta <= 0:
        raise NoRealEmbeddingError("N_alpha needs Delta > 0")
    t = isqrt(x.Delta)
    if not improved:
        return _n_formula(max(0, abs(x.b) - t), x.Delta)
    half = x.h // 2
    return _n_formula(max(half + 2, abs(x.b) - t), x.unit_part)


@dataclass
class QuadraticClassification:
    outcome: Outcome
    preperiod: list[PartialQuotient] = field(default_factory=list)
    period: list[PartialQuotient] = field(default_factory=list)
    witness_index: int | None = None
    witness: QuadraticSurd | None = None
    steps_used: int = 0
    bound_used: int = 0
    quotients: list[PartialQuotient] = field(default_factory=list)
    complete_quotients: list[QuadraticSurd] = field(default_factory=list)

    @property
    def periodic(self) -> bool:
        return self.outcome is Outcome.PERIODIC


def _minimal_period(period: list[PartialQuotient]) -> list[PartialQuotient]:
    n = len(period)
    for d in range(1, n + 1):
        if n % d == 0 and all(period[i] == period[i % d] for i in range(n)):
            return period[:d]
    return period


def classify_quadratic(
    x: QuadraticSurd,
    improved: bool = False,
    naive_scan: bool = False,
    max_steps: int | None = None,
) -> QuadraticClassification:
    """Decide whether the expansion of x is periodic.

    Stops at the first complete quotient whose two real images are negative
    (the expansion can then never be periodic) or at the first repeated
    complete quotient.  One of the two happens within the N_alpha bound;
    ``naive_scan`` replaces the hash lookup by the quadratic scan over all
    earlier quotients.
    """
    x = make_surd(x.Delta, x.b, x.c, x.f, x.prime, x.branch)
    if x.Delta < 0:
        return QuadraticClassification(Outcome.APERIODIC, complete_quotients=[x])
    if improved:
        bound = n_alpha(x, improved=True)
    else:
        cur = x
        skip = 0
        if cur.valuation() > 0:
            _, cur = advance(cur)
            skip = 1
        prefix, std = reduce_to_standard(cur)
        bound = skip + len(prefix) + n_alpha(std)
    if max_steps is not None:
        bound = min(bound, max_steps)

    cqs = [x]
    quotients: list[PartialQuotient] = []
    seen = {x.key(): 0}
    cur = x
    for i in range(bound + 1):
        if both_negative(cur):
            return QuadraticClassification(
                Outcome.APERIODIC,
                witness_index=i,
                witness=cur,
                steps_used=i,
                bound_used=bound,
                quotients=quotients,
                complete_quotients=cqs,
            )
        a, nxt = advance(cur)
        quotients.append(a)
        if naive_scan:
            key = nxt.key()
            j = next((k for k, y in enumerate(cqs) if y.key() == key), None)
        else:
            j = seen.get(nxt.key())
        if j is not None:
            return QuadraticClassification(
                Outcome.PERIODIC,
                preperiod=quotients[:j],
                period=_minimal_period(quotients[j:]),
                steps_used=i + 1,
                bound_used=bound,
                quotients=quotients,
                complete_quotients=cqs,
            )
        cqs.append(nxt)
        seen[nxt.key()] = i + 1
        cur = nxt
    if max_steps is not None:
        raise RuntimeError(f"undecided after max_steps={max_steps}")
    raise AssertionError(f"classification of {x} exhausted N_alpha={bound}")


def expand_surd(x: QuadraticSurd, steps: int) -> tuple[list[PartialQuotient], list[QuadraticSurd]]:
    """The first ``steps`` partial quotients and complete quotients alpha_0..alpha_steps."""
    x = make_surd(x.Delta, x.b, x.c, x.f, x.prime, x.branch)
    quotients, cqs = [], [x]
    for _ in range(steps):
        a, x = advance(x)
        quotients.append(a)
        cqs.append(x)
    return quotients, cqs


def roots_of(A: int, B: int, C: int, prime: int) -> list[QuadraticSurd]:
    """The l-adic roots of A x**2 + B x + C as surds (empty if none lie in Q_l)."""
    p = Prime(prime)
    D = B * B - 4 * A * C
    if A == 0 or D == 0 or is_square(D):
        raise ReduciblePolynomialError(f"{A}x^2+{B}x+{C} is reducible")
    if not sqrt_exists(D, p):
        return []
    _, unit = split_power(D, p)
    mod = 8 if p == 2 else p
    branches = [br for br in range(1, mod) if _branch_ok(unit, p, br)]
    # (-B + delta) / (2A) for each choice of the root
    return [make_surd(D, -B, 2 * A, 0, p, br) for br in branches]


def _branch_ok(unit: int, p: int, br: int) -> bool:
    try:
        validate_branch(unit, p, br)
    except ValueError:
        return False
    return True


def aperiodicity_threshold(A: int, B: int, C: int, prime: int) -> bool:
    """Sufficient condition for both roots to have aperiodic expansions:
    l does not divide A and l > max(Delta / 4A, C)."""
    D = B * B - 4 * A * C
    if D == 0 or is_square(D):
        raise ReduciblePolynomialError(f"{A}x^2+{B}x+{C} is reducible")
    if A <= 0 or D <= 0:
        raise ValueError("requires A > 0 and Delta > 0")
    p = int(prime)
    return A % p != 0 and p > max(Fraction(D, 4 * A), C)


def family_nonperiodic_check(k: int, h: int, prime: int) -> bool:
    """Whether Delta = 1 + k l**h exceeds (l**h + 1)**2."""
    p = Prime(prime)
    if p == 2:
        raise ValueError("l must be odd")
    if k <= 0 or h <= 0 or k % p == 0:
        raise ValueError("need positive k, h with gcd(k, l) = 1")
    D = 1 + k * p**h
    if is_square(D):
        raise RationalSquareError(f"{D} is a perfect square")
    return D > (p**h + 1) ** 2
