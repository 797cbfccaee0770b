from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rubancf.padic import (
    InvalidBranchError,
    LRational,
    NoSquareRootError,
    PartialQuotient,
    Prime,
    RationalSquareError,
    UndefinedValuationError,
    digit_expansion,
    hensel_sqrt,
    padic_floor,
    sqrt_exists,
    sqrt_mod,
    valuation,
)

from oracles import digit_sqrt, rational_floor_digits, vp_frac

PRIMES = [2, 3, 5, 7, 13]

rationals = st.builds(
    Fraction,
    st.integers(-10**6, 10**6),
    st.integers(1, 10**6),
).filter(lambda x: x != 0)


def test_prime_validation():
    assert Prime(7) == 7
    assert str(Prime(7)) == "7"
    for bad in (0, 1, 4, 91, -3):
        with pytest.raises(ValueError):
            Prime(bad)
    assert Prime(2**61 - 1) == 2**61 - 1


@pytest.mark.parametrize(
    "x, p, v",
    [("5/6", 3, -1), ("17/11", 3, 0), ("18/5", 3, 2), ("1/8", 2, -3)],
)
def test_valuation_examples(x, p, v):
    assert valuation(LRational.parse(x, p)) == v


def test_valuation_of_zero():
    with pytest.raises(UndefinedValuationError):
        valuation(LRational(0, 3))


def test_lrational_is_reduced():
    x = LRational(Fraction(6, 4), 3)
    assert (x.num, x.den) == (3, 2)
    assert x.val == 1
    assert LRational(Fraction(-9, 2), 3).height() == 9


@pytest.mark.parametrize(
    "x, p, expected",
    [("11/6", 3, "1/3"), ("5/6", 3, "7/3"), ("-2/3", 3, "7/3"), ("9/2", 3, "0"), ("0", 5, "0")],
)
def test_floor_examples(x, p, expected):
    assert str(padic_floor(LRational.parse(x, p))) == expected


def test_partial_quotient_invariants():
    a = PartialQuotient(7, 1, 3)
    assert a.value == Fraction(7, 3)
    assert str(a) == "7/3"
    with pytest.raises(ValueError):
        PartialQuotient(9, 1, 3)  # 3 | r
    with pytest.raises(ValueError):
        PartialQuotient(27, 2, 3)  # r >= l**(e+1)
    assert PartialQuotient.from_fraction(Fraction(26, 9), 3) == PartialQuotient(26, 2, 3)


@pytest.mark.parametrize(
    "x, p, lo, hi, digits",
    [("17/11", 3, 0, 3, [1, 1, 0, 1]), ("-1/3", 3, -1, 2, [2, 2, 2, 2]), ("1", 5, 0, 0, [1]), ("1", 2, 0, 0, [1])],
)
def test_digit_examples(x, p, lo, hi, digits):
    assert digit_expansion(LRational.parse(x, p), lo, hi) == digits


def test_digit_expansion_rejects_bad_range():
    with pytest.raises(ValueError):
        digit_expansion(LRational.parse("9", 3), 3, 4)
    with pytest.raises(ValueError):
        digit_expansion(LRational.parse("1", 3), 2, 1)


@settings(max_examples=300, deadline=None)
@given(rationals, st.sampled_from(PRIMES))
def test_floor_properties(x, p):
    lx = LRational(x, p)
    a = padic_floor(lx)
    assert 0 <= a.value < p
    rest = x - a.value
    assert rest == 0 or vp_frac(rest, p) >= 1
    assert a.value == rational_floor_digits(x, p)


@settings(max_examples=300, deadline=None)
@given(rationals, st.sampled_from(PRIMES))
def test_floor_matches_digit_truncation(x, p):
    lx = LRational(x, p)
    v = int(lx.val)
    a = padic_floor(lx)
    if v >= 1:
        assert a.value == 0
        return
    digits = digit_expansion(lx, v, 0)
    assert a.value == sum(Fraction(d) * Fraction(p) ** i for i, d in zip(range(v, 1), digits))


@pytest.mark.parametrize("D, p, expected", [(37, 3, True), (13, 3, True), (18, 3, False), (17, 2, True), (5, 2, False), (12, 3, False), (-2, 3, True)])
def test_sqrt_exists_examples(D, p, expected):
    assert sqrt_exists(D, p) is expected


def test_sqrt_exists_rational_square():
    with pytest.raises(RationalSquareError):
        sqrt_exists(49, 3)


@settings(max_examples=200, deadline=None)
@given(st.integers(-2000, 2000), st.sampled_from(PRIMES))
def test_sqrt_exists_against_brute_force(D, p):
    if D == 0 or (D > 0 and int(D**0.5 + 0.5) ** 2 == D):
        return
    h = 0
    n = D
    while n % p == 0:
        n //= p
        h += 1
    k = 3 if p == 2 else 1
    unit_square = any((y * y - n) % p**k == 0 for y in range(1, p**k) if y % p)
    assert sqrt_exists(D, p) is (h % 2 == 0 and unit_square)


@pytest.mark.parametrize(
    "D, p, branch, k, expected",
    [(37, 3, 1, 5, 100), (2, 7, 3, 1, 3), (13, 3, 1, 2, 7)],
)
def test_hensel_examples(D, p, branch, k, expected):
    root = hensel_sqrt(D, p, branch, k)
    assert root.delta_mod == expected
    assert root.modulus_exp == k


def test_hensel_errors():
    with pytest.raises(InvalidBranchError):
        hensel_sqrt(37, 3, 0, 4)
    with pytest.raises(InvalidBranchError):
        hensel_sqrt(17, 2, 3, 6)
    with pytest.raises(NoSquareRootError):
        hensel_sqrt(2, 3, 1, 4)
    with pytest.raises(ValueError):
        hensel_sqrt(18, 3, 1, 4)


def _root_cases():
    out = []
    for p in (2, 3, 5, 7, 13):
        for D in range(-60, 200):
            if D == 0 or D % p == 0 or (D > 0 and int(D**0.5 + 0.5) ** 2 == D):
                continue
            if sqrt_exists(D, p):
                out.append((D, p))
    return out


ROOT_CASES = _root_cases()


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(ROOT_CASES), st.integers(1, 40), st.booleans())
def test_hensel_square_stability_and_oracle(case, k, other):
    D, p = case
    mod = 8 if p == 2 else p
    branches = [b for b in range(1, mod) if b % 2 or p != 2]
    branches = [b for b in branches if (b * b - D) % (16 if p == 2 else p) == 0]
    branch = branches[-1] if other else branches[0]
    root = hensel_sqrt(D, p, branch, k)
    assert (root.delta_mod**2 - D) % p**k == 0
    assert root.delta_mod == digit_sqrt(D, p, branch, k)
    for j in range(0, k + 1):
        assert hensel_sqrt(D, p, branch, j).delta_mod == root.delta_mod % p**j
    assert root.to(k + 3).delta_mod % p**k == root.delta_mod


def test_sqrt_mod_with_l_power():
    # sqrt(117) = 3 sqrt(13) in Q_3
    for k in range(1, 8):
        d = sqrt_mod(117, 3, 1, k)
        assert (d * d - 117) % 3**k == 0
    assert sqrt_mod(117, 3, 1, 4) == 3 * hensel_sqrt(13, 3, 1, 3).delta_mod
