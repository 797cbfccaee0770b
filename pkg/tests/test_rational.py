import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rubancf.convergents import convergents
from rubancf.padic import LRational, PartialQuotient
from rubancf.rational import (
    TERMINAL,
    MalformedExpansionError,
    Outcome,
    RationalExpansion,
    bound_b1,
    bound_b2,
    bound_decision,
    classify_rational,
    expand_rational,
    rational_threshold,
    reconstruct_rational,
    scan_primes_rational,
    step_rational,
)

from oracles import evaluate_cf, naive_convergent, vp_frac

PRIMES = [2, 3, 5, 7, 11, 13]

rationals = st.builds(Fraction, st.integers(-5000, 5000), st.integers(1, 5000)).filter(lambda x: x != 0)


def strs(quotients):
    return [str(a) for a in quotients]


def test_step_examples():
    a, nxt = step_rational(LRational.parse("17/11", 3))
    assert str(a) == "1" and nxt.value == Fraction(11, 6)
    a, nxt = step_rational(LRational.parse("11/6", 3))
    assert str(a) == "1/3" and nxt.value == Fraction(2, 3)
    a, nxt = step_rational(LRational.parse("-1/3", 3))
    assert str(a) == "8/3" and nxt.value == Fraction(-1, 3)
    a, nxt = step_rational(LRational.parse("2/3", 3))
    assert str(a) == "2/3" and nxt is TERMINAL


@pytest.mark.parametrize(
    "x, p, outcome",
    [("17/11", 3, Outcome.FINITE), ("5/6", 3, Outcome.PERIODIC), ("-4/7", 5, Outcome.PERIODIC), ("6", 7, Outcome.FINITE)],
)
def test_classify_examples(x, p, outcome):
    assert classify_rational(LRational.parse(x, p)).outcome is outcome


def test_expand_examples():
    e = expand_rational(LRational.parse("17/11", 3))
    assert e.outcome is Outcome.FINITE and strs(e.quotients) == ["1", "1/3", "2/3"]
    e = expand_rational(LRational.parse("5/6", 3))
    assert e.outcome is Outcome.PERIODIC
    assert strs(e.quotients) == ["7/3", "7/3"] and strs(e.period) == ["8/3"]
    assert strs(e.all_quotients(2)) == ["7/3", "7/3", "8/3", "8/3"]
    e = expand_rational(LRational.parse("-1/5", 5))
    assert e.quotients == () and strs(e.period) == ["24/5"]
    e = expand_rational(LRational.parse("6", 7))
    assert strs(e.quotients) == ["6"]


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
def test_minus_one_over_l_is_purely_periodic(p):
    e = expand_rational(LRational(Fraction(-1, p), p))
    assert e.quotients == ()
    assert e.period == (PartialQuotient(p * p - 1, 1, p),)
    assert reconstruct_rational(e).value == Fraction(-1, p)


def test_reconstruct_examples():
    for x, p in (("17/11", 3), ("5/6", 3), ("-1/3", 3)):
        assert reconstruct_rational(expand_rational(LRational.parse(x, p))).value == Fraction(x)


def test_reconstruct_rejects_malformed():
    good = expand_rational(LRational.parse("5/6", 3))
    bad = RationalExpansion(good.prime, good.quotients, Outcome.APERIODIC, good.complete_quotients, good.state)
    with pytest.raises(MalformedExpansionError):
        reconstruct_rational(bad)


def test_bounds_by_integer_comparison():
    assert bound_b1(LRational.parse("1/9", 3)) == 2
    assert bound_b1(LRational.parse("1/10", 3)) == 3
    assert bound_b1(LRational.parse("5/1", 3)) == 2
    assert bound_b2(LRational.parse("5/6", 3)) == 32 * 3 * 36


def test_b1_counterexample_is_decided_by_proof_bound():
    # alpha_0..alpha_3 are positive although B1 = 3; alpha_4 is the first negative one
    x = LRational.parse("255/76", 5)
    c = classify_rational(x)
    assert c.bound == 3 and c.index == 4 and c.outcome is Outcome.PERIODIC
    assert bound_decision(x) == 4
    e = expand_rational(x)
    assert all(q > 0 for q in e.complete_quotients[:4]) and e.complete_quotients[4] < 0


def test_scan_examples():
    assert all(o is Outcome.PERIODIC for _, o in scan_primes_rational(Fraction(-7, 2), 13))
    assert rational_threshold(Fraction(5, 6)) == (6, Outcome.PERIODIC)
    assert dict(scan_primes_rational(Fraction(5, 6), 13))[7] is Outcome.PERIODIC
    assert rational_threshold(Fraction(6)) == (6, Outcome.FINITE)
    assert dict(scan_primes_rational(Fraction(6), 11))[7] is Outcome.FINITE


def test_threshold_prediction_holds():
    rng = random.Random(7)
    for _ in range(60):
        x = Fraction(rng.randint(-40, 40), rng.randint(1, 40))
        if x == 0:
            continue
        T, outcome = rational_threshold(x)
        for p, o in scan_primes_rational(x, 60):
            if p > T:
                assert o is outcome, (x, p)


@settings(max_examples=300, deadline=None)
@given(rationals, st.sampled_from(PRIMES))
def test_round_trip_and_agreement(x, p):
    lx = LRational(x, p)
    e = expand_rational(lx)
    assert reconstruct_rational(e).value == x
    assert classify_rational(lx).outcome is e.outcome
    if e.outcome is Outcome.FINITE:
        assert evaluate_cf([a.value for a in e.quotients]) == x


def test_round_trip_1000_per_prime():
    rng = random.Random(1234)
    for p in (2, 3, 5, 7):
        for _ in range(1000):
            x = Fraction(rng.randint(-10**5, 10**5), rng.randint(1, 10**5))
            if x == 0:
                continue
            assert reconstruct_rational(expand_rational(LRational(x, p))).value == x


@settings(max_examples=250, deadline=None)
@given(rationals, st.sampled_from(PRIMES), st.integers(0, 4))
def test_convergent_identities(x, p, extra):
    e = expand_rational(LRational(x, p))
    qs = e.all_quotients(extra)
    conv = convergents(qs, p)
    state = e.state
    a0_nonzero = qs and qs[0].value != 0
    for n in range(len(conv)):
        pn, qn = naive_convergent([a.value for a in qs], n)
        assert conv.p(n) == pn and conv.q(n) == qn
        if n >= 1:
            det = conv.p_tilde[n] * conv.q_tilde[n - 1] - conv.p_tilde[n - 1] * conv.q_tilde[n]
            assert det == (-1) ** n * p ** (conv.s[n] + conv.s[n - 1])
            if a0_nonzero:
                assert conv.p_tilde[n] % p != 0
                assert vp_frac(conv.q_tilde[n], p) == qs[0].e
        if n > 1 and a0_nonzero:
            s_n, s_prev = conv.s[n], conv.s[n - 1]
            if n % 2 == 0:
                assert conv.p_tilde[n] > p**s_n >= p ** (n - 1)
                assert conv.q_tilde[n] >= p**s_prev >= p ** (n - 2)
            else:
                assert conv.p_tilde[n] > p**s_prev >= p ** (n - 2)
                assert conv.q_tilde[n] >= p**s_n >= p ** (n - 1)
    if extra == 0:
        assert (state.p, state.q) == (conv.p_tilde[-1], conv.q_tilde[-1])
        if len(qs) >= 1:
            assert state.determinant() == (-1) ** state.n * p ** (state.s + state.s_prev)


@settings(max_examples=250, deadline=None)
@given(rationals, st.sampled_from(PRIMES), st.integers(0, 6))
def test_interleaving_of_convergents(x, p, extra):
    qs = expand_rational(LRational(x, p)).all_quotients(extra)
    if len(qs) < 2:
        return
    conv = convergents(qs, p)
    values = {n: conv.p(n) / conv.q(n) for n in range(1, len(conv))}
    odd = [values[n] for n in sorted(values) if n % 2]
    even = [values[n] for n in sorted(values) if n % 2 == 0]
    assert all(a < b for a, b in zip(odd, odd[1:]))
    assert all(a > b for a, b in zip(even, even[1:]))
    if odd and even:
        assert max(odd) < min(even)


@settings(max_examples=250, deadline=None)
@given(rationals, st.sampled_from(PRIMES), st.integers(0, 6))
def test_approximation_order(x, p, extra):
    e = expand_rational(LRational(x, p))
    qs = e.all_quotients(extra)
    conv = convergents(qs, p)
    if not qs:
        return
    e0 = qs[0].e
    for n in range(len(qs)):
        diff = conv.p(n) - x * conv.q(n)
        assert diff != 0
        assert vp_frac(diff, p) == conv.s[n + 1] - e0 >= n
    if e.outcome is Outcome.FINITE:
        assert conv.p(len(qs)) == x * conv.q(len(qs))


@settings(max_examples=300, deadline=None)
@given(rationals, st.sampled_from(PRIMES))
def test_finite_length_and_height_bounds(x, p):
    lx = LRational(x, p)
    e = expand_rational(lx)
    H = lx.height()
    if e.outcome is Outcome.FINITE:
        k = len(e.quotients)
        assert p ** max(k - 2, 0) <= min(abs(x.numerator), x.denominator) or k <= 2
        assert p ** max(k - 2, 0) <= H
    for alpha in e.complete_quotients:
        assert max(abs(alpha.numerator), alpha.denominator) <= 4 * p * H
    assert e.steps <= bound_b2(lx) + 1


@settings(max_examples=300, deadline=None)
@given(rationals, st.sampled_from(PRIMES))
def test_classification_index_is_first_decision(x, p):
    lx = LRational(x, p)
    c = classify_rational(lx)
    e = expand_rational(lx)
    cq = e.complete_quotients
    if c.outcome is Outcome.PERIODIC:
        assert cq[c.index] < 0 and all(q >= 0 for q in cq[: c.index])
    else:
        assert c.index == len(e.quotients) - 1
    assert c.index <= max(c.bound, bound_decision(lx))
