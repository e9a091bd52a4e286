from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from flt2cert.cyclotomic import (
    INF, CycNum, PadicCyc, PrimeContext, galois_apply, lambda_expand, lambda_valuation, norm, reduce_padic, trace,
)
from oracles import lambda_valuation_via_norm, numeric_trace_error, oracle_mul, oracle_norm

PRIMES = [3, 5, 7, 11, 13]


def cyc(p, ints):
    return CycNum.from_coeffs(p, ints)


@st.composite
def elements(draw, p=None, lo=-20, hi=20, rational=False):
    p = p or draw(st.sampled_from(PRIMES))
    if rational:
        cs = draw(st.lists(st.fractions(min_value=lo, max_value=hi, max_denominator=12), min_size=p - 1, max_size=p - 1))
    else:
        cs = draw(st.lists(st.integers(lo, hi), min_size=p - 1, max_size=p - 1))
    return cyc(p, cs)


def test_prime_context_rejects_bad_input():
    for bad in (1, 2, 4, 9, 15):
        with pytest.raises(ValueError):
            PrimeContext(bad)
    ctx = PrimeContext(13)
    assert ctx.q == 6
    assert len({pow(ctx.g, k, 13) for k in range(12)}) == 12
    with pytest.raises(ValueError):
        PrimeContext(13, g=3)  # 3 has order 3 mod 13


def test_galois_examples():
    z = CycNum.zeta(7)
    assert galois_apply(2, z) == CycNum.zeta(7, 2)
    assert galois_apply(2, galois_apply(3, CycNum.zeta(5))) == CycNum.zeta(5)
    with pytest.raises(ValueError):
        galois_apply(7, z)


def test_trace_and_norm_examples():
    for p in PRIMES:
        ctx = PrimeContext(p)
        assert trace(ctx.zeta()) == -1
        assert trace(ctx.one()) == p - 1
        for a in range(1, p):
            assert trace(ctx.zeta(a) * ctx.zeta(-a)) == p - 1
        assert norm(ctx.lam) == p
        assert norm(ctx.zeta()) == 1
        assert norm(CycNum.from_int(p, 2)) == 2 ** (p - 1)


def test_mu_times_lambda_is_p_squared():
    for p in PRIMES:
        ctx = PrimeContext(p)
        assert ctx.lam * ctx.mu == CycNum.from_int(p, p * p)
        assert ctx.mu.is_integral()


@given(elements(rational=True), st.data())
def test_multiplication_matches_polynomial_oracle(x, data):
    y = data.draw(elements(p=x.p, rational=True))
    assert (x * y).coeffs == oracle_mul(x.coeffs, y.coeffs, x.p)


@given(elements(lo=-6, hi=6))
def test_norm_matches_resultant(x):
    assert norm(x) == oracle_norm(x.coeffs, x.p)


@given(elements(rational=True))
def test_trace_matches_numeric_conjugate_sum(x):
    assert numeric_trace_error(x.coeffs, x.p, trace(x)) < 1e-30


@given(elements(rational=True))
def test_basis_roundtrip_and_trace_coordinate_formula(x):
    assert CycNum.from_coeffs(x.p, x.coeffs) == x
    t = trace(x)
    for c in range(1, x.p):
        assert (trace(CycNum.zeta(x.p, -c) * x) - t) / x.p == x.coeff(c)


@given(elements(rational=True), st.data())
def test_galois_is_ring_homomorphism_and_permutes_conjugates(x, data):
    p = x.p
    y = data.draw(elements(p=p, rational=True))
    c = data.draw(st.integers(1, p - 1))
    d = data.draw(st.integers(1, p - 1))
    assert (x * y).galois(c) == x.galois(c) * y.galois(c)
    assert (x + y).galois(c) == x.galois(c) + y.galois(c)
    assert x.conj().conj() == x
    assert x.galois(c).galois(d) == x.galois(c * d % p)
    conj = sorted(repr(x.galois(a)) for a in range(1, p))
    shifted = sorted(repr(x.galois(a).galois(d)) for a in range(1, p))
    assert conj == shifted


def test_lambda_valuation_examples():
    for p in PRIMES:
        ctx = PrimeContext(p)
        assert lambda_valuation(CycNum.from_int(p, p)) == p - 1
        assert lambda_valuation(ctx.lam) == 1
        assert lambda_valuation(CycNum.zero(p)) is INF
    lam = PrimeContext(5).lam
    assert lambda_valuation(lam**3 * 7) == 3


@given(elements(lo=-9, hi=9), st.integers(0, 4))
def test_lambda_valuation_matches_norm_oracle(x, k):
    if x.is_zero():
        return
    y = x * PrimeContext(x.p).lam ** k
    assert lambda_valuation(y) == lambda_valuation_via_norm(y.coeffs, x.p)


@given(elements(lo=-9, hi=9), st.data())
def test_lambda_valuation_additive(x, data):
    y = data.draw(elements(p=x.p, lo=-9, hi=9))
    if x.is_zero() or y.is_zero():
        return
    assert lambda_valuation(x * y) == lambda_valuation(x) + lambda_valuation(y)
    # v >= 1 iff the augmentation vanishes mod p
    assert (lambda_valuation(x) >= 1) == (sum(x.coeffs) % x.p == 0)


def test_lambda_valuation_of_p_power_denominators():
    p = 7
    x = CycNum.from_int(p, 1) / p
    assert lambda_valuation(x) == -(p - 1)
    assert lambda_valuation(PrimeContext(p).lam / p) == 1 - (p - 1)


def test_lambda_expand_examples():
    for p in PRIMES:
        e = lambda_expand(CycNum.zero(p), 5)
        assert set(e.digits) == {0}
        e = lambda_expand(CycNum.from_int(p, p), p)
        # v_lambda(p) = p - 1: the first nonzero digit sits at lambda^(p-1)
        assert e.digits[: p - 1] == (0,) * (p - 1) and e.digits[p - 1] != 0
    e = lambda_expand(CycNum.zeta(5), 4)
    assert e.digits == (1, 4, 0, 0)
    with pytest.raises(ValueError):
        lambda_expand(CycNum.from_int(5, Fraction(1, 2)), 3)


@given(elements(lo=-30, hi=30), st.integers(1, 12))
def test_lambda_expand_reconstructs(x, k):
    e = lambda_expand(x, k)
    rest = x - e.value()
    assert rest.is_zero() or lambda_valuation(rest) >= k


def test_reduce_padic_examples():
    r = reduce_padic(CycNum.from_int(5, Fraction(1, 2)), 2)
    assert r == reduce_padic(CycNum.from_int(5, 13), 2)
    assert r.coeffs == tuple((-13) % 25 for _ in range(4))
    assert reduce_padic(CycNum.zero(5), 3).is_zero()
    with pytest.raises(ValueError):
        reduce_padic(CycNum.from_int(5, Fraction(1, 5)), 2)


@given(elements(rational=True), st.data(), st.integers(1, 5))
def test_reduce_padic_is_homomorphism(x, data, K):
    p = x.p
    y = data.draw(elements(p=p, rational=True))
    if any(Fraction(a).denominator % p == 0 for a in x.coeffs + y.coeffs):
        return
    rx, ry = reduce_padic(x, K), reduce_padic(y, K)
    assert reduce_padic(x + y, K) == rx + ry
    assert reduce_padic(x * y, K) == rx * ry
    c = data.draw(st.integers(1, p - 1))
    assert reduce_padic(x.galois(c), K) == rx.galois(c)


def test_padic_inverse_of_units():
    rng = random.Random(5)
    for _ in range(50):
        p = rng.choice(PRIMES)
        x = cyc(p, [rng.randint(-50, 50) for _ in range(p - 1)])
        r = reduce_padic(x, 4)
        if r.is_unit():
            assert r * r.inverse() == PadicCyc.one(p, 4)
