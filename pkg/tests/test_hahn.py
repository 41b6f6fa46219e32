"""Coefficient-domain arithmetic against independent dict-based oracles and
math.comb for the binomial reduction."""
from fractions import Fraction
import math
import random

import pytest

from ramcalc.errors import InvalidDatum
from ramcalc.hahn import Coeff, PrimeContext, binom_mod_p
from ramcalc.pmfun import INF, Val

F = Fraction
P3 = PrimeContext(3)
P2 = PrimeContext(2)


# oracle: plain dict arithmetic, no normal forms shared with the implementation
def oracle_add(p, t1, t2):
    acc = {}
    for e, a in list(t1) + list(t2):
        acc[e] = (acc.get(e, 0) + a) % p
    return {e: a for e, a in acc.items() if a}


def oracle_mul(p, t1, t2):
    acc = {}
    for e1, a1 in t1:
        for e2, a2 in t2:
            acc[e1 + e2] = (acc.get(e1 + e2, 0) + a1 * a2) % p
    return {e: a for e, a in acc.items() if a}


def as_dict(c):
    return dict(c.terms)


def rnd_coeff(rng, ctx, allow_negative=True):
    n = rng.randint(0, 4)
    terms = []
    for _ in range(n):
        num = rng.randint(-12 if allow_negative else 0, 30)
        den = rng.randint(1, 8)
        terms.append((F(num, den), rng.randint(1, ctx.p - 1)))
    return Coeff.make(ctx, terms)


def test_prime_context_validation():
    PrimeContext(2)
    PrimeContext(13)
    for bad in (1, 0, -3, 4, 9, 15):
        with pytest.raises(InvalidDatum):
            PrimeContext(bad)


def test_normal_form():
    c = Coeff.make(P3, [(F(1, 2), 2), (F(1, 2), 1), (0, 4)])  # 3eps^{1/2} + 4 = 1
    assert c.terms == ((F(0), 1),)
    z = Coeff.make(P3, [(5, 3)])
    assert z.is_zero and z.val().is_inf
    with pytest.raises(InvalidDatum):
        Coeff(P3, ((F(0), 3),))  # unreduced coefficient
    with pytest.raises(InvalidDatum):
        Coeff(P3, ((F(1), 1), (F(1), 2)))  # duplicate exponent


def test_val():
    c = Coeff.make(P3, [(F(9, 2), 2), (7, 1)])
    assert c.val() == Val(F(9, 2))
    assert Coeff.monomial(P3, F(-3, 4)).val() == Val(F(-3, 4))  # negative ok internally
    assert Coeff.zero(P3).val() == INF


def test_add_mul_against_oracle():
    rng = random.Random(424242)
    for ctx in (P2, P3, PrimeContext(5)):
        for _ in range(250):
            c1 = rnd_coeff(rng, ctx)
            c2 = rnd_coeff(rng, ctx)
            assert as_dict(c1 + c2) == oracle_add(ctx.p, c1.terms, c2.terms)
            assert as_dict(c1 * c2) == oracle_mul(ctx.p, c1.terms, c2.terms)


def test_ring_axioms_randomized():
    rng = random.Random(77)
    for _ in range(200):
        a, b, c = (rnd_coeff(rng, P3) for _ in range(3))
        assert a + b == b + a
        assert a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a + (-a) == Coeff.zero(P3)
        assert a - b == a + (-b)
        assert a * Coeff.one(P3) == a
        assert (a * Coeff.zero(P3)).is_zero


def test_pow_matches_repeated_mul():
    rng = random.Random(31337)
    for _ in range(60):
        a = rnd_coeff(rng, P3)
        acc = Coeff.one(P3)
        for n in range(8):
            assert a**n == acc
            acc = acc * a
    with pytest.raises(ValueError):
        rnd_coeff(rng, P3) ** -1


def test_frobenius_in_char_p():
    rng = random.Random(2718)
    for ctx in (P2, P3):
        for _ in range(100):
            a = rnd_coeff(rng, ctx)
            b = rnd_coeff(rng, ctx)
            assert (a + b) ** ctx.p == a**ctx.p + b**ctx.p


def test_val_is_ultrametric_and_multiplicative():
    rng = random.Random(515)
    for _ in range(200):
        a = rnd_coeff(rng, P3)
        b = rnd_coeff(rng, P3)
        assert (a + b).val() >= min(a.val(), b.val())
        if a.val() != b.val():
            assert (a + b).val() == min(a.val(), b.val())
        # integral domain: valuations add
        assert (a * b).val() == a.val() + b.val()


def test_scale():
    c = Coeff.make(P3, [(1, 1), (2, 2)])
    assert c.scale(2) == Coeff.make(P3, [(1, 2), (2, 1)])
    assert c.scale(3).is_zero
    assert c.scale(1) == c


def test_mixed_context_rejected():
    with pytest.raises(ValueError):
        Coeff.one(P2) + Coeff.one(P3)
    with pytest.raises(ValueError):
        Coeff.one(P2) * Coeff.one(P3)


def test_binom_mod_p_against_math_comb():
    for p in (2, 3, 5, 7):
        for n in range(0, 70):
            for j in range(0, n + 1):
                assert binom_mod_p(p, n, j) == math.comb(n, j) % p
    with pytest.raises(ValueError):
        binom_mod_p(3, 2, 5)
    with pytest.raises(ValueError):
        binom_mod_p(3, 5, -1)
    with pytest.raises(InvalidDatum):
        binom_mod_p(4, 5, 2)
    with pytest.raises(InvalidDatum):
        binom_mod_p(1, 5, 2)


def test_binom_spec_example():
    # C(18, 9) = 48620 = 2 mod 3
    assert binom_mod_p(3, 18, 9) == 2
    assert binom_mod_p(3, 6, 3) == 2
    assert binom_mod_p(3, 9, 3) == 0


def test_json_round_trip():
    c = Coeff.make(P3, [(F(9, 2), 2), (7, 1)])
    blob = c.to_json_list()
    assert blob == [{"e": "9/2", "a": 2}, {"e": "7/1", "a": 1}]
    assert Coeff.from_json_list(P3, blob) == c
    assert Coeff.from_json_list(P3, []).is_zero
