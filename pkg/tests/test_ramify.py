"""Ramification calculus: filtrations, Herbrand's function both ways,
differents, functoriality, towers.

The pointwise oracle for Herbrand's function is computed inside the tests
as a literal sum of mins, so both production routes are measured against
a third, dumber one.
"""
from fractions import Fraction
import random

import pytest

from ramcalc.errors import InvalidDatum, InvariantViolation
from ramcalc.groups import cyclic, dihedral, direct_product, elementary_abelian
from ramcalc.pmfun import PMFunction, ProfileFunction, Val, compose, identity, inverse
from ramcalc.ramify import (
    InertiaDatum,
    TowerStep,
    check_herbrand_transitivity,
    datum_from_chain,
    different,
    filtration,
    herbrand_product,
    herbrand_slopes,
    j_function,
    quotient_inertia,
    restrict_inertia,
    step_profile,
    tower_profile,
    upper_group,
)

F = Fraction


def z9_datum():
    """iv = 1 on the six generators, 3 on the order-3 elements."""
    g = cyclic(9)
    iv = {k: (F(3) if k in (3, 6) else F(1)) for k in range(1, 9)}
    return InertiaDatum(g, iv)


def z3_datum(c=F(2)):
    return InertiaDatum(cyclic(3), {1: c, 2: c})


def tame_datum(g):
    return InertiaDatum(g, {k: F(0) for k in range(1, g.order)})


def oracle_herbrand(d, v):
    """Literal displacement sum, identity contributing v."""
    return v + sum(min(x, v) for x in d.iv.values())


def rnd_chain_datum(rng, group):
    """Random subgroup chain + increasing values; the generic valid datum."""
    normals = group.normal_subgroups()
    chain = [frozenset(group.elements())]
    while len(chain[-1]) > 1:
        smaller = [h for h in normals if h < chain[-1]]
        chain.append(rng.choice(smaller))
    vals = set()
    while len(vals) < len(chain) - 1:
        vals.add(F(rng.randint(0, 60), rng.randint(1, 10)))
    return datum_from_chain(group, chain, sorted(vals))


GROUPS = [cyclic(n) for n in (2, 3, 4, 5, 7, 9, 12, 16, 25, 27)] + [
    elementary_abelian(2, 2),
    elementary_abelian(3, 2),
    elementary_abelian(2, 3),
    elementary_abelian(3, 3),
]


# ---------------------------------------------------------------- validity


def test_datum_validation():
    with pytest.raises(InvalidDatum):
        InertiaDatum(cyclic(3), {1: F(1)})  # missing element
    with pytest.raises(InvalidDatum):
        InertiaDatum(cyclic(3), {1: F(1), 2: F(1), 3: F(1)})  # extra key
    with pytest.raises(InvalidDatum):
        InertiaDatum(cyclic(3), {1: Val("inf"), 2: F(1)})
    with pytest.raises(InvalidDatum):
        InertiaDatum(cyclic(3), {1: F(-1), 2: F(-1)})
    with pytest.raises(InvalidDatum) as e:
        InertiaDatum(cyclic(3), {1: F(1), 2: F(2)})  # inv(1) = 2
    assert "inversion" in str(e.value)
    with pytest.raises(InvalidDatum) as e:
        InertiaDatum(cyclic(4), {1: F(1), 2: F(0), 3: F(1)})  # 1+1=2 drops
    assert "ultrametric" in str(e.value)
    d3 = dihedral(3)
    iv = {k: F(1) for k in range(1, 6)}
    iv[3] = F(2)  # one flip deeper than its conjugates
    with pytest.raises(InvalidDatum) as e:
        InertiaDatum(d3, iv)
    assert "conjugation" in str(e.value)


def test_datum_from_chain_validation():
    g = cyclic(9)
    h = frozenset({0, 3, 6})
    e = frozenset({0})
    full = frozenset(g.elements())
    d = datum_from_chain(g, [full, h, e], [1, 3])
    assert d == z9_datum()
    with pytest.raises(InvalidDatum):
        datum_from_chain(g, [full, h, e], [3, 1])  # not increasing
    with pytest.raises(InvalidDatum):
        datum_from_chain(g, [full, e], [1, 3])  # arity
    with pytest.raises(InvalidDatum):
        datum_from_chain(g, [full, h], [1])  # does not reach {e}
    d3 = dihedral(3)
    flip = frozenset({0, 3})
    with pytest.raises(InvalidDatum):
        datum_from_chain(
            d3, [frozenset(d3.elements()), flip, frozenset({0})], [0, 1]
        )  # non-normal layer


def test_filtration_reverifies_level_sets():
    d = z9_datum()
    broken = InertiaDatum.__new__(InertiaDatum)
    broken.group = d.group
    broken.iv = dict(d.iv)
    broken.iv[3] = F(5)  # {0,3} is not closed under +3
    with pytest.raises(InvalidDatum):
        filtration(broken)


# ---------------------------------------------------------------- filtration


def test_filtration_golden_z9():
    f = filtration(z9_datum())
    assert f.jumps == (F(1), F(3))
    assert f.groups == (frozenset(range(9)), frozenset({0, 3, 6}))
    assert f.orders == (9, 3, 1)


def test_filtration_z3():
    f = filtration(z3_datum())
    assert f.jumps == (F(2),) and f.orders == (3, 1)


def test_filtration_tame():
    f = filtration(tame_datum(cyclic(6)))
    assert f.jumps == (F(0),) and f.orders == (6, 1)


# ---------------------------------------------------------------- herbrand


def test_herbrand_slopes_golden():
    assert herbrand_slopes(z9_datum()) == ProfileFunction.from_data([1, 3], [9, 3, 1])
    assert herbrand_slopes(z3_datum()) == ProfileFunction.from_data([2], [3, 1])
    assert herbrand_slopes(tame_datum(cyclic(6))) == identity()
    assert herbrand_slopes(InertiaDatum(cyclic(1), {})) == identity()


def test_herbrand_product_golden_values():
    d = z3_datum()
    assert oracle_herbrand(d, F(1)) == 3
    assert oracle_herbrand(d, F(5)) == 9
    f = herbrand_product(d)
    assert f(1) == Val(3) and f(5) == Val(9)
    assert f == ProfileFunction.from_data([2], [3, 1])


def test_product_equals_slopes_on_catalog():
    rng = random.Random(2026)
    count = 0
    for g in GROUPS:
        for _ in range(3):
            d = rnd_chain_datum(rng, g)
            fp = herbrand_product(d)
            fs = herbrand_slopes(d)
            assert fp == fs
            # and both match the literal sum on a grid
            pts = sorted({F(0), *fs.breaks, *(b + F(1, 3) for b in fs.breaks), F(50)})
            for v in pts:
                assert fs(v) == Val(oracle_herbrand(d, v))
            count += 1
    assert count >= 40


def test_herbrand_slopes_are_subgroup_orders():
    rng = random.Random(31)
    for g in GROUPS[:8]:
        d = rnd_chain_datum(rng, g)
        for s in herbrand_slopes(d).slopes:
            assert s.denominator == 1 and g.order % s.numerator == 0


# ---------------------------------------------------------------- different


def test_different_golden():
    assert different(z3_datum()) == Val(4)  # (p-1)*2
    assert different(z9_datum()) == Val(12)  # 6*1 + 2*3
    assert different(tame_datum(cyclic(6))) == Val(0)


def test_different_degree_p_relation():
    for p, c in ((2, F(1, 2)), (3, F(1)), (5, F(7, 3))):
        d = InertiaDatum(cyclic(p), {k: c for k in range(1, p)})
        phi = herbrand_slopes(d)
        assert phi.breaks == (c,)
        assert different(d) == Val((p - 1) * c)


def test_different_detects_corruption():
    d = z9_datum()
    broken = InertiaDatum.__new__(InertiaDatum)
    broken.group = d.group
    broken.iv = dict(d.iv)
    broken.iv[1] = F(2)  # breaks conjugation-blind sums vs filtration
    with pytest.raises((InvariantViolation, InvalidDatum)):
        different(broken)


# ---------------------------------------------------------------- functoriality


def test_quotient_golden_z9():
    d = z9_datum()
    q = quotient_inertia(d, frozenset({0, 3, 6}))
    assert q.group.order == 3
    assert q.iv == {1: F(3), 2: F(3)}  # three lifts of iv 1 each


def test_quotient_trivial_cases():
    d = z9_datum()
    assert quotient_inertia(d, frozenset({0})) == d
    q = quotient_inertia(d, frozenset(range(9)))
    assert q.group.order == 1 and q.iv == {}
    with pytest.raises(InvalidDatum):
        quotient_inertia(
            InertiaDatum(dihedral(3), {k: F(1) for k in range(1, 6)}),
            frozenset({0, 3}),
        )


def test_restrict_golden_and_trivial():
    d = z9_datum()
    r = restrict_inertia(d, frozenset({0, 3, 6}))
    assert r.group.order == 3 and r.iv == {1: F(3), 2: F(3)}
    assert restrict_inertia(d, frozenset(range(9))) == d
    assert restrict_inertia(d, frozenset({0})).group.order == 1


def test_j_function():
    d = z9_datum()
    h = frozenset({0, 3, 6})
    for sigma in (1, 2, 4, 5, 7, 8):
        assert j_function(d, h, sigma) == Val(1)
    with pytest.raises(ValueError):
        j_function(d, h, 3)  # identity coset
    with pytest.raises(ValueError):
        j_function(d, h, 0)
    # H = {e}: j is iv itself
    assert j_function(d, frozenset({0}), 5) == Val(1)
    assert j_function(d, frozenset({0}), 6) == Val(3)
    # constant datum: j = c for any coset
    g = elementary_abelian(3, 2)
    c = F(7, 2)
    dc = InertiaDatum(g, {k: c for k in range(1, 9)})
    for h in g.subgroups():
        if len(h) == 3:
            sigma = next(x for x in g.elements() if x not in h)
            assert j_function(dc, h, sigma) == Val(c)


def test_upper_group_z9():
    d = z9_datum()
    full = frozenset(range(9))
    mid = frozenset({0, 3, 6})
    assert upper_group(d, 0) == full
    assert upper_group(d, 9) == full  # phi(1) = 9
    assert upper_group(d, 12) == mid  # psi(12) = 2
    assert upper_group(d, 15) == mid  # phi(3) = 15
    assert upper_group(d, 16) == frozenset({0})


# ---------------------------------------------------------------- transitivity


def test_transitivity_golden_z9():
    d = z9_datum()
    rep = check_herbrand_transitivity(d, frozenset({0, 3, 6}))
    assert rep.passed
    names = [c.name for c in rep.checks]
    assert names[0] == "compose" and "upper@1" in names and "upper@3" in names
    # composite equals the full Herbrand function
    q = quotient_inertia(d, frozenset({0, 3, 6}))
    r = restrict_inertia(d, frozenset({0, 3, 6}))
    assert compose(herbrand_slopes(q), herbrand_slopes(r)) == herbrand_slopes(d)


def test_transitivity_trivial_subgroup():
    d = z9_datum()
    assert check_herbrand_transitivity(d, frozenset({0})).passed
    assert check_herbrand_transitivity(d, frozenset(range(9))).passed


def test_transitivity_elementary_abelian_sweep():
    g = elementary_abelian(3, 2)
    subs3 = [h for h in g.subgroups() if len(h) == 3]
    assert len(subs3) == 4
    for inner in subs3:
        full = frozenset(g.elements())
        d = datum_from_chain(g, [full, inner, frozenset({0})], [F(1, 2), F(3)])
        for h in g.subgroups():
            assert check_herbrand_transitivity(d, h).passed


def test_transitivity_exhaustive_random():
    rng = random.Random(88)
    for g in GROUPS:
        d = rnd_chain_datum(rng, g)
        for h in g.normal_subgroups():
            rep = check_herbrand_transitivity(d, h)
            assert rep.passed, (g.order, sorted(h), [c for c in rep.checks if not c.passed])


# ---------------------------------------------------------------- towers


def test_step_profiles():
    assert step_profile(TowerStep.tame(2), 3) == identity()
    assert step_profile(TowerStep.insep(), 3) == ProfileFunction.from_data([], [3])
    assert step_profile(TowerStep.sep(4), 3) == ProfileFunction.from_data([2], [3, 1])
    assert step_profile(TowerStep.sep(0), 3) == identity()
    with pytest.raises(InvalidDatum):
        step_profile(TowerStep.tame(6), 3)


def test_tower_step_validation():
    with pytest.raises(InvalidDatum):
        TowerStep("tame")
    with pytest.raises(InvalidDatum):
        TowerStep("sep_p", degree=3, different_v=F(1))
    with pytest.raises(InvalidDatum):
        TowerStep("sep_p", different_v=F(-1))
    with pytest.raises(InvalidDatum):
        TowerStep("weird")
    with pytest.raises(InvalidDatum):
        TowerStep("insep_p", degree=3)


def test_tower_profile_frozen_examples():
    assert tower_profile([TowerStep.sep(4)], 3) == ProfileFunction.from_data([2], [3, 1])
    two = tower_profile([TowerStep.sep(6), TowerStep.sep(6)], 3)
    assert two == ProfileFunction.from_data([1, 3], [9, 3, 1])
    assert two == herbrand_slopes(z9_datum())
    assert tower_profile([TowerStep.tame(2), TowerStep.insep()], 3) == \
        ProfileFunction.from_data([], [3])
    assert tower_profile([], 3) == identity()
    with pytest.raises(InvalidDatum):
        tower_profile([TowerStep.sep(1)], 4)


def test_tower_matches_manual_compose():
    steps = [TowerStep.sep(6), TowerStep.tame(2), TowerStep.sep(1), TowerStep.insep()]
    p = 3
    manual = identity()
    for s in steps:
        manual = compose(manual, step_profile(s, p))
    assert tower_profile(steps, p) == manual
    assert tower_profile(steps, p).is_integral


def test_sep_towers_concave_p_power():
    for p in (2, 3, 5):
        for d1 in (F(1), F(6)):
            for d2 in (F(0), F(6)):
                f = tower_profile([TowerStep.sep(d1), TowerStep.sep(d2)], p)
                assert f.is_concave
                for s in f.slopes:
                    n = int(s)
                    while n % p == 0:
                        n //= p
                    assert n == 1


def test_tower_step_json():
    for s in (TowerStep.tame(4), TowerStep.insep(), TowerStep.sep(F(7, 2))):
        assert TowerStep.from_json_dict(s.to_json_dict()) == s
    assert TowerStep.from_json_dict({"kind": "sep_p", "different": "6/1"}) == TowerStep.sep(6)
    with pytest.raises(InvalidDatum):
        TowerStep.from_json_dict({"kind": "nope"})


def test_datum_json_round_trip():
    d = z9_datum()
    blob = d.to_json_dict()
    assert blob["iv"]["3"] == "3/1"
    assert InertiaDatum.from_json_dict(cyclic(9), blob) == d
