"""Cayley-table machinery at desk scale."""
import pytest

from ramcalc.errors import InvalidDatum
from ramcalc.groups import FiniteGroup, cyclic, dihedral, direct_product, elementary_abelian


def test_validation():
    with pytest.raises(InvalidDatum):
        FiniteGroup([])
    with pytest.raises(InvalidDatum):
        FiniteGroup([[0, 1], [1, 1]])  # 1 has no inverse... and not a latin square
    with pytest.raises(InvalidDatum):
        FiniteGroup([[1, 0], [0, 1]])  # identity not at 0
    # Z/2 x Z/2 by hand
    k4 = FiniteGroup([[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]])
    assert k4.order == 4 and all(k4.element_order(g) == 2 for g in range(1, 4))


def test_rock_paper_scissors_not_a_group():
    # idempotent non-associative magma
    with pytest.raises(InvalidDatum):
        FiniteGroup([[0, 1, 0], [1, 1, 2], [0, 2, 2]])


def test_cyclic_structure():
    g = cyclic(9)
    assert g.order == 9
    assert g.element_order(1) == 9 and g.element_order(3) == 3
    assert g.inv(1) == 8 and g.mul(4, 7) == 2
    assert [len(h) for h in g.subgroups()] == [1, 3, 9]


def test_elementary_abelian_subgroup_count():
    g = elementary_abelian(3, 2)
    assert g.order == 9
    sizes = [len(h) for h in g.subgroups()]
    assert sizes == [1, 3, 3, 3, 3, 9]  # four lines through the origin
    assert all(g.is_normal(h) for h in g.subgroups())


def test_dihedral():
    d4 = dihedral(4)
    assert d4.order == 8
    assert len(d4.subgroups()) == 10
    assert len(d4.normal_subgroups()) == 6
    # non-abelian: some conjugate moves an element
    assert any(
        d4.conj(t, s) != s for t in d4.elements() for s in d4.elements()
    )


def test_closure_and_membership():
    g = cyclic(12)
    assert g.closure({4}) == frozenset({0, 4, 8})
    assert g.is_subgroup({0, 6})
    assert not g.is_subgroup({0, 5, 7})
    assert not g.is_subgroup({1, 2})  # no identity


def test_quotient_and_embedding():
    g = cyclic(9)
    h = frozenset({0, 3, 6})
    q, cosets, to_coset = g.quotient(h)
    assert q.order == 3 and cosets[0] == h
    assert sorted(map(sorted, cosets)) == [[0, 3, 6], [1, 4, 7], [2, 5, 8]]
    assert all(to_coset[g.mul(a, b)] == q.mul(to_coset[a], to_coset[b])
               for a in g.elements() for b in g.elements())
    sub, carrier = g.subgroup_embedding(h)
    assert sub.order == 3 and carrier == (0, 3, 6)
    assert all(carrier[sub.mul(i, j)] == g.mul(carrier[i], carrier[j])
               for i in range(3) for j in range(3))
    with pytest.raises(InvalidDatum):
        g.subgroup_embedding({0, 1, 3})
    with pytest.raises(InvalidDatum):
        dihedral(3).quotient({0, 3})  # a flip subgroup is not normal


def test_direct_product():
    g = direct_product(cyclic(2), cyclic(3))
    assert g.order == 6
    assert sorted(g.element_order(x) for x in g.elements()) == [1, 2, 3, 3, 6, 6]


def test_json():
    assert FiniteGroup.from_json_dict({"cyclic": 9}) == cyclic(9)
    blob = dihedral(3).to_json_dict()
    assert FiniteGroup.from_json_dict(blob) == dihedral(3)
