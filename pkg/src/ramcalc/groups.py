"""Finite groups as Cayley tables on 0..n-1 with identity 0.

Just enough structure theory for ramification filtrations: validation,
subgroup closure and enumeration, normality, quotients and subgroup
embeddings with explicit index maps.  Orders stay small (desk scale),
so everything is plain exhaustive computation.
"""
from __future__ import annotations

from functools import lru_cache

from .errors import InvalidDatum

__all__ = ["FiniteGroup", "cyclic", "direct_product", "dihedral", "elementary_abelian"]


class FiniteGroup:
    def __init__(self, table):
        table = tuple(tuple(row) for row in table)
        n = len(table)
        if n == 0:
            raise InvalidDatum("empty Cayley table")
        for row in table:
            if len(row) != n or any(not isinstance(x, int) or not 0 <= x < n for x in row):
                raise InvalidDatum("Cayley table must be square over indices 0..n-1")
        for i in range(n):
            if table[0][i] != i or table[i][0] != i:
                raise InvalidDatum("index 0 must be the identity")
        for i in range(n):
            if 0 not in table[i]:
                raise InvalidDatum(f"element {i} has no inverse")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if table[table[a][b]][c] != table[a][table[b][c]]:
                        raise InvalidDatum("associativity fails")
        self.table = table
        self.order = n
        self._inv = tuple(row.index(0) for row in table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self._inv[a]

    def conj(self, t: int, s: int) -> int:
        """t s t^-1"""
        return self.mul(self.mul(t, s), self.inv(t))

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.mul(x, a)
            k += 1
        return k

    def elements(self):
        return range(self.order)

    # -- subgroup machinery --

    def closure(self, gens) -> frozenset[int]:
        seen = {0, *gens}
        frontier = list(seen)
        while frontier:
            a = frontier.pop()
            for b in list(seen):
                for c in (self.mul(a, b), self.mul(b, a)):
                    if c not in seen:
                        seen.add(c)
                        frontier.append(c)
        return frozenset(seen)

    def is_subgroup(self, elems) -> bool:
        s = set(elems)
        if 0 not in s:
            return False
        return all(self.mul(a, b) in s for a in s for b in s)

    def is_normal(self, elems) -> bool:
        s = set(elems)
        return self.is_subgroup(s) and all(
            self.conj(t, a) in s for t in self.elements() for a in s
        )

    def subgroups(self) -> list[frozenset[int]]:
        """All subgroups, by closure saturation; sorted for determinism."""
        found = {frozenset([0])}
        frontier = [frozenset([0])]
        while frontier:
            h = frontier.pop()
            for g in self.elements():
                if g in h:
                    continue
                bigger = self.closure(h | {g})
                if bigger not in found:
                    found.add(bigger)
                    frontier.append(bigger)
        return sorted(found, key=lambda s: (len(s), sorted(s)))

    def normal_subgroups(self) -> list[frozenset[int]]:
        return [h for h in self.subgroups() if self.is_normal(h)]

    def subgroup_embedding(self, elems) -> tuple["FiniteGroup", tuple[int, ...]]:
        """The subgroup on elems as its own group; returns (H, carrier) where
        carrier[i] is the ambient index of H's element i (carrier[0] = 0)."""
        if not self.is_subgroup(elems):
            raise InvalidDatum("not a subgroup")
        carrier = tuple(sorted(elems))  # identity 0 sorts first
        pos = {g: i for i, g in enumerate(carrier)}
        table = [[pos[self.mul(a, b)] for b in carrier] for a in carrier]
        return FiniteGroup(table), carrier

    def quotient(self, elems) -> tuple["FiniteGroup", tuple[frozenset[int], ...], tuple[int, ...]]:
        """Quotient by a normal subgroup; returns (Q, cosets, to_coset) where
        cosets[0] is the identity coset and to_coset maps ambient indices to
        coset indices."""
        if not self.is_normal(elems):
            raise InvalidDatum("subgroup is not normal")
        h = frozenset(elems)
        cosets: list[frozenset[int]] = [h]
        to_coset = {g: 0 for g in h}
        for g in self.elements():
            if g in to_coset:
                continue
            coset = frozenset(self.mul(g, x) for x in h)
            idx = len(cosets)
            cosets.append(coset)
            for x in coset:
                to_coset[x] = idx
        reps = [min(c) for c in cosets]
        table = [
            [to_coset[self.mul(ra, rb)] for rb in reps]
            for ra in reps
        ]
        return FiniteGroup(table), tuple(cosets), tuple(to_coset[g] for g in self.elements())

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self.table == other.table

    def __hash__(self):
        return hash(self.table)

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"

    def to_json_dict(self) -> dict:
        return {"order": self.order, "table": [list(r) for r in self.table]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "FiniteGroup":
        if "cyclic" in data:
            return cyclic(int(data["cyclic"]))
        return cls(data["table"])


@lru_cache(maxsize=None)
def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise InvalidDatum("order must be positive")
    return FiniteGroup([[(i + j) % n for j in range(n)] for i in range(n)])


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    pairs = [(a, b) for a in g.elements() for b in h.elements()]
    pos = {ab: i for i, ab in enumerate(pairs)}
    table = [
        [pos[(g.mul(a1, a2), h.mul(b1, b2))] for (a2, b2) in pairs]
        for (a1, b1) in pairs
    ]
    return FiniteGroup(table)


def elementary_abelian(p: int, k: int) -> FiniteGroup:
    out = cyclic(p)
    for _ in range(k - 1):
        out = direct_product(out, cyclic(p))
    return out


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n: elements (i, s) = rotation i, flip s."""
    pairs = [(i, s) for s in (0, 1) for i in range(n)]
    pos = {e: i for i, e in enumerate(pairs)}

    def mul(x, y):
        i, s = x
        j, t = y
        return ((i + j) % n, t) if s == 0 else ((i - j) % n, 1 - t)

    table = [[pos[mul(x, y)] for y in pairs] for x in pairs]
    return FiniteGroup(table)
