"""Higher-ramification calculus from inertia data.

An InertiaDatum assigns each non-identity group element the valuation
iv(sigma) of its maximal displacement (identity: INF, implicit).  From it:
the filtration by level sets, Herbrand's function by two independent
routes (interval slopes from the filtration; the displacement-product
formula evaluated pointwise), the different, quotient and subgroup
functoriality, and the tower calculus for split towers.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Mapping, Optional, Sequence, Union

from .errors import InvalidDatum, InvariantViolation
from .groups import FiniteGroup
from .hahn import _is_prime
from .pmfun import (
    PMFunction,
    ProfileFunction,
    TOWARD_INFINITY,
    Val,
    as_profile,
    compose,
    format_rational,
    identity,
    inverse,
    parse_rational,
    slope_at,
)

__all__ = [
    "Filtration",
    "InertiaDatum",
    "TowerStep",
    "TransitivityCheck",
    "TransitivityReport",
    "check_herbrand_transitivity",
    "datum_from_chain",
    "different",
    "filtration",
    "herbrand_product",
    "herbrand_slopes",
    "j_function",
    "quotient_inertia",
    "restrict_inertia",
    "step_profile",
    "tower_profile",
    "upper_group",
]

Rat = Union[int, Fraction]


class InertiaDatum:
    """iv on the non-identity elements; validated on construction:
    conjugation-invariant, inversion-invariant, ultrametric."""

    def __init__(self, group: FiniteGroup, iv: Mapping[int, Union[Rat, Val, str]]):
        self.group = group
        vals: dict[int, Fraction] = {}
        expected = set(range(1, group.order))
        if set(iv.keys()) != expected:
            raise InvalidDatum("iv must cover exactly the non-identity elements")
        for g, raw in iv.items():
            v = Val(raw) if not isinstance(raw, Val) else raw
            if v.is_inf:
                raise InvalidDatum(f"iv({g}) must be finite")
            x = v.finite
            if x < 0:
                raise InvalidDatum(f"iv({g}) must be nonnegative")
            vals[g] = x
        self.iv = vals
        self._validate()

    def _validate(self):
        g = self.group
        for s in range(1, g.order):
            if self.iv[g.inv(s)] != self.iv[s]:
                raise InvalidDatum(f"inversion-invariance fails at element {s}")
            for t in range(1, g.order):
                c = g.conj(t, s)
                if c != 0 and self.iv[c] != self.iv[s]:
                    raise InvalidDatum(
                        f"conjugation-invariance fails at elements ({t}, {s})"
                    )
        for s in range(1, g.order):
            for t in range(1, g.order):
                st = g.mul(s, t)
                if st == 0:
                    continue
                if self.iv[st] < min(self.iv[s], self.iv[t]):
                    raise InvalidDatum(f"ultrametric fails at elements ({s}, {t})")

    def level_set(self, v: Fraction) -> frozenset[int]:
        """G_v = non-identity elements with iv >= v, plus the identity."""
        return frozenset({0, *(g for g, x in self.iv.items() if x >= v)})

    def __eq__(self, other):
        return (
            isinstance(other, InertiaDatum)
            and self.group == other.group
            and self.iv == other.iv
        )

    def __hash__(self):
        return hash((self.group, tuple(sorted(self.iv.items()))))

    def __repr__(self):
        return f"InertiaDatum(order={self.group.order}, jumps={sorted(set(self.iv.values()))})"

    def to_json_dict(self) -> dict:
        return {"iv": {str(g): format_rational(x) for g, x in sorted(self.iv.items())}}

    @classmethod
    def from_json_dict(cls, group: FiniteGroup, data: dict) -> "InertiaDatum":
        raw = data["iv"]
        return cls(group, {int(k): parse_rational(v) for k, v in raw.items()})


def datum_from_chain(
    group: FiniteGroup,
    chain: Sequence[frozenset[int]],
    values: Sequence[Rat],
) -> InertiaDatum:
    """Build the datum that is constant on the layers of a descending chain
    of normal subgroups group = K_0 > K_1 > ... > K_m = {e}, taking the
    value values[j] on K_j minus K_{j+1}.  This is the general shape of a
    valid datum (the chain recovers the filtration) and the only generator
    the tests need."""
    if len(values) != len(chain) - 1:
        raise InvalidDatum("need one value per proper layer")
    if set(chain[0]) != set(group.elements()) or set(chain[-1]) != {0}:
        raise InvalidDatum("chain must descend from the full group to the identity")
    vals = [Fraction(v) for v in values]
    if any(a >= b for a, b in zip(vals, vals[1:])):
        raise InvalidDatum("values must be strictly increasing")
    iv: dict[int, Fraction] = {}
    for j in range(len(chain) - 1):
        upper, lower = set(chain[j]), set(chain[j + 1])
        if not lower < upper:
            raise InvalidDatum("chain must be strictly descending")
        if not group.is_normal(upper):
            raise InvalidDatum("chain subgroups must be normal")
        for g in upper - lower:
            iv[g] = vals[j]
    return InertiaDatum(group, iv)


@dataclass(frozen=True)
class Filtration:
    """Jumps v_0 < ... < v_n with their level groups; orders carries the
    terminal 1 for the trivial group beyond the last jump."""

    jumps: tuple[Fraction, ...]
    groups: tuple[frozenset[int], ...]

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(len(g) for g in self.groups) + (1,)


def filtration(d: InertiaDatum) -> Filtration:
    jumps = tuple(sorted(set(d.iv.values())))
    groups = []
    for v in jumps:
        level = d.level_set(v)
        if not d.group.is_subgroup(level):
            raise InvalidDatum(f"level set at v={v} is not a subgroup")
        groups.append(level)
    return Filtration(jumps, tuple(groups))


def herbrand_slopes(d: InertiaDatum) -> ProfileFunction:
    """Slope |G_{v_i}| on the interval ending at jump v_i, slope 1 beyond."""
    f = filtration(d)
    return ProfileFunction.from_data(f.jumps, [Fraction(n) for n in f.orders])


def herbrand_product(d: InertiaDatum) -> ProfileFunction:
    """The displacement-product route: V(v) = v + sum over non-identity
    sigma of min(iv(sigma), v), reconstructed exactly from pointwise values.
    Independent of filtration/herbrand_slopes by construction."""
    ivs = list(d.iv.values())

    def total(x: Fraction) -> Fraction:
        return x + sum(min(w, x) for w in ivs)

    cuts = sorted({w for w in ivs if w > 0})
    slopes = []
    prev = Fraction(0)
    for c in cuts:
        slopes.append((total(c) - total(prev)) / (c - prev))
        prev = c
    slopes.append(total(prev + 1) - total(prev))
    return ProfileFunction.from_data(cuts, slopes)


def different(d: InertiaDatum) -> Val:
    """v(delta): the displacement sum, cross-checked against the jump/order
    sum and against the linear part of Herbrand's function."""
    by_elements = sum(d.iv.values(), Fraction(0))
    f = filtration(d)
    orders = f.orders
    by_jumps = sum(
        (orders[i] - orders[i + 1]) * v for i, v in enumerate(f.jumps)
    )
    if by_elements != by_jumps:
        raise InvariantViolation(
            f"different mismatch: sum iv = {by_elements}, jump sum = {by_jumps}"
        )
    phi = herbrand_slopes(d)
    probe = (f.jumps[-1] if f.jumps else Fraction(0)) + 1
    if phi(probe) != Val(probe + by_elements) or slope_at(phi, probe, TOWARD_INFINITY) != 1:
        raise InvariantViolation("Herbrand linear part disagrees with the different")
    return Val(by_elements)


def quotient_inertia(d: InertiaDatum, subgroup) -> InertiaDatum:
    """Datum on G/H, iv of a coset = sum of iv over the coset (the
    displacement-product identity for the subfield)."""
    q, cosets, _ = d.group.quotient(subgroup)
    iv = {}
    for idx in range(1, q.order):
        iv[idx] = sum((d.iv[t] for t in cosets[idx]), Fraction(0))
    return InertiaDatum(q, iv)


def restrict_inertia(d: InertiaDatum, subgroup) -> InertiaDatum:
    """Datum on H with iv restricted along the embedding."""
    h, carrier = d.group.subgroup_embedding(subgroup)
    iv = {i: d.iv[carrier[i]] for i in range(1, h.order)}
    return InertiaDatum(h, iv)


def j_function(d: InertiaDatum, subgroup, sigma: int) -> Val:
    """Max of iv over the coset sigma*H; hard-checks the key identity
    quotient_iv(coset) = phi_{L/F}(j)."""
    if not d.group.is_normal(subgroup):
        raise InvalidDatum("subgroup is not normal")
    h = frozenset(subgroup)
    if sigma in h:
        raise ValueError("identity coset has no j-value")
    coset = frozenset(d.group.mul(sigma, x) for x in h)
    j = max(d.iv[t] for t in coset)
    phi_sub = herbrand_slopes(restrict_inertia(d, h))
    coset_sum = sum((d.iv[t] for t in coset), Fraction(0))
    if phi_sub(j) != Val(coset_sum):
        raise InvariantViolation(
            f"key identity fails: phi_sub({j}) != {coset_sum}"
        )
    return Val(j)


def upper_group(d: InertiaDatum, s: Union[Rat, Val]) -> frozenset[int]:
    """Upper-numbering group G^s = G_{psi(s)} with psi the inverse of
    Herbrand's function."""
    psi = inverse(herbrand_slopes(d))
    return d.level_set(psi(s).finite)


@dataclass(frozen=True)
class TransitivityCheck:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class TransitivityReport:
    checks: tuple[TransitivityCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def check_herbrand_transitivity(d: InertiaDatum, subgroup) -> TransitivityReport:
    """Composition law phi_{L/K} = phi_{F/K} o phi_{L/F}, plus the quotient
    upper-numbering identity at every jump."""
    h = frozenset(subgroup)
    quot = quotient_inertia(d, h)
    sub = restrict_inertia(d, h)
    phi_full = herbrand_slopes(d)
    phi_quot = herbrand_slopes(quot)
    phi_sub = herbrand_slopes(sub)
    composed = compose(phi_quot, phi_sub)
    checks = [
        TransitivityCheck(
            "compose",
            phi_full == composed,
            f"full={phi_full.to_json_dict()} composed={composed.to_json_dict()}",
        )
    ]
    _, _, to_coset = d.group.quotient(h)
    for v in filtration(d).jumps:
        s = phi_full(v)
        image = frozenset(to_coset[g] for g in d.level_set(v))
        upper = upper_group(quot, s)
        checks.append(
            TransitivityCheck(
                f"upper@{v}",
                image == upper,
                f"s={s} image={sorted(image)} upper={sorted(upper)}",
            )
        )
    return TransitivityReport(tuple(checks))


# ------------------------------------------------------------------ towers


@dataclass(frozen=True)
class TowerStep:
    """One extension layer: tame of some degree, purely inseparable of
    degree p, or wildly ramified separable of degree p with a given
    different valuation."""

    kind: str  # "tame" | "insep_p" | "sep_p"
    degree: Optional[int] = None
    different_v: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind == "tame":
            if not isinstance(self.degree, int) or self.degree < 1:
                raise InvalidDatum("tame step needs a positive degree")
            if self.different_v is not None:
                raise InvalidDatum("tame step carries no different")
        elif self.kind == "insep_p":
            if self.degree is not None or self.different_v is not None:
                raise InvalidDatum("insep_p step carries no parameters")
        elif self.kind == "sep_p":
            if self.degree is not None:
                raise InvalidDatum("sep_p degree is p, not a parameter")
            if not isinstance(self.different_v, Fraction) or self.different_v < 0:
                raise InvalidDatum("sep_p step needs a finite different >= 0")
        else:
            raise InvalidDatum(f"unknown step kind {self.kind!r}")

    @classmethod
    def tame(cls, degree: int) -> "TowerStep":
        return cls("tame", degree=degree)

    @classmethod
    def insep(cls) -> "TowerStep":
        return cls("insep_p")

    @classmethod
    def sep(cls, different_v: Rat) -> "TowerStep":
        return cls("sep_p", different_v=Fraction(different_v))

    def to_json_dict(self) -> dict:
        if self.kind == "tame":
            return {"kind": "tame", "degree": self.degree}
        if self.kind == "insep_p":
            return {"kind": "insep_p"}
        return {"kind": "sep_p", "different": format_rational(self.different_v)}

    @classmethod
    def from_json_dict(cls, data: dict) -> "TowerStep":
        kind = data.get("kind")
        if kind == "tame":
            return cls.tame(int(data["degree"]))
        if kind == "insep_p":
            return cls.insep()
        if kind == "sep_p":
            return cls.sep(parse_rational(str(data["different"])))
        raise InvalidDatum(f"unknown step kind {kind!r}")


def step_profile(step: TowerStep, p: int) -> ProfileFunction:
    if step.kind == "tame":
        if gcd(step.degree, p) != 1:
            raise InvalidDatum(f"tame degree {step.degree} not coprime to p={p}")
        return identity()
    if step.kind == "insep_p":
        return ProfileFunction.from_data((), (Fraction(p),))
    d = step.different_v
    if d == 0:
        return identity()
    return ProfileFunction.from_data((d / (p - 1),), (Fraction(p), Fraction(1)))


def tower_profile(steps: Sequence[TowerStep], p: int) -> ProfileFunction:
    """Fold the composition law phi_{L/K} = phi_{F/K} o phi_{L/F} over the
    steps; steps[0] sits nearest the base field and becomes outermost."""
    if not _is_prime(p):
        raise InvalidDatum(f"p must be a prime >= 2, got {p!r}")
    acc: PMFunction = identity()
    for step in steps:
        acc = compose(acc, step_profile(step, p))
    return as_profile(acc)
