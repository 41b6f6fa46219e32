"""Coefficient arithmetic: finite sums sum_k a_k * eps^{e_k} with a_k in F_p
and rational exponents e_k, ordered by exponent.

This is the smallest coefficient domain on which translation of a series
t -> t + a can be carried out exactly: closed under +, *, integer powers,
with valuation val = least exponent.  Exponents may be any rationals;
the callers that need nonnegativity (series coefficients) enforce it.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from .errors import InvalidDatum
from .pmfun import INF, Val, format_rational, parse_rational

__all__ = ["PrimeContext", "Coeff", "binom_mod_p"]

Rat = Union[int, Fraction]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PrimeContext:
    """The residue characteristic; fixed per session."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not _is_prime(self.p):
            raise InvalidDatum(f"p must be a prime >= 2, got {self.p!r}")


def binom_mod_p(p: int, n: int, j: int) -> int:
    """Binomial coefficient C(n, j) mod p by base-p digit reduction."""
    if not _is_prime(p):
        raise InvalidDatum(f"p must be a prime >= 2, got {p!r}")
    if not (0 <= j <= n):
        raise ValueError("need 0 <= j <= n")
    out = 1
    while n or j:
        nd, n = n % p, n // p
        jd, j = j % p, j // p
        if jd > nd:
            return 0
        num = den = 1
        for t in range(jd):
            num = num * (nd - t) % p
            den = den * (t + 1) % p
        out = out * num * pow(den, p - 2, p) % p
    return out


@dataclass(frozen=True)
class Coeff:
    """Element of the coefficient domain, kept in normal form:
    exponents strictly increasing, coefficients in 1..p-1."""

    ctx: PrimeContext
    terms: tuple[tuple[Fraction, int], ...]

    def __post_init__(self):
        p = self.ctx.p
        seen = None
        for e, a in self.terms:
            if not isinstance(e, Fraction):
                raise InvalidDatum("exponents must be Fractions")
            if not isinstance(a, int) or not (1 <= a <= p - 1):
                raise InvalidDatum("coefficients must be reduced into 1..p-1")
            if seen is not None and e <= seen:
                raise InvalidDatum("exponents must be strictly increasing")
            seen = e

    @classmethod
    def make(cls, ctx: PrimeContext, terms: Iterable[tuple[Rat, int]]) -> "Coeff":
        acc: dict[Fraction, int] = {}
        for e, a in terms:
            e = Fraction(e)
            acc[e] = (acc.get(e, 0) + a) % ctx.p
        cleaned = tuple(sorted((e, a) for e, a in acc.items() if a))
        return cls(ctx, cleaned)

    @classmethod
    def zero(cls, ctx: PrimeContext) -> "Coeff":
        return cls(ctx, ())

    @classmethod
    def one(cls, ctx: PrimeContext) -> "Coeff":
        return cls(ctx, ((Fraction(0), 1),))

    @classmethod
    def monomial(cls, ctx: PrimeContext, exp: Rat, a: int = 1) -> "Coeff":
        return cls.make(ctx, [(exp, a)])

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def val(self) -> Val:
        """Least exponent; INF for the zero element."""
        return INF if not self.terms else Val(self.terms[0][0])

    def _require_same_ctx(self, other: "Coeff"):
        if not isinstance(other, Coeff):
            raise TypeError("expected a Coeff")
        if other.ctx != self.ctx:
            raise ValueError("mixed prime contexts")

    def __add__(self, other: "Coeff") -> "Coeff":
        self._require_same_ctx(other)
        return Coeff.make(self.ctx, list(self.terms) + list(other.terms))

    def __neg__(self) -> "Coeff":
        p = self.ctx.p
        return Coeff(self.ctx, tuple((e, p - a) for e, a in self.terms))

    def __sub__(self, other: "Coeff") -> "Coeff":
        self._require_same_ctx(other)
        return self + (-other)

    def __mul__(self, other: "Coeff") -> "Coeff":
        self._require_same_ctx(other)
        acc: dict[Fraction, int] = {}
        for e1, a1 in self.terms:
            for e2, a2 in other.terms:
                e = e1 + e2
                acc[e] = (acc.get(e, 0) + a1 * a2) % self.ctx.p
        return Coeff(self.ctx, tuple(sorted((e, a) for e, a in acc.items() if a)))

    def scale(self, a: int) -> "Coeff":
        """Multiply by the residue a (an F_p scalar)."""
        a %= self.ctx.p
        if a == 0:
            return Coeff.zero(self.ctx)
        return Coeff.make(self.ctx, [(e, c * a) for e, c in self.terms])

    def __pow__(self, n: int) -> "Coeff":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = Coeff.one(self.ctx)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def to_json_list(self) -> list:
        return [{"e": format_rational(e), "a": a} for e, a in self.terms]

    @classmethod
    def from_json_list(cls, ctx: PrimeContext, data: list) -> "Coeff":
        terms = []
        for item in data:
            terms.append((parse_rational(item["e"]), int(item["a"])))
        return cls.make(ctx, terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(
            f"{a}*eps^{format_rational(e)}" if a != 1 or e == 0 else f"eps^{format_rational(e)}"
            for e, a in self.terms
        )
