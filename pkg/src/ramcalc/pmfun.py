"""Piecewise-monomial functions in valuation coordinates.

Radii r in (0, 1] are written v = -log_q r for a fixed unnamed base
q in (0, 1), so r-multiplicative/piecewise-monomial functions become
v-additive/piecewise-linear ones and all arithmetic stays in Q.
Inequalities flip under the change of coordinates: smaller radius means
larger v.

Everything here is exact; floats never appear.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import InvalidDatum

__all__ = [
    "INF",
    "Val",
    "PMFunction",
    "ProfileFunction",
    "as_profile",
    "compose",
    "equals",
    "identity",
    "inverse",
    "parse_rational",
    "format_rational",
    "shift_rescale",
    "slope_at",
    "TOWARD_ZERO",
    "TOWARD_INFINITY",
]

Rat = Union[int, Fraction]

TOWARD_ZERO = "toward_zero"
TOWARD_INFINITY = "toward_infinity"


def parse_rational(s: str) -> Fraction:
    """Parse 'num/den' (or a bare integer string) into a Fraction."""
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational: {s!r}") from exc


def format_rational(x: Rat) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


class Val:
    """An exact extended value: a rational or the absorbing infinity.

    Total order with INF maximal; addition with INF absorbing.  Finite
    values are arbitrary rationals; nonnegativity is a property of the
    particular slot a Val sits in, not of the type.
    """

    __slots__ = ("_v",)

    def __init__(self, value: Union[Rat, str, "Val", None] = 0):
        if isinstance(value, Val):
            self._v = value._v
        elif value is None:
            self._v = None
        elif isinstance(value, str):
            self._v = None if value.strip() == "inf" else parse_rational(value)
        else:
            self._v = Fraction(value)

    @classmethod
    def infinity(cls) -> "Val":
        return cls(None)

    @property
    def is_inf(self) -> bool:
        return self._v is None

    @property
    def finite(self) -> Fraction:
        if self._v is None:
            raise ValueError("value is infinite")
        return self._v

    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._v == other._v

    def __hash__(self):
        return hash(self._v)

    def __lt__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._v is None:
            return False
        if other._v is None:
            return True
        return self._v < other._v

    def __le__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self == other or self < other

    def __gt__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other < self

    def __ge__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other <= self

    def __add__(self, other) -> "Val":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._v is None or other._v is None:
            return INF
        return Val(self._v + other._v)

    __radd__ = __add__

    def __sub__(self, other) -> "Val":
        # finite - INF is undefined; INF - finite stays INF
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other._v is None:
            raise ValueError("cannot subtract infinity")
        if self._v is None:
            return INF
        return Val(self._v - other._v)

    def __mul__(self, other) -> "Val":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self._v is None or other._v is None:
            if self._v == 0 or other._v == 0:
                raise ValueError("0 * inf is undefined")
            return INF
        return Val(self._v * other._v)

    __rmul__ = __mul__

    def __str__(self) -> str:
        return "inf" if self._v is None else format_rational(self._v)

    def __repr__(self) -> str:
        return f"Val({str(self)!r})"


def _coerce(x) -> "Val":
    if isinstance(x, Val):
        return x
    if isinstance(x, (int, Fraction)):
        return Val(x)
    return NotImplemented


INF = Val.infinity()


def _as_fraction(v: Union[Rat, Val]) -> Fraction:
    if isinstance(v, Val):
        return v.finite
    return Fraction(v)


def _canonicalize(intercept: Fraction, breaks: Sequence[Fraction], slopes: Sequence[Fraction]):
    if len(slopes) != len(breaks) + 1:
        raise InvalidDatum("need exactly one more slope than breaks")
    if any(s <= 0 for s in slopes):
        raise InvalidDatum("slopes must be positive")
    if any(b < 0 for b in breaks):
        raise InvalidDatum("breaks must be nonnegative")
    if any(breaks[i] >= breaks[i + 1] for i in range(len(breaks) - 1)):
        raise InvalidDatum("breaks must be strictly increasing")
    breaks = list(breaks)
    slopes = list(slopes)
    # a break at v = 0 bounds an empty segment; drop it with its left slope
    if breaks and breaks[0] == 0:
        del breaks[0]
        del slopes[0]
    # merge runs of equal adjacent slopes
    out_b: list[Fraction] = []
    out_s: list[Fraction] = [slopes[0]]
    for b, s in zip(breaks, slopes[1:]):
        if s == out_s[-1]:
            continue
        out_b.append(b)
        out_s.append(s)
    return intercept, tuple(out_b), tuple(out_s)


@dataclass(frozen=True, eq=False)
class PMFunction:
    """Canonical strictly increasing piecewise-linear function on [0, INF].

    intercept = value at v = 0; breaks strictly increasing and positive;
    slopes positive with adjacent segments distinct (canonical form).
    Maps INF to INF.  Construct via from_data, which canonicalizes.
    """

    intercept: Fraction
    breaks: tuple[Fraction, ...]
    slopes: tuple[Fraction, ...]

    def __post_init__(self):
        ic, bs, ss = _canonicalize(self.intercept, self.breaks, self.slopes)
        if bs != tuple(self.breaks) or ss != tuple(self.slopes):
            raise InvalidDatum("representation is not canonical; use from_data")
        if any(not isinstance(b, Fraction) for b in self.breaks):
            object.__setattr__(self, "breaks", tuple(Fraction(b) for b in self.breaks))
        if any(not isinstance(s, Fraction) for s in self.slopes):
            object.__setattr__(self, "slopes", tuple(Fraction(s) for s in self.slopes))
        if not isinstance(self.intercept, Fraction):
            object.__setattr__(self, "intercept", Fraction(self.intercept))

    @classmethod
    def from_data(cls, intercept: Rat, breaks: Iterable[Rat], slopes: Iterable[Rat]) -> "PMFunction":
        ic, bs, ss = _canonicalize(
            Fraction(intercept),
            [_as_fraction(b) for b in breaks],
            [_as_fraction(s) for s in slopes],
        )
        return cls(ic, bs, ss)

    # -- value semantics on the triple, subclass-insensitive --
    def __eq__(self, other) -> bool:
        if not isinstance(other, PMFunction):
            return NotImplemented
        return (self.intercept, self.breaks, self.slopes) == (
            other.intercept,
            other.breaks,
            other.slopes,
        )

    def __hash__(self):
        return hash((self.intercept, self.breaks, self.slopes))

    def __call__(self, v: Union[Rat, Val]) -> Val:
        if isinstance(v, Val) and v.is_inf:
            return INF
        x = _as_fraction(v)
        if x < 0:
            raise ValueError("domain is [0, INF]")
        acc = self.intercept
        prev = Fraction(0)
        for b, s in zip(self.breaks, self.slopes):
            if x <= b:
                return Val(acc + s * (x - prev))
            acc += s * (b - prev)
            prev = b
        return Val(acc + self.slopes[-1] * (x - prev))

    @property
    def is_concave(self) -> bool:
        return all(self.slopes[i] >= self.slopes[i + 1] for i in range(len(self.slopes) - 1))

    @property
    def is_integral(self) -> bool:
        return all(s.denominator == 1 for s in self.slopes)

    def to_json_dict(self) -> dict:
        return {
            "intercept": format_rational(self.intercept),
            "breaks": [format_rational(b) for b in self.breaks],
            "slopes": [format_rational(s) for s in self.slopes],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "PMFunction":
        return cls.from_data(
            parse_rational(d.get("intercept", "0/1")),
            [parse_rational(b) for b in d["breaks"]],
            [parse_rational(s) for s in d["slopes"]],
        )

    def __repr__(self):
        return (
            f"{type(self).__name__}({self.intercept!s}, "
            f"[{', '.join(map(str, self.breaks))}], "
            f"[{', '.join(map(str, self.slopes))}])"
        )


class ProfileFunction(PMFunction):
    """PMFunction fixing 0 (intercept zero): the profile of a disc morphism."""

    def __post_init__(self):
        super().__post_init__()
        if self.intercept != 0:
            raise InvalidDatum("profile functions have intercept 0")

    @classmethod
    def from_data(cls, breaks: Iterable[Rat], slopes: Iterable[Rat]) -> "ProfileFunction":  # type: ignore[override]
        ic, bs, ss = _canonicalize(
            Fraction(0),
            [_as_fraction(b) for b in breaks],
            [_as_fraction(s) for s in slopes],
        )
        return cls(ic, bs, ss)

    @classmethod
    def from_json_dict(cls, d: dict) -> "ProfileFunction":
        f = PMFunction.from_json_dict(d)
        return as_profile(f)


def identity() -> ProfileFunction:
    return ProfileFunction.from_data((), (1,))


def as_profile(f: PMFunction) -> ProfileFunction:
    if f.intercept != 0:
        raise InvalidDatum("nonzero intercept")
    return ProfileFunction(f.intercept, f.breaks, f.slopes)


def equals(f: PMFunction, g: PMFunction) -> bool:
    """Pointwise equality; canonical forms make it structural."""
    return f == g


def _slope_index_right(f: PMFunction, x: Fraction) -> int:
    # index of the segment on [x, x + eps)
    return bisect.bisect_right(f.breaks, x)


def slope_at(f: PMFunction, v: Union[Rat, Val], side: str = TOWARD_INFINITY) -> Fraction:
    """One-sided slope of f at finite v >= 0.

    TOWARD_INFINITY gives the slope on [v, v+eps); TOWARD_ZERO the slope on
    (v-eps, v], rejected at v = 0 where no such segment exists.
    """
    x = _as_fraction(v)
    if x < 0:
        raise ValueError("domain is [0, INF]")
    if side == TOWARD_INFINITY:
        return f.slopes[_slope_index_right(f, x)]
    if side == TOWARD_ZERO:
        if x == 0:
            raise ValueError("no segment on the zero side of v = 0")
        return f.slopes[bisect.bisect_left(f.breaks, x)]
    raise ValueError(f"unknown side {side!r}")


def _preimage(f: PMFunction, w: Fraction) -> Fraction:
    # unique x >= 0 with f(x) = w; requires w >= f(0)
    if w < f.intercept:
        raise ValueError("below the range of f")
    acc = f.intercept
    prev = Fraction(0)
    for b, s in zip(f.breaks, f.slopes):
        nxt = acc + s * (b - prev)
        if w <= nxt:
            return prev + (w - acc) / s
        acc, prev = nxt, b
    return prev + (w - acc) / f.slopes[-1]


def compose(outer: PMFunction, inner: PMFunction) -> PMFunction:
    """outer after inner, exact: (compose(f, g))(v) = f(g(v))."""
    start = inner(0).finite
    cuts = set(inner.breaks)
    for b in outer.breaks:
        if b > start:
            cuts.add(_preimage(inner, b))
    breaks = sorted(cuts)
    slopes = []
    prev = Fraction(0)
    for i in range(len(breaks) + 1):
        # sample strictly inside the segment, so one-sided slopes agree
        sample = (prev + breaks[i]) / 2 if i < len(breaks) else prev + 1
        s_in = slope_at(inner, sample, TOWARD_INFINITY)
        s_out = slope_at(outer, inner(sample).finite, TOWARD_INFINITY)
        slopes.append(s_in * s_out)
        if i < len(breaks):
            prev = breaks[i]
    return PMFunction.from_data(outer(start).finite, breaks, slopes)


def inverse(f: PMFunction) -> PMFunction:
    """Inverse of a profile (intercept 0); swaps breaks with their images,
    reciprocates slopes.  Convex when f is concave."""
    if f.intercept != 0:
        raise InvalidDatum("only intercept-0 functions invert within the domain")
    new_breaks = [f(b).finite for b in f.breaks]
    new_slopes = [1 / s for s in f.slopes]
    return PMFunction.from_data(0, new_breaks, new_slopes)


def shift_rescale(f: ProfileFunction, depth: Union[Rat, Val]) -> ProfileFunction:
    """Profile seen from the point at finite depth >= 0 down the tail:
    g(v) = f(v + depth) - f(depth)."""
    d = _as_fraction(depth)
    if d < 0:
        raise ValueError("depth must be nonnegative")
    if f.intercept != 0:
        raise InvalidDatum("shift_rescale applies to profiles")
    keep = bisect.bisect_right(f.breaks, d)
    breaks = [b - d for b in f.breaks[keep:]]
    slopes = list(f.slopes[keep:])
    return ProfileFunction.from_data(breaks, slopes)
