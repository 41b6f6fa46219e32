"""Finite disc morphisms given by sparse series: multiplicity, profile via
the lower envelope of val-lines, translation probes, radiality verdicts.

A series sum c_i t^i (no constant term, max|c_i| = 1) acts on points of the
open unit disc; at scale v the term of degree i contributes the affine form
i*v + val(c_i), and the profile of the morphism is the lower envelope of
those forms with the MAXIMAL degree attaining the minimum declared dominant.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import InvalidDatum, InvariantViolation, ParseError
from .hahn import Coeff, PrimeContext, binom_mod_p
from .pmfun import INF, ProfileFunction, Val, format_rational

__all__ = [
    "DiscSeries",
    "DominantInterval",
    "EnvelopeReport",
    "RadialityVerdict",
    "etale_check",
    "multiplicity_at",
    "newton_profile",
    "p_power_criterion",
    "radiality_probe",
    "threshold_above",
    "translate",
]


@dataclass(frozen=True)
class DiscSeries:
    """Sparse series sum c_i t^i, i >= 1, coefficients nonzero with
    nonnegative valuation and min val(c_i) = 0."""

    ctx: PrimeContext
    terms: tuple[tuple[int, Coeff], ...]  # sorted by degree

    def __post_init__(self):
        if not self.terms:
            raise InvalidDatum("empty series")
        seen = 0
        best = INF
        for deg, c in self.terms:
            if not isinstance(deg, int) or deg < 1:
                raise InvalidDatum(f"degrees must be positive integers, got {deg!r}")
            if deg <= seen:
                raise InvalidDatum("degrees must be strictly increasing")
            seen = deg
            if not isinstance(c, Coeff) or c.ctx != self.ctx:
                raise InvalidDatum("coefficient context mismatch")
            if c.is_zero:
                raise InvalidDatum(f"zero coefficient at degree {deg}")
            v = c.val()
            if v < 0:
                raise InvalidDatum(f"coefficient at degree {deg} has negative valuation")
            best = min(best, v)
        if best != Val(0):
            raise InvalidDatum("series is not normalized: min val(c_i) must be 0")

    @classmethod
    def make(cls, ctx: PrimeContext, terms) -> "DiscSeries":
        """terms: iterable of (degree, Coeff) or mapping degree -> Coeff."""
        items = terms.items() if hasattr(terms, "items") else terms
        cleaned = [(int(d), c) for d, c in items if not c.is_zero]
        return cls(ctx, tuple(sorted(cleaned)))

    @property
    def degree(self) -> int:
        """Minimal degree whose coefficient is a unit (val 0)."""
        for deg, c in self.terms:
            if c.val() == Val(0):
                return deg
        raise InvariantViolation("normalized series must have a unit coefficient")

    def coeff(self, deg: int) -> Coeff:
        for d, c in self.terms:
            if d == deg:
                return c
        return Coeff.zero(self.ctx)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(d for d, _ in self.terms)

    def to_json_dict(self) -> dict:
        return {
            "p": self.ctx.p,
            "terms": [{"deg": d, "coeff": c.to_json_list()} for d, c in self.terms],
        }

    @classmethod
    def from_json_dict(cls, data: dict, fallback_p: Optional[int] = None) -> "DiscSeries":
        p = data.get("p", fallback_p)
        if p is None:
            raise ParseError("no prime given: set \"p\" in the file or RAMCALC_PRIME")
        ctx = PrimeContext(int(p))
        terms = []
        for item in data["terms"]:
            terms.append((int(item["deg"]), Coeff.from_json_list(ctx, item["coeff"])))
        return cls.make(ctx, terms)


@dataclass(frozen=True)
class DominantInterval:
    lo: Val
    hi: Val  # INF on the last interval
    degree: int

    def to_json_dict(self) -> dict:
        return {"from": str(self.lo), "to": str(self.hi), "degree": self.degree}


@dataclass(frozen=True)
class EnvelopeReport:
    profile: ProfileFunction
    dominant: tuple[DominantInterval, ...]

    def to_json_dict(self) -> dict:
        return {
            "profile": self.profile.to_json_dict(),
            "dominant": [d.to_json_dict() for d in self.dominant],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "EnvelopeReport":
        prof = ProfileFunction.from_json_dict(data["profile"])
        dom = tuple(
            DominantInterval(Val(d["from"]), Val(d["to"]), int(d["degree"]))
            for d in data["dominant"]
        )
        return cls(prof, dom)


def _val_lines(s: DiscSeries) -> list[tuple[int, Fraction]]:
    return [(deg, c.val().finite) for deg, c in s.terms]


def _lower_envelope(lines: list[tuple[int, Fraction]]) -> list[tuple[Fraction, int, Fraction]]:
    """Pieces (start_v, degree, val) of min_i(i*v + val_i) on [0, INF),
    starts strictly increasing from 0, degrees strictly decreasing."""
    order = sorted(lines, key=lambda t: -t[0])
    stack: list[tuple[int, Fraction]] = []
    starts: list[Optional[Fraction]] = []  # None marks -infinity
    for m2, b2 in order:
        x: Optional[Fraction] = None
        while stack:
            m1, b1 = stack[-1]
            x = (b2 - b1) / Fraction(m1 - m2)
            if starts[-1] is not None and x <= starts[-1]:
                stack.pop()
                starts.pop()
            else:
                break
        stack.append((m2, b2))
        starts.append(x if stack[:-1] else None)
    pieces = []
    for i, (line, start) in enumerate(zip(stack, starts)):
        end = starts[i + 1] if i + 1 < len(starts) else None
        if end is not None and end <= 0:
            continue
        lo = start if (start is not None and start > 0) else Fraction(0)
        pieces.append((lo, line[0], line[1]))
    return pieces


def newton_profile(s: DiscSeries) -> EnvelopeReport:
    """Exact lower envelope of the val-lines of S, as profile + dominant
    degrees.  The dominant degree at a break is the larger one (tie-break
    toward the maximal degree attaining the minimum)."""
    pieces = _lower_envelope(_val_lines(s))
    breaks = [lo for lo, _, _ in pieces[1:]]
    slopes = [Fraction(deg) for _, deg, _ in pieces]
    # envelope value at v=0 is the first piece's val part (its start is 0)
    if pieces[0][2] != 0:
        raise InvariantViolation("envelope at v=0 must be 0 for a normalized series")
    profile = ProfileFunction.from_data(breaks, slopes)
    bounds = [Val(b) for b in breaks] + [INF]
    dominant = []
    lo = Val(0)
    for (piece, hi) in zip(pieces, bounds):
        dominant.append(DominantInterval(lo, hi, piece[1]))
        lo = hi
    return EnvelopeReport(profile, tuple(dominant))


def multiplicity_at(s: DiscSeries, v: Union[Val, int, Fraction]) -> int:
    """Max degree attaining min_i(i*v + val(c_i)); at INF, the minimal
    degree present (multiplicity at the rigid center)."""
    if isinstance(v, Val) and v.is_inf:
        return s.terms[0][0]
    x = v.finite if isinstance(v, Val) else Fraction(v)
    if x < 0:
        raise ValueError("domain is [0, INF]")
    lines = _val_lines(s)
    target = min(deg * x + val for deg, val in lines)
    return max(deg for deg, val in lines if deg * x + val == target)


def translate(s: DiscSeries, a: Coeff) -> DiscSeries:
    """Series of t -> f(t + a) - f(a) around the probe center a,
    val(a) > 0.  Exact binomial expansion with mod-p binomials; the
    normalization survives because the top coefficient is untouched."""
    v = a.val()
    if a.is_zero or v.is_inf or v <= 0:
        raise ValueError("probe must have finite positive valuation")
    if a.ctx != s.ctx:
        raise ValueError("mixed prime contexts")
    p = s.ctx.p
    top = max(d for d, _ in s.terms)
    new_terms: list[tuple[int, Coeff]] = []
    min_val = INF
    for j in range(1, top + 1):
        acc = Coeff.zero(s.ctx)
        for i, c in s.terms:
            if i < j:
                continue
            b = binom_mod_p(p, i, j)
            if b == 0:
                continue
            acc = acc + c.scale(b) * a ** (i - j)
        if not acc.is_zero:
            new_terms.append((j, acc))
            min_val = min(min_val, acc.val())
    if min_val != Val(0):
        raise InvariantViolation("translation must preserve the normalization")
    return DiscSeries(s.ctx, tuple(new_terms))


def threshold_above(report: EnvelopeReport, bound: int) -> Val:
    """Largest v up to which the dominant degree stays > bound; Val(0) when
    it never does, INF when it always does."""
    if bound < 1:
        raise ValueError("bound must be a positive integer")
    thr = Val(0)
    for piece in report.dominant:
        if piece.degree > bound:
            thr = piece.hi
        else:
            break
    return thr


@dataclass(frozen=True)
class RadialityVerdict:
    status: str  # "REFUTED" | "CONSISTENT"
    origin: EnvelopeReport
    checked: int
    above: Optional[int] = None
    witness_index: Optional[int] = None
    witness: Optional[Coeff] = None
    witness_report: Optional[EnvelopeReport] = None

    @property
    def refuted(self) -> bool:
        return self.status == "REFUTED"


def radiality_probe(
    s: DiscSeries,
    probes: Sequence[Coeff],
    above: Optional[int] = None,
    jobs: int = 1,
) -> RadialityVerdict:
    """Compare the profile at the origin with profiles at translated centers.

    With above=None the full profiles are compared; with above=b only the
    v-threshold of the locus {multiplicity > b}.  A mismatch REFUTES
    radiality (of the full morphism resp. of that locus) with the witness
    attached; agreement on finitely many probes is only CONSISTENT, never a
    proof.  jobs > 1 evaluates probes concurrently; the verdict and witness
    are those of the first mismatch in input order either way.
    """
    origin = newton_profile(s)
    origin_thr = threshold_above(origin, above) if above is not None else None
    reports: Optional[list[EnvelopeReport]] = None
    if jobs > 1 and len(probes) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as ex:
            reports = list(ex.map(lambda a: newton_profile(translate(s, a)), probes))
    for idx, a in enumerate(probes):
        rep = reports[idx] if reports is not None else newton_profile(translate(s, a))
        if above is None:
            same = rep.profile == origin.profile
        else:
            same = threshold_above(rep, above) == origin_thr
        if not same:
            return RadialityVerdict(
                status="REFUTED",
                origin=origin,
                checked=idx + 1,
                above=above,
                witness_index=idx,
                witness=a,
                witness_report=rep,
            )
    return RadialityVerdict(
        status="CONSISTENT", origin=origin, checked=len(probes), above=above
    )


def etale_check(s: DiscSeries) -> bool:
    """val(c_1) <= val(i) + val(c_i) for every i, where val(i) = INF when
    p divides i: the unit-derivative criterion."""
    p = s.ctx.p
    c1v = s.coeff(1).val()  # INF when absent
    for deg, c in s.terms:
        if deg % p == 0:
            continue
        if not c1v <= Val(0) + c.val():
            return False
    return True


def p_power_criterion(s: DiscSeries) -> bool:
    """True iff every dominant degree of the envelope is a power of p
    (necessary for radiality off the skeleton)."""
    p = s.ctx.p
    for piece in newton_profile(s).dominant:
        d = piece.degree
        while d % p == 0:
            d //= p
        if d != 1:
            return False
    return True


def format_probe(a: Coeff) -> str:
    """Compact deterministic rendering of a probe for reports."""
    return "+".join(
        (f"{c}*" if c != 1 else "") + f"eps^{format_rational(e)}" for e, c in a.terms
    ) or "0"
