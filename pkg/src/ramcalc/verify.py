"""Named verification checks reproducing the package's reference results.

Each check is a self-contained computation with an exact expected outcome:
the worked disc-series examples, the Herbrand golden cases, the tower and
locus calculus, and bulk randomized algebra properties.  The CLI verify
subcommand and the acceptance test suite both run this registry.  A check
returns a one-line summary on success and raises CheckFailure (or any
exception) on mismatch; run_checks never lets one failure stop the rest.
"""
from __future__ import annotations

import json
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Callable, Optional

from .groups import FiniteGroup, cyclic, elementary_abelian
from .hahn import Coeff, PrimeContext, binom_mod_p
from .newton import (
    DiscSeries,
    EnvelopeReport,
    format_probe,
    newton_profile,
    p_power_criterion,
    radiality_probe,
    threshold_above,
)
from .pmfun import (
    PMFunction,
    ProfileFunction,
    Val,
    as_profile,
    compose,
    identity,
    inverse,
)
from .ramify import (
    TowerStep,
    check_herbrand_transitivity,
    datum_from_chain,
    different,
    filtration,
    herbrand_product,
    herbrand_slopes,
    quotient_inertia,
    restrict_inertia,
    tower_profile,
)
from .skeleta import (
    RadialMorphismModel,
    TailPoint,
    contains,
    enlarge,
    multiplicity_locus,
)

F = Fraction

GOLDEN_DIR = Path(__file__).resolve().parent / "data" / "golden"


class CheckFailure(Exception):
    """A verification check did not reproduce its pinned result."""


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


_Check = Callable[[Path], str]
_REGISTRY: list[tuple[str, _Check]] = []


def _register(name: str):
    def deco(fn: _Check) -> _Check:
        _REGISTRY.append((name, fn))
        return fn

    return deco


def check_names() -> list[str]:
    return [name for name, _ in _REGISTRY]


def run_checks(
    name_filter: Optional[str] = None,
    golden_dir=None,
    jobs: int = 1,
) -> list[CheckResult]:
    """Run the registered checks (all, or those whose tag or full name
    equals name_filter) and return results in registration order."""
    gd = Path(golden_dir) if golden_dir is not None else GOLDEN_DIR
    chosen = [
        (name, fn)
        for name, fn in _REGISTRY
        if name_filter is None or name_filter in (name, name.split(":", 1)[0])
    ]

    def run_one(item) -> CheckResult:
        name, fn = item
        try:
            return CheckResult(name, True, fn(gd))
        except CheckFailure as exc:
            return CheckResult(name, False, str(exc))
        except Exception as exc:
            return CheckResult(name, False, f"{type(exc).__name__}: {exc}")

    if jobs > 1 and len(chosen) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(run_one, chosen))
    return [run_one(item) for item in chosen]


def _expect(cond: bool, msg: str) -> None:
    if not cond:
        raise CheckFailure(msg)


def _load(golden: Path, fname: str) -> dict:
    return json.loads((golden / fname).read_text())


# ------------------------------------------------------------ generators


def _catalog() -> list[FiniteGroup]:
    groups = [cyclic(n) for n in (2, 3, 4, 5, 7, 9, 12, 16, 25, 27)]
    groups += [
        elementary_abelian(2, 2),
        elementary_abelian(3, 2),
        elementary_abelian(2, 3),
        elementary_abelian(3, 3),
    ]
    return groups


def _random_chain_datum(rng: random.Random, group: FiniteGroup, normals):
    chain = [frozenset(group.elements())]
    while len(chain[-1]) > 1:
        chain.append(rng.choice([h for h in normals if h < chain[-1]]))
    vals = set()
    while len(vals) < len(chain) - 1:
        vals.add(F(rng.randint(0, 60), rng.randint(1, 10)))
    return datum_from_chain(group, chain, sorted(vals))


def _random_pm(rng: random.Random, profile: bool = False, max_breaks: int = 3):
    k = rng.randint(0, max_breaks)
    cuts = set()
    while len(cuts) < k:
        cuts.add(F(rng.randint(1, 60), rng.randint(1, 12)))
    slopes = [F(rng.randint(1, 12), rng.randint(1, 6)) for _ in range(k + 1)]
    intercept = F(0) if profile else F(rng.randint(0, 9), rng.randint(1, 4))
    f = PMFunction.from_data(intercept, sorted(cuts), slopes)
    return as_profile(f) if profile else f


def _random_coeff(rng: random.Random, ctx: PrimeContext, max_terms: int = 3) -> Coeff:
    terms: dict[Fraction, int] = {}
    for _ in range(rng.randint(0, max_terms)):
        e = F(rng.randint(0, 40), rng.randint(1, 8))
        terms[e] = terms.get(e, 0) + rng.randint(1, ctx.p - 1)
    return Coeff.make(ctx, terms.items())


def _z9_datum():
    g = cyclic(9)
    full = frozenset(range(9))
    return datum_from_chain(g, [full, frozenset({0, 3, 6}), frozenset({0})], [F(1), F(3)])


def _is_p_power(x: Fraction, p: int) -> bool:
    if x.denominator != 1 or x < 1:
        return False
    n = x.numerator
    while n % p == 0:
        n //= p
    return n == 1


# ------------------------------------------------------------ kernel algebra


@_register("pmfun:kernel-algebra")
def _check_pmfun_kernel(golden: Path) -> str:
    rng = random.Random(1009)
    n = 1000
    for _ in range(n):
        f = _random_pm(rng)
        g = _random_pm(rng, profile=True)
        h = _random_pm(rng, profile=True)
        lhs = compose(compose(f, g), h)
        rhs = compose(f, compose(g, h))
        _expect(lhs == rhs, f"associativity broke: {lhs!r} != {rhs!r}")
        _expect(
            as_profile(compose(g, inverse(g))) == identity(),
            f"inverse round trip broke on {g!r}",
        )
        for fn in (f, g, h):
            _expect(all(s > 0 for s in fn.slopes), f"nonpositive slope in {fn!r}")
            _expect(
                all(a < b for a, b in zip(fn.breaks, fn.breaks[1:])),
                f"breaks not increasing in {fn!r}",
            )
            _expect(
                all(a != b for a, b in zip(fn.slopes, fn.slopes[1:])),
                f"unmerged equal slopes in {fn!r}",
            )
    return f"{n} cases: associativity, inverse round trip, canonical form"


@_register("hahn:kernel-algebra")
def _check_hahn_kernel(golden: Path) -> str:
    rng = random.Random(1010)
    n = 0
    for p in (2, 3, 5, 7):
        ctx = PrimeContext(p)
        one = Coeff.one(ctx)
        zero = Coeff.zero(ctx)
        for _ in range(250):
            x = _random_coeff(rng, ctx)
            y = _random_coeff(rng, ctx)
            z = _random_coeff(rng, ctx)
            _expect((x + y) + z == x + (y + z), "addition not associative")
            _expect(x + y == y + x, "addition not commutative")
            _expect((x * y) * z == x * (y * z), "multiplication not associative")
            _expect(x * y == y * x, "multiplication not commutative")
            _expect(x * (y + z) == x * y + x * z, "distributivity broke")
            _expect(x + (-x) == zero and x * one == x, "unit or negation broke")
            _expect((x + y) ** p == x ** p + y ** p, f"Frobenius broke at p={p}")
            _expect((x * y).val() == x.val() + y.val(), "valuation not multiplicative")
            _expect((x + y).val() >= min(x.val(), y.val()), "ultrametric broke")
            nn = rng.randint(0, 69)
            j = rng.randint(0, nn)
            _expect(
                binom_mod_p(p, nn, j) == math.comb(nn, j) % p,
                f"Lucas broke at p={p}, C({nn},{j})",
            )
            n += 1
    return f"{n} cases over p in (2,3,5,7): ring, Frobenius, valuation, Lucas"


# ------------------------------------------------------------ disc series


@_register("newton:degree-p-break")
def _check_degree_p_break(golden: Path) -> str:
    cases = 0
    for p in (2, 3, 5):
        ctx = PrimeContext(p)
        for w in (F(1, 2), F(1), F(7, 3)):
            s = DiscSeries.make(
                ctx, [(1, Coeff.monomial(ctx, w)), (p, Coeff.one(ctx))]
            )
            got = newton_profile(s).profile
            want = ProfileFunction.from_data([w / (p - 1)], [p, 1])
            _expect(
                got == want,
                f"t^{p} + c t with val(c)={w}: got {got.to_json_dict()}",
            )
            cases += 1
    return f"{cases} cases: one break at val(c1)/(p-1), slopes (p, 1)"


@_register("newton:non-radial-2p")
def _check_non_radial_2p(golden: Path) -> str:
    # 2p is itself a p-power when p = 2, so the odd primes carry the content
    for p in (3, 5):
        ctx = PrimeContext(p)
        s = DiscSeries.make(
            ctx, [(1, Coeff.monomial(ctx, F(1))), (2 * p, Coeff.one(ctx))]
        )
        degs = {piece.degree for piece in newton_profile(s).dominant}
        _expect(degs == {1, 2 * p}, f"p={p}: dominant degrees {sorted(degs)}")
        _expect(not p_power_criterion(s), f"p={p}: 2p passed the p-power criterion")
    return "p in (3,5): multiplicities {1, 2p}, p-power criterion false"


@_register("newton:non-radial-p2")
def _check_non_radial_p2(golden: Path) -> str:
    p = 3
    ctx = PrimeContext(p)
    s = DiscSeries.make(
        ctx,
        [
            (1, Coeff.monomial(ctx, F(30))),
            (2 * p, Coeff.monomial(ctx, F(1))),
            (p * p, Coeff.one(ctx)),
        ],
    )
    degs = tuple(piece.degree for piece in newton_profile(s).dominant)
    _expect(degs == (9, 6, 1), f"dominant degrees {degs}")
    _expect(not p_power_criterion(s), "2p passed the p-power criterion")
    return "p=3 instance: multiplicities {1, 2p, p^2} = {1, 6, 9}"


@_register("newton:origin-envelope")
def _check_origin_envelope(golden: Path) -> str:
    blob = _load(golden, "origin_report.json")
    s = DiscSeries.from_json_dict(blob["series"])
    rep = newton_profile(s)
    want = EnvelopeReport.from_json_dict(blob["report"])
    _expect(rep == want, f"report drifted: {rep.to_json_dict()}")
    degs = tuple(piece.degree for piece in rep.dominant)
    _expect(degs == (18, 3, 1), f"dominant degrees {degs}")
    return "origin dominant degrees (18, 3, 1)"


@_register("newton:split-threshold-radial")
def _check_split_threshold(golden: Path) -> str:
    blob = _load(golden, "origin_report.json")
    s = DiscSeries.from_json_dict(blob["series"])
    want = Val(blob["split_threshold"])
    probes = [Coeff.from_json_list(s.ctx, pj) for pj in blob["radial_probes"]]
    verdict = radiality_probe(s, probes, above=1)
    if verdict.refuted:
        raise CheckFailure(
            f"probe {format_probe(verdict.witness)} moved the split threshold to "
            f"{threshold_above(verdict.witness_report, 1)}"
        )
    got = threshold_above(verdict.origin, 1)
    _expect(got == want, f"origin split threshold {got}")
    return f"split threshold v = {want} stable across {verdict.checked} probes"


@_register("newton:refutation-above-3")
def _check_refutation(golden: Path) -> str:
    blob = _load(golden, "origin_report.json")
    s = DiscSeries.from_json_dict(blob["series"])
    probe = Coeff.from_json_list(s.ctx, blob["refuting_probe"])
    bound = int(blob["above"])
    verdict = radiality_probe(s, [probe], above=bound)
    _expect(verdict.refuted, f"probe {format_probe(probe)} did not refute")
    got_o = threshold_above(verdict.origin, bound)
    got_w = threshold_above(verdict.witness_report, bound)
    _expect(
        got_o == Val(blob["origin_threshold"])
        and got_w == Val(blob["probe_threshold"]),
        f"thresholds {got_o} vs {got_w}",
    )
    want_breaks = tuple(Val(b) for b in blob["probe_dominant_breaks"])
    got_breaks = tuple(Val(b) for b in verdict.witness_report.profile.breaks)
    _expect(got_breaks == want_breaks, f"witness breaks {got_breaks}")
    return (
        f"witness {format_probe(probe)}: locus {{mult > {bound}}} splits at "
        f"{got_o} vs {got_w}"
    )


# ------------------------------------------------------------ ramification


@_register("ramify:herbrand-two-routes")
def _check_two_routes(golden: Path) -> str:
    rng = random.Random(1003)
    count = 0
    for g in _catalog():
        normals = g.normal_subgroups()
        for _ in range(8):
            d = _random_chain_datum(rng, g, normals)
            a = herbrand_slopes(d)
            b = herbrand_product(d)
            _expect(
                a == b,
                f"routes disagree on |G|={g.order}: {a.to_json_dict()} vs "
                f"{b.to_json_dict()}",
            )
            count += 1
    _expect(count >= 100, f"only {count} data generated")
    return f"{count} random data: product route == slope route"


@_register("ramify:herbrand-transitivity")
def _check_transitivity(golden: Path) -> str:
    want = ProfileFunction.from_json_dict(_load(golden, "z9_profile.json"))
    d9 = _z9_datum()
    lhs = herbrand_slopes(d9)
    mid = frozenset({0, 3, 6})
    rhs = as_profile(
        compose(
            herbrand_slopes(quotient_inertia(d9, mid)),
            herbrand_slopes(restrict_inertia(d9, mid)),
        )
    )
    _expect(lhs == want, f"direct Herbrand drifted: {lhs.to_json_dict()}")
    _expect(rhs == want, f"composed Herbrand drifted: {rhs.to_json_dict()}")

    rng = random.Random(1004)
    data = 0
    reports = 0
    for g in _catalog():
        normals = g.normal_subgroups()
        for _ in range(3):
            d = _random_chain_datum(rng, g, normals)
            data += 1
            for h in normals:
                report = check_herbrand_transitivity(d, h)
                _expect(
                    report.passed,
                    f"|G|={g.order}, |H|={len(h)}: "
                    + "; ".join(c.name for c in report.checks if not c.passed),
                )
                reports += 1
    return (
        f"golden case matches on both sides; {reports} subgroup checks over "
        f"{data} data pass"
    )


@_register("ramify:different-formulas")
def _check_different(golden: Path) -> str:
    rng = random.Random(1005)
    count = 0
    for g in _catalog():
        normals = g.normal_subgroups()
        for _ in range(4):
            d = _random_chain_datum(rng, g, normals)
            by_elements = sum(
                (d.iv[s] for s in g.elements() if s != 0), start=Val(0)
            )
            # different() cross-checks the jump-sum route internally
            _expect(different(d) == by_elements, f"different drifted on |G|={g.order}")
            count += 1
    for p in (2, 3, 5, 7):
        gp = cyclic(p)
        full = frozenset(range(p))
        for c in (F(1, 2), F(1), F(7, 3), F(5)):
            d = datum_from_chain(gp, [full, frozenset({0})], [c])
            jump = filtration(d).jumps[0]
            _expect(
                Val((p - 1) * jump) == different(d),
                f"degree-{p} relation broke at iv={c}",
            )
            count += 1
    return f"{count} data: element sum == jump sum; (p-1)*break == v(different)"


@_register("compare:newton-vs-herbrand")
def _check_compare(golden: Path) -> str:
    cases = 0
    for p in (2, 3, 5):
        ctx = PrimeContext(p)
        full = frozenset(range(p))
        for w in (F(1), F(3, 2)):
            s = DiscSeries.make(
                ctx, [(1, Coeff.monomial(ctx, w)), (p, Coeff.one(ctx))]
            )
            disc_route = newton_profile(s).profile
            d = datum_from_chain(cyclic(p), [full, frozenset({0})], [w / (p - 1)])
            filt_route = herbrand_slopes(d)
            _expect(
                disc_route == filt_route,
                f"p={p}, val(c1)={w}: {disc_route.to_json_dict()} vs "
                f"{filt_route.to_json_dict()}",
            )
            cases += 1
    return f"{cases} cases: disc-series route == filtration route"


# ------------------------------------------------------------ towers and loci


@_register("tower:splitting-calculus")
def _check_towers(golden: Path) -> str:
    blob = _load(golden, "tower_two_step.json")
    p_g = int(blob["p"])
    steps = [TowerStep.from_json_dict(sj) for sj in blob["steps"]]
    want = ProfileFunction.from_json_dict(blob["profile"])
    got = tower_profile(steps, p_g)
    _expect(got == want, f"two-step tower drifted: {got.to_json_dict()}")

    count = 0
    for p in (2, 3, 5):
        basis = (
            TowerStep.tame(3 if p == 2 else 2),
            TowerStep.insep(),
            TowerStep.sep(F(p - 1)),
            TowerStep.sep(F(2 * (p - 1))),
        )
        for length in range(5):
            for steps in product(basis, repeat=length):
                f = tower_profile(steps, p)
                _expect(f.is_concave, f"non-concave tower {steps} at p={p}")
                _expect(
                    all(_is_p_power(s, p) for s in f.slopes),
                    f"non-p-power slope in tower {steps} at p={p}",
                )
                wild = sum(1 for st in steps if st.kind != "tame")
                _expect(
                    max(f.slopes) == F(p) ** wild if f.slopes else False,
                    f"top slope wrong in tower {steps} at p={p}",
                )
                count += 1
    return f"{count} towers concave with p-power slopes; two-step golden matched"


@_register("locus:radii-enlargement")
def _check_locus(golden: Path) -> str:
    blob = _load(golden, "locus_model.json")
    m = RadialMorphismModel.from_json_dict(blob["model"])
    for bound_s, want in blob["loci"].items():
        got = multiplicity_locus(m, int(bound_s)).threshold
        _expect(
            got == {v: Val(x) for v, x in want.items()},
            f"locus at bound {bound_s}: "
            + ", ".join(f"{v}={got[v]}" for v in sorted(got)),
        )
    pts = [TailPoint(a, Val(F(k, 6))) for a in ("u", "w") for k in range(30)]
    for b1, b2 in ((1, 2), (2, 3), (3, 9), (9, 27), (1, 27)):
        big = multiplicity_locus(m, b1)
        small = multiplicity_locus(m, b2)
        for x in pts:
            _expect(
                contains(big, x) or not contains(small, x),
                f"nesting broke at bounds {b1} <= {b2} near {x.anchor}",
            )
    depth = F(1)
    m2 = enlarge(m, TailPoint("u", Val(depth)), new_id="n", image_id="ni")
    grid = 0
    for bound in (1, 2, 3, 9, 27):
        old = multiplicity_locus(m, bound)
        new = multiplicity_locus(m2, bound)
        for k in range(1, 51):
            dpt = F(k, 10)
            _expect(
                contains(old, TailPoint("u", Val(depth + dpt)))
                == contains(new, TailPoint("n", Val(dpt))),
                f"enlargement changed membership at depth {depth + dpt}, bound {bound}",
            )
            grid += 1
    return (
        f"{len(blob['loci'])} pinned loci; nesting; enlargement invariance on a "
        f"50-point grid per bound ({grid} membership comparisons)"
    )


# ------------------------------------------------------------ golden files


@_register("golden:z9-profile")
def _check_golden_z9(golden: Path) -> str:
    want = ProfileFunction.from_json_dict(_load(golden, "z9_profile.json"))
    got = herbrand_slopes(_z9_datum())
    _expect(got == want, f"stored profile != recomputed: {got.to_json_dict()}")
    return "stored profile matches the recomputed Herbrand function"


@_register("golden:origin-report")
def _check_golden_origin(golden: Path) -> str:
    blob = _load(golden, "origin_report.json")
    s = DiscSeries.from_json_dict(blob["series"])
    want = EnvelopeReport.from_json_dict(blob["report"])
    _expect(newton_profile(s) == want, "stored report != recomputed envelope")
    return "stored report matches the recomputed envelope"


@_register("golden:tower-two-step")
def _check_golden_tower(golden: Path) -> str:
    blob = _load(golden, "tower_two_step.json")
    steps = [TowerStep.from_json_dict(sj) for sj in blob["steps"]]
    want = ProfileFunction.from_json_dict(blob["profile"])
    got = tower_profile(steps, int(blob["p"]))
    _expect(got == want, f"stored tower profile != recomputed: {got.to_json_dict()}")
    z9 = ProfileFunction.from_json_dict(_load(golden, "z9_profile.json"))
    _expect(got == z9, "tower profile != Herbrand golden profile")
    return "stored two-step tower matches recomputation and the Herbrand golden"


@_register("golden:locus-model")
def _check_golden_locus(golden: Path) -> str:
    blob = _load(golden, "locus_model.json")
    m = RadialMorphismModel.from_json_dict(blob["model"])
    for bound_s, want in blob["loci"].items():
        got = multiplicity_locus(m, int(bound_s)).threshold
        _expect(
            got == {v: Val(x) for v, x in want.items()},
            f"stored locus at bound {bound_s} != recomputed",
        )
    return f"model validates; {len(blob['loci'])} stored loci match recomputation"
