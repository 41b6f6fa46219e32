"""Command-line surface.

Six subcommands over JSON inputs: newton (disc-series envelope and
radiality probing), herbrand (ramification filtration and Herbrand
function), tower (splitting calculus), locus (multiplicity loci on a
skeleton model), verify (the named acceptance checks), and plot.

Reports are tab-separated key/value lines so they diff and grep cleanly;
figures go to files named by --plot-out / --out.  Exit codes: 0 success,
1 verification failure, 2 input parse error, 3 expectation violated,
4 invalid mathematical datum.  All output is deterministic for a given
input, independent of --jobs.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .errors import InvalidDatum, InvariantViolation, ParseError
from .groups import FiniteGroup
from .hahn import Coeff
from .newton import (
    DiscSeries,
    etale_check,
    format_probe,
    multiplicity_at,
    newton_profile,
    p_power_criterion,
    radiality_probe,
    threshold_above,
)
from .pmfun import (
    INF,
    PMFunction,
    Val,
    format_rational,
    parse_rational,
)
from .ramify import (
    InertiaDatum,
    TowerStep,
    check_herbrand_transitivity,
    different,
    filtration,
    herbrand_product,
    herbrand_slopes,
    tower_profile,
)
from .skeleta import (
    RadialMorphismModel,
    TailPoint,
    contains,
    enlarge,
    multiplicity_locus,
)
from .verify import run_checks

_EXIT_OK = 0
_EXIT_VERIFY = 1
_EXIT_PARSE = 2
_EXIT_EXPECT = 3
_EXIT_DATUM = 4


def _emit(*cols) -> None:
    print("\t".join(str(c) for c in cols))


def _join(items) -> str:
    items = list(items)
    return ",".join(str(x) for x in items) if items else "-"


def _rats(xs) -> str:
    return _join(format_rational(x) for x in xs)


def _load_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc


def _build(path: str, builder, blob):
    # schema slips (missing keys, wrong shapes) are input errors, not bugs
    try:
        return builder(blob)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


def _env_prime() -> int | None:
    raw = os.environ.get("RAMCALC_PRIME")
    if raw is None or raw.strip() == "":
        return None
    try:
        return int(raw)
    except ValueError as exc:
        raise ParseError(f"RAMCALC_PRIME={raw!r} is not an integer") from exc


def _profile_rows(prefix: str, f: PMFunction) -> None:
    if f.intercept:
        _emit(f"{prefix}.intercept", format_rational(f.intercept))
    _emit(f"{prefix}.breaks", _rats(f.breaks))
    _emit(f"{prefix}.slopes", _rats(f.slopes))


def _maybe_plot(out: str | None, f: PMFunction, title: str) -> None:
    if out:
        from .plotting import render_svg

        render_svg(f, out, title=title)
        _emit("plot", out)


# ------------------------------------------------------------ newton


def _probes_from_file(path: str, series: DiscSeries) -> list[Coeff]:
    blob = _load_json(path)

    def build(b):
        return [Coeff.from_json_list(series.ctx, pj) for pj in b["probes"]]

    return _build(path, build, blob)


def _cmd_newton(args) -> int:
    blob = _load_json(args.series)
    series = _build(
        args.series, lambda b: DiscSeries.from_json_dict(b, fallback_p=_env_prime()), blob
    )
    report = newton_profile(series)
    _emit("p", series.ctx.p)
    _emit("series.degree", series.degree)
    _emit("series.terms", _join(str(d) for d in series.degrees))
    _profile_rows("profile", report.profile)
    for piece in report.dominant:
        _emit("dominant", f"[{piece.lo},{piece.hi}):{piece.degree}")
    _emit("etale", "true" if etale_check(series) else "false")
    _emit("p-power", "true" if p_power_criterion(series) else "false")
    if args.at is not None:
        v = Val(args.at)
        _emit(f"multiplicity@{args.at}", multiplicity_at(series, v))
    code = _EXIT_OK
    if args.probes:
        probes = _probes_from_file(args.probes, series)
        verdict = radiality_probe(series, probes, above=args.above, jobs=args.jobs)
        scope = "full profile" if args.above is None else f"mult>{args.above}"
        _emit("radiality.scope", scope)
        _emit("radiality.checked", verdict.checked)
        _emit("radiality", verdict.status)
        if verdict.refuted:
            _emit("radiality.witness", format_probe(verdict.witness))
            _emit("radiality.witness.index", verdict.witness_index)
            _profile_rows("witness.profile", verdict.witness_report.profile)
            if args.above is not None:
                _emit(
                    "radiality.origin.threshold",
                    threshold_above(verdict.origin, args.above),
                )
                _emit(
                    "radiality.witness.threshold",
                    threshold_above(verdict.witness_report, args.above),
                )
            if args.expect_radial:
                code = _EXIT_EXPECT
    _maybe_plot(args.plot_out, report.profile, "disc-series profile")
    return code


# ------------------------------------------------------------ herbrand


def _parse_elems(raw: str) -> frozenset[int]:
    try:
        return frozenset(int(x) for x in raw.replace("+", ",").split(",") if x.strip())
    except ValueError as exc:
        raise ParseError(f"bad subgroup spec {raw!r}") from exc


def _cmd_herbrand(args) -> int:
    gblob = _load_json(args.group)
    group = _build(args.group, FiniteGroup.from_json_dict, gblob)
    iblob = _load_json(args.inertia)
    datum = _build(
        args.inertia, lambda b: InertiaDatum.from_json_dict(group, b), iblob
    )
    filt = filtration(datum)
    slopes_route = herbrand_slopes(datum)
    product_route = herbrand_product(datum)
    _emit("group.order", group.order)
    _emit("filtration.jumps", _rats(filt.jumps))
    _emit("filtration.orders", _join(filt.orders))
    if slopes_route.breaks:
        _profile_rows("herbrand", slopes_route)
    else:
        _emit("herbrand", "identity")
    _emit("herbrand.routes", "AGREE" if slopes_route == product_route else "DISAGREE")
    by_elements = sum(
        (datum.iv[s] for s in group.elements() if s != 0), start=Val(0)
    )
    _emit("different.element-sum", by_elements)
    _emit("different.jump-sum", different(datum))
    code = _EXIT_OK if slopes_route == product_route else _EXIT_VERIFY
    subs = [_parse_elems(raw) for raw in args.subgroup or []]
    if subs:
        if args.jobs > 1 and len(subs) > 1:
            with ThreadPoolExecutor(max_workers=args.jobs) as ex:
                reports = list(
                    ex.map(lambda h: check_herbrand_transitivity(datum, h), subs)
                )
        else:
            reports = [check_herbrand_transitivity(datum, h) for h in subs]
        for raw, rep in zip(args.subgroup, reports):
            label = "+".join(str(x) for x in sorted(_parse_elems(raw)))
            for c in rep.checks:
                _emit(f"transitivity.{label}.{c.name}", "PASS" if c.passed else "FAIL")
            _emit(f"transitivity.{label}", "PASS" if rep.passed else "FAIL")
            if not rep.passed:
                code = _EXIT_VERIFY
    _maybe_plot(args.plot_out, slopes_route, "Herbrand function")
    return code


# ------------------------------------------------------------ tower


def _cmd_tower(args) -> int:
    blob = _load_json(args.tower)
    p = blob.get("p", _env_prime()) if isinstance(blob, dict) else None
    if p is None:
        raise ParseError(
            f"{args.tower}: no prime given: set \"p\" in the file or RAMCALC_PRIME"
        )
    steps = _build(
        args.tower,
        lambda b: [TowerStep.from_json_dict(sj) for sj in b["steps"]],
        blob,
    )
    prof = tower_profile(steps, int(p))
    _emit("p", int(p))
    _emit(
        "steps",
        _join(
            s.kind
            + (f":{s.degree}" if s.kind == "tame" else "")
            + (f":{format_rational(s.different_v)}" if s.kind == "sep_p" else "")
            for s in steps
        ),
    )
    if prof.breaks:
        _profile_rows("profile", prof)
    else:
        _emit("profile", "identity" if prof == PMFunction.from_data(0, (), (1,)) else "linear")
        _emit("profile.slopes", _rats(prof.slopes))
    _emit("concave", "true" if prof.is_concave else "false")
    _maybe_plot(args.plot_out, prof, "tower profile")
    return _EXIT_OK


# ------------------------------------------------------------ locus


def _parse_point(raw: str) -> TailPoint:
    anchor, sep, depth = raw.rpartition(":")
    if not sep or not anchor:
        raise ParseError(f"bad point spec {raw!r}, want anchor:depth")
    return TailPoint(anchor, Val(depth))


def _cmd_locus(args) -> int:
    blob = _load_json(args.model)
    model = _build(
        args.model,
        lambda b: RadialMorphismModel.from_json_dict(b.get("model", b)),
        blob,
    )
    if args.enlarge:
        pt = _parse_point(args.enlarge)
        model = enlarge(model, pt)
        new_id = model.source.ids[-1]
        _emit("enlarged.vertex", new_id)
        _emit("enlarged.image", model.vertex_map[new_id])
        _emit("enlarged.degree", model.edge_degrees[tuple(sorted((pt.anchor, new_id)))])
    _emit("bound", args.bound)
    locus = multiplicity_locus(model, args.bound)
    for vid in sorted(locus.threshold):
        _emit(f"threshold.{vid}", locus.threshold[vid])
    for raw in args.contains or []:
        pt = _parse_point(raw)
        _emit(
            f"contains.{pt.anchor}:{pt.depth}",
            "true" if contains(locus, pt) else "false",
        )
    return _EXIT_OK


# ------------------------------------------------------------ verify / plot


def _cmd_verify(args) -> int:
    results = run_checks(
        name_filter=args.filter, golden_dir=args.golden_dir, jobs=args.jobs
    )
    if not results:
        raise ParseError(f"no checks match filter {args.filter!r}")
    for r in results:
        _emit("check", r.name, "PASS" if r.passed else "FAIL", r.detail)
    good = sum(1 for r in results if r.passed)
    _emit("summary", f"{good}/{len(results)}", "PASS" if good == len(results) else "FAIL")
    return _EXIT_OK if good == len(results) else _EXIT_VERIFY


def _cmd_plot(args) -> int:
    blob = _load_json(args.pmfunction)
    f = _build(args.pmfunction, PMFunction.from_json_dict, blob)
    if args.format == "ascii":
        from .plotting import render_ascii

        text = render_ascii(f, width=args.width)
        if args.out:
            Path(args.out).write_text(text)
            _emit("plot", args.out)
        else:
            sys.stdout.write(text)
    else:
        if not args.out:
            raise ParseError("--format svg requires --out FILE")
        from .plotting import render_svg

        render_svg(f, args.out, title=args.title)
        _emit("plot", args.out)
    return _EXIT_OK


# ------------------------------------------------------------ wiring


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="ramcalc",
        description="Exact profiles, ramification filtrations and "
        "multiplicity loci in valuation coordinates.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p_new = sub.add_parser("newton", help="envelope report for a disc series")
    p_new.add_argument("series", help="series JSON file")
    p_new.add_argument("--probes", help="probes JSON file for radiality testing")
    p_new.add_argument("--at", help="report the multiplicity at this v (rational or inf)")
    p_new.add_argument(
        "--above", type=int, help="probe only the locus {multiplicity > N}"
    )
    p_new.add_argument(
        "--expect-radial",
        action="store_true",
        help="exit 3 if the probes refute radiality",
    )
    p_new.add_argument("--plot-out", help="write an SVG of the profile here")
    p_new.add_argument("--jobs", type=int, default=1, help="parallel probe workers")
    p_new.set_defaults(fn=_cmd_newton)

    p_her = sub.add_parser("herbrand", help="filtration report for an inertia datum")
    p_her.add_argument("group", help="group JSON file")
    p_her.add_argument("inertia", help="inertia JSON file")
    p_her.add_argument(
        "--subgroup",
        action="append",
        help="normal subgroup as comma-separated elements; repeatable",
    )
    p_her.add_argument("--plot-out", help="write an SVG of the Herbrand function here")
    p_her.add_argument("--jobs", type=int, default=1, help="parallel subgroup workers")
    p_her.set_defaults(fn=_cmd_herbrand)

    p_tow = sub.add_parser("tower", help="composite profile of an extension tower")
    p_tow.add_argument("tower", help="tower JSON file")
    p_tow.add_argument("--plot-out", help="write an SVG of the profile here")
    p_tow.set_defaults(fn=_cmd_tower)

    p_loc = sub.add_parser("locus", help="multiplicity locus of a skeleton model")
    p_loc.add_argument("model", help="model JSON file")
    p_loc.add_argument("--bound", type=int, required=True, help="multiplicity bound")
    p_loc.add_argument(
        "--contains", action="append", help="query a tail point anchor:depth; repeatable"
    )
    p_loc.add_argument(
        "--enlarge", help="grow the skeleton at anchor:depth before reporting"
    )
    p_loc.set_defaults(fn=_cmd_locus)

    p_ver = sub.add_parser("verify", help="run the named verification checks")
    p_ver.add_argument("--filter", help="run only checks with this tag or name")
    p_ver.add_argument("--golden-dir", help="read golden files from here instead")
    p_ver.add_argument("--jobs", type=int, default=1, help="parallel check workers")
    p_ver.set_defaults(fn=_cmd_verify)

    p_plt = sub.add_parser("plot", help="render a piecewise-monomial function")
    p_plt.add_argument("pmfunction", help="function JSON file")
    p_plt.add_argument("--format", choices=("ascii", "svg"), default="ascii")
    p_plt.add_argument("--out", help="output file (required for svg)")
    p_plt.add_argument("--width", type=int, default=61, help="ascii grid width")
    p_plt.add_argument("--title", default="", help="figure title (svg)")
    p_plt.set_defaults(fn=_cmd_plot)
    return top


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_PARSE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_PARSE
    except InvalidDatum as exc:
        print(f"error: invalid datum: {exc}", file=sys.stderr)
        return _EXIT_DATUM
    except InvariantViolation as exc:
        print(f"error: internal invariant violated: {exc}", file=sys.stderr)
        return _EXIT_VERIFY


if __name__ == "__main__":
    raise SystemExit(main())
