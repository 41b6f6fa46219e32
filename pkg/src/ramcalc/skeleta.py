"""Combinatorial skeleton models: metric graphs with typed vertices, tail
points (anchor + depth), radial sets, and radial morphism models carrying a
profile per type-2 vertex.

A point off the skeleton is recorded purely as (anchor, depth): every
statement in scope factors through that pair.  Depth is the valuation of
the radius, so deeper means smaller discs.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Union

from .errors import InvalidDatum
from .pmfun import (
    INF,
    ProfileFunction,
    TOWARD_ZERO,
    Val,
    as_profile,
    compose,
    format_rational,
    parse_rational,
    shift_rescale,
    slope_at,
)

__all__ = [
    "MetricGraph",
    "RadialMorphismModel",
    "RadialSet",
    "TailPoint",
    "compose_models",
    "contains",
    "enlarge",
    "multiplicity_locus",
]

Rat = Union[int, Fraction]

TYPE2 = 2
TYPE3 = 3


def _edge_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class MetricGraph:
    """Connected graph, vertices typed 2 or 3, edge lengths positive
    rationals (v-units).  Parallel edges are not modeled; loops are."""

    vertices: tuple[tuple[str, int], ...]
    edges: tuple[tuple[str, str, Fraction], ...]

    def __post_init__(self):
        ids = [v for v, _ in self.vertices]
        if len(set(ids)) != len(ids):
            raise InvalidDatum("duplicate vertex id")
        if not ids:
            raise InvalidDatum("empty graph")
        types = dict(self.vertices)
        for v, t in self.vertices:
            if t not in (TYPE2, TYPE3):
                raise InvalidDatum(f"vertex {v!r} must have type 2 or 3")
        keys = set()
        for a, b, ln in self.edges:
            if a not in types or b not in types:
                raise InvalidDatum(f"edge ({a!r},{b!r}) references unknown vertex")
            if not isinstance(ln, Fraction) or ln <= 0:
                raise InvalidDatum("edge lengths must be positive rationals")
            k = _edge_key(a, b)
            if k in keys:
                raise InvalidDatum(f"parallel edge between {a!r} and {b!r}")
            keys.add(k)
        # connectivity
        seen = {ids[0]}
        frontier = [ids[0]]
        while frontier:
            x = frontier.pop()
            for a, b, _ in self.edges:
                for u, w in ((a, b), (b, a)):
                    if u == x and w not in seen:
                        seen.add(w)
                        frontier.append(w)
        if seen != set(ids):
            raise InvalidDatum("graph is not connected")

    @classmethod
    def make(cls, vertices, edges) -> "MetricGraph":
        vs = tuple((str(v), int(t)) for v, t in vertices)
        es = tuple((str(a), str(b), Fraction(ln)) for a, b, ln in edges)
        return cls(vs, es)

    def vertex_type(self, v: str) -> int:
        for u, t in self.vertices:
            if u == v:
                return t
        raise KeyError(v)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.vertices)

    @property
    def type2_ids(self) -> tuple[str, ...]:
        return tuple(v for v, t in self.vertices if t == TYPE2)

    def edge_length(self, a: str, b: str) -> Optional[Fraction]:
        k = _edge_key(a, b)
        for x, y, ln in self.edges:
            if _edge_key(x, y) == k:
                return ln
        return None

    def to_json_dict(self) -> dict:
        return {
            "vertices": [{"id": v, "type": t} for v, t in self.vertices],
            "edges": [
                {"a": a, "b": b, "len": format_rational(ln)} for a, b, ln in self.edges
            ],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "MetricGraph":
        return cls.make(
            [(v["id"], v["type"]) for v in data["vertices"]],
            [(e["a"], e["b"], parse_rational(e["len"])) for e in data.get("edges", [])],
        )


@dataclass(frozen=True)
class TailPoint:
    """anchor vertex + v-depth down one of its tails; depth 0 is the vertex
    itself, INF a rigid point."""

    anchor: str
    depth: Val

    def __post_init__(self):
        if not isinstance(self.depth, Val):
            object.__setattr__(self, "depth", Val(self.depth))
        if not self.depth.is_inf and self.depth.finite < 0:
            raise InvalidDatum("depth must be nonnegative")


@dataclass(frozen=True, eq=False)
class RadialSet:
    """C(graph, threshold): the tail points with depth <= threshold(anchor),
    thresholds kept on type-2 vertices (type-3 vertices have no tails)."""

    graph: MetricGraph
    threshold: Mapping[str, Val]

    def __post_init__(self):
        object.__setattr__(self, "threshold", dict(self.threshold))
        want = set(self.graph.type2_ids)
        if set(self.threshold) != want:
            raise InvalidDatum("thresholds must cover exactly the type-2 vertices")
        for v, thr in self.threshold.items():
            if not isinstance(thr, Val):
                raise InvalidDatum(f"threshold at {v!r} must be a Val")
            if not thr.is_inf and thr.finite < 0:
                raise InvalidDatum(f"threshold at {v!r} must be nonnegative")

    def __eq__(self, other):
        return (
            isinstance(other, RadialSet)
            and self.graph == other.graph
            and self.threshold == other.threshold
        )

    def to_json_dict(self) -> dict:
        return {
            "graph": self.graph.to_json_dict(),
            "threshold": {v: str(t) for v, t in sorted(self.threshold.items())},
        }


def contains(s: RadialSet, x: TailPoint) -> bool:
    """depth(x) <= threshold(anchor(x)); the inequality is the v-form."""
    ids = s.graph.ids
    if x.anchor not in ids:
        raise ValueError(f"unknown anchor {x.anchor!r}")
    if s.graph.vertex_type(x.anchor) == TYPE3:
        if x.depth != Val(0):
            raise InvalidDatum("type-3 vertices admit no tails")
        return True  # the vertex itself lies on the skeleton
    return x.depth <= s.threshold[x.anchor]


@dataclass(frozen=True, eq=False)
class RadialMorphismModel:
    """Skeleton-level model of a radial morphism: vertex map, expansion
    degree per edge, and one profile per type-2 source vertex."""

    source: MetricGraph
    target: MetricGraph
    vertex_map: Mapping[str, str]
    edge_degrees: Mapping[tuple[str, str], int]
    profiles: Mapping[str, ProfileFunction]

    def __post_init__(self):
        object.__setattr__(self, "vertex_map", dict(self.vertex_map))
        object.__setattr__(
            self, "edge_degrees", {_edge_key(*k): v for k, v in self.edge_degrees.items()}
        )
        object.__setattr__(self, "profiles", dict(self.profiles))
        src, tgt = self.source, self.target
        if set(self.vertex_map) != set(src.ids):
            raise InvalidDatum("vertex map must cover exactly the source vertices")
        for v, w in self.vertex_map.items():
            if w not in tgt.ids:
                raise InvalidDatum(f"vertex {v!r} maps to unknown target {w!r}")
            if src.vertex_type(v) != tgt.vertex_type(w):
                raise InvalidDatum(f"vertex map must preserve type at {v!r}")
        want_edges = {_edge_key(a, b) for a, b, _ in src.edges}
        if set(self.edge_degrees) != want_edges:
            raise InvalidDatum("edge degrees must cover exactly the source edges")
        for (a, b), n in self.edge_degrees.items():
            if not isinstance(n, int) or n < 1:
                raise InvalidDatum(f"edge ({a!r},{b!r}) needs a positive integer degree")
            fa, fb = self.vertex_map[a], self.vertex_map[b]
            if tgt.edge_length(fa, fb) is None:
                raise InvalidDatum(
                    f"edge ({a!r},{b!r}) maps to non-edge ({fa!r},{fb!r})"
                )
        if set(self.profiles) != set(src.type2_ids):
            raise InvalidDatum("profiles must cover exactly the type-2 source vertices")
        for v, f in self.profiles.items():
            if not isinstance(f, ProfileFunction):
                raise InvalidDatum(f"profile at {v!r} must be a ProfileFunction")
            if not f.is_integral:
                raise InvalidDatum(f"profile at {v!r} must have integer slopes")

    def __eq__(self, other):
        return (
            isinstance(other, RadialMorphismModel)
            and self.source == other.source
            and self.target == other.target
            and self.vertex_map == other.vertex_map
            and self.edge_degrees == other.edge_degrees
            and self.profiles == other.profiles
        )

    def to_json_dict(self) -> dict:
        return {
            "source": self.source.to_json_dict(),
            "target": self.target.to_json_dict(),
            "vertex_map": dict(sorted(self.vertex_map.items())),
            "edges": [
                {"a": a, "b": b, "degree": self.edge_degrees[_edge_key(a, b)]}
                for a, b, _ in self.source.edges
            ],
            "profiles": {
                v: self.profiles[v].to_json_dict() for v in sorted(self.profiles)
            },
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "RadialMorphismModel":
        src = MetricGraph.from_json_dict(data["source"])
        tgt = MetricGraph.from_json_dict(data["target"])
        degrees = {
            _edge_key(e["a"], e["b"]): int(e["degree"]) for e in data.get("edges", [])
        }
        profiles = {
            v: as_profile(ProfileFunction.from_json_dict(blob))
            for v, blob in data.get("profiles", {}).items()
        }
        return cls(src, tgt, dict(data.get("vertex_map", {})), degrees, profiles)


def multiplicity_locus(m: RadialMorphismModel, bound: int) -> RadialSet:
    """Radial set of tail points where the morphism's multiplicity stays
    >= bound: per vertex, the last v whose toward-zero slopes all clear the
    bound (0 when even the first slope fails, INF when they all pass)."""
    if not isinstance(bound, int) or bound < 1:
        raise ValueError("bound must be a positive integer")
    thresholds: dict[str, Val] = {}
    for v in m.source.type2_ids:
        f = m.profiles[v]
        thr: Val = INF
        for i, s in enumerate(f.slopes):
            if s < bound:
                thr = Val(f.breaks[i - 1]) if i > 0 else Val(0)
                break
        thresholds[v] = thr
    return RadialSet(m.source, thresholds)


def enlarge(
    m: RadialMorphismModel,
    new_vertex: TailPoint,
    new_id: Optional[str] = None,
    image_id: Optional[str] = None,
) -> RadialMorphismModel:
    """Grow the skeleton down a tail: a new type-2 vertex at finite positive
    depth below the anchor, mirrored in the target at the image depth.  The
    new vertex's profile is the anchor's profile seen from that depth; its
    edge degree is the multiplicity there (toward-zero slope)."""
    anchor = new_vertex.anchor
    if anchor not in m.source.ids:
        raise ValueError(f"unknown anchor {anchor!r}")
    if m.source.vertex_type(anchor) != TYPE2:
        raise InvalidDatum("tails hang only off type-2 vertices")
    if new_vertex.depth.is_inf or new_vertex.depth == Val(0):
        raise ValueError("depth must be finite and positive")
    depth = new_vertex.depth.finite
    f = m.profiles[anchor]
    new_id = new_id or f"{anchor}.{depth.numerator}_{depth.denominator}"
    image_depth = f(depth).finite
    image_anchor = m.vertex_map[anchor]
    image_id = image_id or f"{image_anchor}.{image_depth.numerator}_{image_depth.denominator}"
    if new_id in m.source.ids or image_id in m.target.ids:
        raise InvalidDatum("enlargement id already in use")
    src = MetricGraph(
        m.source.vertices + ((new_id, TYPE2),),
        m.source.edges + ((anchor, new_id, depth),),
    )
    tgt = MetricGraph(
        m.target.vertices + ((image_id, TYPE2),),
        m.target.edges + ((image_anchor, image_id, image_depth),),
    )
    degree = slope_at(f, depth, TOWARD_ZERO)
    vmap = {**m.vertex_map, new_id: image_id}
    degs = {**m.edge_degrees, _edge_key(anchor, new_id): int(degree)}
    profs = {**m.profiles, new_id: shift_rescale(f, depth)}
    return RadialMorphismModel(src, tgt, vmap, degs, profs)


def compose_models(
    f: RadialMorphismModel, g: RadialMorphismModel
) -> RadialMorphismModel:
    """g after f; degrees multiply along edges, profiles compose through the
    vertex map."""
    if f.target != g.source:
        raise InvalidDatum("middle graphs do not match")
    vmap = {v: g.vertex_map[w] for v, w in f.vertex_map.items()}
    degs = {}
    for a, b, _ in f.source.edges:
        k = _edge_key(a, b)
        mid = _edge_key(f.vertex_map[a], f.vertex_map[b])
        degs[k] = f.edge_degrees[k] * g.edge_degrees[mid]
    profs = {
        v: as_profile(compose(g.profiles[f.vertex_map[v]], f.profiles[v]))
        for v in f.source.type2_ids
    }
    return RadialMorphismModel(f.source, g.target, vmap, degs, profs)
