"""Truncated coset graphs X with VX = {gH} and edges {gH, gsH}, s in S.

Cosets are left cosets gH with G acting on the left. A cut of X corresponds
to a subset A of G with A = AH.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from .errors import InvariantError, PreconditionError, StructuralError, TruncationError
from .graph_core import Cut, Graph
from .groups import GroupOracle, group_fixture, shortlex

BASE = "o"


def vid(rep: str) -> str:
    return rep if rep else BASE


def rep_of(v: str) -> str:
    return "" if v == BASE else v


@dataclass(frozen=True)
class FinitenessReport:
    finite: bool | None  # None when truncation-inconclusive
    orbits: int
    interior_orbits: int
    verdict: str  # "confirmed" | "truncation-inconclusive"
    keys: tuple = ()

    @property
    def confirmed(self) -> bool:
        return self.verdict == "confirmed"

    def to_json(self) -> dict:
        return {"finite": self.finite, "orbits": self.orbits,
                "interior_orbits": self.interior_orbits, "verdict": self.verdict}


@dataclass
class Arena:
    oracle: GroupOracle
    radius: int
    interior_radius: int
    graph: Graph
    h_sample: tuple[str, ...]
    boundary: frozenset = field(default_factory=frozenset)
    _keys: dict = field(default_factory=dict, repr=False)

    def rep(self, v: str) -> str:
        return rep_of(v)

    def depth(self, v: str) -> int:
        return len(rep_of(v))

    def is_interior(self, v: str) -> bool:
        return self.depth(v) <= self.interior_radius

    def translate(self, word: str, v: str) -> str:
        """Left translate of a vertex; may lie outside the truncation."""
        return vid(self.oracle.coset(word + rep_of(v)))

    def contains(self, v: str) -> bool:
        return v in self.graph.index

    def vertex_key(self, v: str, elems: Iterable[str] | None = None) -> str:
        """Orbit key: shortlex-least translate over a subgroup sample."""
        if elems is None:
            hit = self._keys.get(v)
            if hit is None:
                hit = self._keys[v] = self.vertex_key(v, self.h_sample)
            return hit
        return min((self.translate(h, v) for h in elems), key=lambda x: shortlex(rep_of(x)))

    def edge_key(self, e, elems: Iterable[str] | None = None) -> tuple[str, str]:
        elems = self.h_sample if elems is None else elems
        best = None
        for h in elems:
            a, b = sorted((self.translate(h, e[0]), self.translate(h, e[1])),
                          key=lambda x: shortlex(rep_of(x)))
            k = (shortlex(rep_of(a)), shortlex(rep_of(b)))
            if best is None or k < best[0]:
                best = (k, (a, b))
        return best[1]

    def edges(self) -> list[tuple[str, str]]:
        g = self.graph
        return [g.edge_names(i, j) for i, j, _ in g.edges]

    def cut(self, vs: Iterable[str]) -> Cut:
        return self.graph.cut(vs)

    def to_json(self) -> dict:
        return {
            "group": self.oracle.name,
            "radius": self.radius,
            "interior_radius": self.interior_radius,
            "base": BASE,
            "vertices": list(self.graph.vertices),
            "edges": [list(e) for e in self.edges()],
            "boundary": sorted(self.boundary, key=lambda x: shortlex(rep_of(x))),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)


def build_coset_graph(oracle: GroupOracle, radius: int, interior_radius: int | None = None,
                      check_confluence: bool = True) -> Arena:
    """Cosets whose canonical representative has length <= radius, joined when
    they differ by an element of HSH or HS^-1H."""
    if radius < 2:
        raise PreconditionError("arena radius must be >= 2")
    if check_confluence:
        oracle.check_confluence(min(2 * radius, 6 if len(oracle.letters) <= 4 else 5))
    r_int = radius - 1 if interior_radius is None else interior_radius
    if not 0 <= r_int <= radius:
        raise PreconditionError("interior radius must lie in [0, radius]")
    reps = sorted({oracle.coset(w) for w in oracle.ball(radius)} - {None}, key=shortlex)
    reps = [r for r in reps if len(r) <= radius]
    hs = oracle.h_ball(2 * radius + 2)
    steps = [oracle.normal_form(s) for s in oracle.s_gens] + [oracle.inv(s) for s in oracle.s_gens]
    have = set(reps)
    edges = set()
    for g in reps:
        for h in hs:
            for s in steps:
                t = oracle.coset(g + h + s)
                if t in have and t != g:
                    edges.add(tuple(sorted((vid(g), vid(t)))))
    verts = [vid(r) for r in reps]
    try:
        graph = Graph(verts, sorted(edges), base=BASE)
    except StructuralError as exc:
        raise InvariantError(f"truncated coset graph of {oracle.name}: {exc}") from None
    for h in oracle.h_gens:
        if oracle.coset(h) != "":
            raise InvariantError(f"H generator {h!r} does not fix the base coset")
    boundary = frozenset(v for v in verts if len(rep_of(v)) == radius)
    return Arena(oracle, radius, r_int, graph, tuple(hs), boundary)


def arena_fixture(name: str, radius: int = 4, interior_radius: int | None = None) -> Arena:
    return build_coset_graph(group_fixture(name), radius, interior_radius)


def _items_depth(arena: Arena, item) -> int:
    if isinstance(item, tuple):
        return max(arena.depth(item[0]), arena.depth(item[1]))
    return arena.depth(item)


def orbit_count(arena: Arena, items: Iterable, elems: Iterable[str] | None = None) -> FinitenessReport:
    """Orbits meeting a set of vertices or edges, counted on the interior and on
    the whole truncation; confirmed when the two counts agree."""
    elems = list(arena.h_sample if elems is None else elems)
    items = list(items)
    key = lambda x: arena.edge_key(x, elems) if isinstance(x, tuple) else arena.vertex_key(x, elems)
    all_keys = {key(x) for x in items}
    inner = {key(x) for x in items if _items_depth(arena, x) <= arena.interior_radius}
    if inner == all_keys:
        return FinitenessReport(True, len(all_keys), len(inner), "confirmed",
                                tuple(sorted(all_keys, key=str)))
    return FinitenessReport(None, len(all_keys), len(inner), "truncation-inconclusive",
                            tuple(sorted(all_keys, key=str)))


def coboundary_edges(arena: Arena, a: Cut) -> list[tuple[str, str]]:
    m = a.bits
    g = arena.graph
    return [g.edge_names(i, j) for i, j, _ in g.edges if ((m >> i) ^ (m >> j)) & 1]


def is_H_finite(arena: Arena, s, elems: Iterable[str] | None = None) -> FinitenessReport:
    """H-orbit count of a vertex set, edge set or (via its coboundary) a Cut."""
    if isinstance(s, Cut):
        s = coboundary_edges(arena, s)
    return orbit_count(arena, s, elems)


def act(arena: Arena, word: str, target: Cut) -> Cut:
    """Left translate of a cut, rebuilt from the translated coboundary.

    The coboundary must stay inside the truncation; the side of each component
    of X - word.δA is read from the translated vertices it contains.
    """
    g = arena.graph
    m = target.bits
    dA = coboundary_edges(arena, target)
    img_edges = set()
    lost = []
    for u, v in dA:
        tu, tv = arena.translate(word, u), arena.translate(word, v)
        for t in (tu, tv):
            if not arena.contains(t):
                lost.append(t)
        img_edges.add(frozenset((tu, tv)))
    if lost:
        raise TruncationError(f"translate by {word!r} leaves the truncation at {sorted(set(lost))}",
                              sorted(set(lost)))
    if not dA:
        if m in (0, g.full):
            return target
        raise PreconditionError("cut with empty coboundary must be trivial in a connected arena")
    # components of X minus the translated coboundary
    adj = {v: set() for v in g.vertices}
    for i, j, _ in g.edges:
        u, v = g.edge_names(i, j)
        if frozenset((u, v)) not in img_edges:
            adj[u].add(v)
            adj[v].add(u)
    side = {}
    for v in g.vertices:
        t = arena.translate(word, v)
        if arena.contains(t):
            side.setdefault(t, v in target)
    comp_of = {}
    out = set()
    for v in g.vertices:
        if v in comp_of:
            continue
        comp = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        for x in comp:
            comp_of[x] = v
        labels = {side[x] for x in comp if x in side}
        if len(labels) > 1:
            raise TruncationError(f"translate by {word!r}: truncation joins both sides", sorted(comp))
        if not labels:
            raise TruncationError(f"translate by {word!r}: component without a preimage", sorted(comp))
        if labels.pop():
            out |= comp
    return g.cut(out)


@dataclass
class Quotient:
    graph: Graph
    projection: dict  # arena vertex -> quotient vertex
    edge_orbits: dict  # quotient edge (sorted pair) -> list of arena edge keys


def quotient_graph(arena: Arena, interior_only: bool = True) -> Quotient:
    """H\\X restricted to vertex orbits whose least representative is interior.

    Parallel edge orbits are merged into capacity; loops are dropped. With
    ``interior_only=False`` every orbit met by the truncation is kept.
    """
    key = {v: arena.vertex_key(v) for v in arena.graph.vertices}
    qverts = sorted({k for k in key.values() if not interior_only or arena.is_interior(k)},
                    key=lambda x: shortlex(rep_of(x)))
    if not qverts:
        raise TruncationError("no vertex orbit closes inside the interior", [])
    qset = set(qverts)
    orbits: dict = {}
    for e in arena.edges():
        ku, kv = key[e[0]], key[e[1]]
        if ku == kv or ku not in qset or kv not in qset:
            continue
        pair = tuple(sorted((ku, kv), key=lambda x: shortlex(rep_of(x))))
        orbits.setdefault(pair, set()).add(arena.edge_key(e))
    edges = [(u, v, len(ks)) for (u, v), ks in sorted(orbits.items())]
    try:
        q = Graph(qverts, edges, base=BASE)
    except StructuralError as exc:
        raise TruncationError(f"quotient is not closed inside the interior: {exc}", []) from None
    proj = {v: k for v, k in key.items() if k in qset}
    return Quotient(q, proj, {p: sorted(ks) for p, ks in orbits.items()})
