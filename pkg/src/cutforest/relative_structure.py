"""Relative structure trees: lifting cuts of H\\X back to X, the Kropholler
corner, the crossing-case table and overlaps of T(H) with its translates."""

from __future__ import annotations

from dataclasses import dataclass, field

from .cut_algebra import (AUT_GUARD, NestedSystem, NotNestedError, automorphisms, corner_analysis,
                          extract_nested_generators, nested_masks, normalize)
from .errors import PreconditionError, TruncationError
from .graph_core import Cut, Graph
from .group_arena import (BASE, Arena, FinitenessReport, Quotient, act, coboundary_edges, orbit_count,
                          quotient_graph, rep_of)
from .groups import shortlex
from .tree_builder import StructureTree, build_tree

CORNERS = ("A&gB", "A&gB*", "A*&gB", "A*&gB*")


@dataclass(frozen=True)
class LiftedCut:
    component: Cut
    parent: Cut  # cut of the quotient
    stabilizer_sample: tuple[str, ...]
    checks: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {"component": _names(self.component), "parent": self.parent.sorted_members(),
                "stabilizer_sample": list(self.stabilizer_sample), "checks": dict(self.checks)}


def _names(c: Cut) -> list[str]:
    return sorted(c.members, key=lambda v: shortlex(rep_of(v)))


def _extend(q_int: Quotient, q_full: Quotient, e: Cut) -> set:
    """Carry a cut of the interior quotient over to every orbit met by the truncation."""
    inside = set(e.members)
    known = set(q_int.graph.vertices)
    g = q_full.graph
    cut_edges = {frozenset(p) for p in _qcob(q_int.graph, e)}
    adj = {v: [] for v in g.vertices}
    for i, j, _ in g.edges:
        u, v = g.edge_names(i, j)
        if frozenset((u, v)) not in cut_edges:
            adj[u].append(v)
            adj[v].append(u)
    out, seen = set(), set()
    for v in g.vertices:
        if v in seen:
            continue
        comp, stack = {v}, [v]
        while stack:
            for y in adj[stack.pop()]:
                if y not in comp:
                    comp.add(y)
                    stack.append(y)
        seen |= comp
        labels = {x in inside for x in comp if x in known}
        if len(labels) != 1:
            raise TruncationError("quotient cut does not extend across the truncation", sorted(comp))
        if labels.pop():
            out |= comp
    return out


def _qcob(g: Graph, e: Cut):
    m = e.bits
    return [g.edge_names(i, j) for i, j, _ in g.edges if ((m >> i) ^ (m >> j)) & 1]


def _same_wall(x: Cut, y: Cut) -> bool:
    return x.bits == y.bits or x.bits == (x.graph.full & ~y.bits)


def lift_cut(arena: Arena, e: Cut, q: Quotient | None = None, q_full: Quotient | None = None,
             stab_radius: int = 4) -> list[LiftedCut]:
    """Components of the preimage of a quotient cut, with the component lemma checked."""
    q = q or quotient_graph(arena)
    q_full = q_full or quotient_graph(arena, interior_only=False)
    if e.graph is not q.graph:
        raise PreconditionError("cut is not a cut of this arena's quotient")
    ext = _extend(q, q_full, e)
    g = arena.graph
    pre = g.mask(v for v in g.vertices if q_full.projection[v] in ext)
    comps = g.components_mask(pre)
    sample = [h for h in arena.h_sample if len(h) <= stab_radius]
    dE = {frozenset(p) for p in _qcob(q.graph, e)}
    out = []
    for cm in comps:
        c = Cut(g, cm)
        stab, disjoint_or_equal = [], True
        for h in sample:
            try:
                hc = act(arena, h, c)
            except TruncationError:
                continue
            if hc == c:
                stab.append(h)
            elif hc.bits & cm:
                # overlap inside the ball is only a violation away from the boundary
                if any(arena.is_interior(v) for v in (hc & c).members):
                    disjoint_or_equal = False
        reached = 0  # components of the preimage met by H-translates of c
        for h in arena.h_sample:
            for v in c.members:
                t = arena.translate(h, v)
                if arena.contains(t):
                    reached |= 1 << g.index[t]
        proj = set()
        for u, v in coboundary_edges(arena, c):
            pu, pv = q_full.projection[u], q_full.projection[v]
            proj.add(frozenset((pu, pv)))
        checks = {
            "disjoint_or_equal": disjoint_or_equal,
            "orbit_covers_preimage": all(reached & d for d in comps),
            "coboundary_projects_onto": proj == dE,
            "complement_connected": g.is_connected_mask(g.full & ~cm),
        }
        out.append(LiftedCut(c, e, tuple(stab), checks))
    return out


@dataclass
class RelativeSystem:
    arena: Arena
    quotient: Quotient
    quotient_system: NestedSystem
    lifts: list
    system: NestedSystem
    tree: StructureTree
    max_interval: int = 0

    def walls(self) -> list[Cut]:
        return list(self.system.members)

    def diameter(self) -> int:
        t = self.tree
        best = 0
        for s in range(len(t)):
            for u in range(s + 1, len(t)):
                best = max(best, t.distance(s, u))
        return best

    def to_json(self) -> dict:
        return {"quotient": self.quotient.graph.to_json(),
                "quotient_system": self.quotient_system.to_json(),
                "walls": [_names(c) for c in self.system.members],
                "tree": self.tree.to_json(), "diameter": self.diameter(),
                "max_interval": self.max_interval}


def quotient_generators(q: Graph, n: int) -> NestedSystem:
    auts = automorphisms(q) if len(q) <= AUT_GUARD else [tuple(range(len(q)))]
    return extract_nested_generators(q, n, auts)


def relative_nested_system(arena: Arena, n: int) -> RelativeSystem:
    """Lifts of the base-avoiding side of every member of E_n(H\\X)."""
    q = quotient_graph(arena)
    q_full = quotient_graph(arena, interior_only=False)
    en = quotient_generators(q.graph, n)
    lifts = []
    for e in en.members:
        lifts += lift_cut(arena, e, q, q_full)
    masks = sorted({normalize(arena.graph, lc.component.bits) for lc in lifts})
    system = NestedSystem(arena.graph, masks, level=n)
    # finite interval condition: count members strictly between nested pairs
    full = arena.graph.full
    halves = masks + [full & ~m for m in masks]
    worst = 0
    for x in halves:
        for y in halves:
            if x != y and x & ~y == 0:
                worst = max(worst, sum(1 for z in halves if z not in (x, y)
                                       and x & ~z == 0 and z & ~y == 0))
    tree = build_tree(system)
    return RelativeSystem(arena, q, en, lifts, system, tree, worst)


# --- Kropholler corner -------------------------------------------------------

@dataclass(frozen=True)
class KrophollerReport:
    corner: Cut
    corners: dict
    nested: bool
    hk_sample: tuple[str, ...]
    finiteness: FinitenessReport

    def to_json(self) -> dict:
        return {"kropholler_corner": _names(self.corner),
                "corners": {k: _names(v) for k, v in self.corners.items()},
                "nested": self.nested, "hk_sample": list(self.hk_sample),
                "finiteness": self.finiteness.to_json()}


def hk_sample(arena: Arena, g: str) -> list[str]:
    """Sampled elements of H ∩ gHg^-1."""
    return [h for h in arena.h_sample if arena.oracle.in_conjugate(h, g)]


def sweep_pairs(arena: Arena, walls, words):
    """(g, A, B, gB) over the word set with o in gB*, go in A* and A∩gB nonempty.

    Translates leaving the truncation are skipped; their number is returned too.
    """
    out, lost = [], 0
    for g in words:
        go = arena.translate(g, BASE)
        if not arena.contains(go):
            continue
        for b in walls:
            try:
                gb = act(arena, g, b)
            except TruncationError:
                lost += 1
                continue
            if BASE in gb:
                continue
            for a in walls:
                if go not in a and a.bits & gb.bits:
                    out.append((g, a, b, gb))
    return out, lost


def _check_positions(arena: Arena, a: Cut, gb: Cut, g: str) -> str:
    go = arena.translate(g, BASE)
    if not arena.contains(go):
        raise TruncationError(f"go = {go} lies outside the truncation", [go])
    failed = []
    if BASE in gb:
        failed.append("o in gB*")
    if go in a:
        failed.append("go in A*")
    if failed:
        raise PreconditionError("precondition failed: " + ", ".join(failed))
    return go


def kropholler_corner(arena: Arena, a: Cut, b: Cut, g: str, gb: Cut | None = None
                      ) -> KrophollerReport:
    """The corner A ∩ gB and the (H ∩ gHg^-1)-orbit count of its coboundary."""
    gb = act(arena, g, b) if gb is None else gb
    _check_positions(arena, a, gb, g)
    rep = corner_analysis(a, gb)
    corner = rep.corners[0]
    elems = hk_sample(arena, g)
    fin = orbit_count(arena, coboundary_edges(arena, corner), elems)
    return KrophollerReport(corner, dict(zip(CORNERS, rep.corners)), rep.nested, tuple(elems), fin)


# --- crossing cases ----------------------------------------------------------

# Allowed outcomes per (corner of o, corner of go), with the Kropholler corner
# A∩gB nonempty. Each outcome: (nonzero counts, empty corner or "A=gB").
CASE_TABLE = {
    ("A&gB*", "A*&gB"): [({"a": 1, "c": 1}, "A*&gB*")],
    ("A*&gB*", "A*&gB"): [({"a": 1, "d": 1}, "A&gB*")],
    ("A&gB*", "A*&gB*"): [({"b": 1, "c": 1}, "A*&gB")],
    ("A*&gB*", "A*&gB*"): [({"a": 1, "d": 1}, "A&gB*"), ({"b": 1, "c": 1}, "A*&gB"),
                           ({"f": 1}, "A=gB")],
}

# corner pairs joined by each label
_LABELS = {
    frozenset(("A&gB", "A*&gB")): "a", frozenset(("A&gB*", "A*&gB*")): "b",
    frozenset(("A&gB", "A&gB*")): "c", frozenset(("A*&gB", "A*&gB*")): "d",
    frozenset(("A&gB*", "A*&gB")): "e", frozenset(("A&gB", "A*&gB*")): "f",
}


@dataclass(frozen=True)
class CrossingCase:
    counts: dict
    o_corner: str
    go_corner: str
    empty: tuple[str, ...]
    verdict: str
    nested: bool
    table_match: bool

    @property
    def sums_ok(self) -> bool:
        c = self.counts
        return c["a"] + c["e"] + c["f"] + c["b"] == 1 and c["c"] + c["e"] + c["f"] + c["d"] == 1

    def to_json(self) -> dict:
        return {"counts": dict(self.counts), "o": self.o_corner, "go": self.go_corner,
                "empty": list(self.empty), "verdict": self.verdict, "nested": self.nested,
                "sums_ok": self.sums_ok, "table_match": self.table_match}


def _corner_of(a: Cut, gb: Cut, v: str) -> str:
    return CORNERS[(0 if v in a else 2) + (0 if v in gb else 1)]


def crossing_case(arena: Arena, a: Cut, gb: Cut, g: str, system: NestedSystem | None = None
                  ) -> CrossingCase:
    """Count member pairs joining the corners of A and gB.

    The pairs are those of the tree on {A, gB} together with every member of
    ``system`` nested with both; a pair is counted under the label of the two
    corners its endpoints lie in.
    """
    go = _check_positions(arena, a, gb, g)
    if not a.bits & gb.bits:
        raise PreconditionError("Kropholler corner A∩gB is empty")
    rep = corner_analysis(a, gb)
    empty = tuple(n for n, e in zip(CORNERS, rep.empty) if e)
    o_c, go_c = _corner_of(a, gb, BASE), _corner_of(a, gb, go)
    counts = dict.fromkeys("abcdef", 0)
    if not rep.nested:
        return CrossingCase(counts, o_c, go_c, empty, "crossing", False, False)
    full = arena.graph.full
    extra = []
    if system is not None:
        extra = [m for m in system.masks
                 if nested_masks(m, a.bits, full) and nested_masks(m, gb.bits, full)]
    sysm = NestedSystem(arena.graph, [a.bits, gb.bits] + extra, check=True)
    tree = build_tree(sysm)
    ka, kb = sysm.pair_index(a), sysm.pair_index(gb)
    pick_a = sysm.masks[ka] == a.bits
    pick_b = sysm.masks[kb] == gb.bits

    def corner(t):
        ch = tree.vertices[t].choice
        in_a, in_b = ch[ka] == pick_a, ch[kb] == pick_b
        return CORNERS[(0 if in_a else 2) + (0 if in_b else 1)]

    for k, (i, j) in tree.edges.items():
        ci, cj = corner(i), corner(j)
        if ci != cj:
            counts[_LABELS[frozenset((ci, cj))]] += 1
    if a.bits == gb.bits:
        verdict = "A=gB"
    else:
        verdict = empty[0] + "=∅"
    outcome_empty = "A=gB" if verdict == "A=gB" else empty[0]
    nz = {k: v for k, v in counts.items() if v}
    match = any(nz == want and e == outcome_empty for want, e in CASE_TABLE.get((o_c, go_c), []))
    return CrossingCase(counts, o_c, go_c, empty, verdict, True, match)


# --- overlaps and the assembled G-tree --------------------------------------

def _translate_walls(arena: Arena, word: str, walls):
    out, lost = [], []
    for c in walls:
        try:
            out.append(act(arena, word, c))
        except TruncationError as exc:
            lost.append((c, exc.lost))
    return out, lost


@dataclass
class OverlapReport:
    red: list
    blue: list
    brown: list
    unresolved: int  # walls too close to the truncation to classify
    brown_subtree: bool
    brown_stabilizers_hk_finite: bool
    geodesic: list
    tree: StructureTree

    def to_json(self) -> dict:
        return {"red": [_names(c) for c in self.red], "blue": [_names(c) for c in self.blue],
                "brown": [_names(c) for c in self.brown], "unresolved": self.unresolved,
                "brown_subtree": self.brown_subtree,
                "brown_stabilizers_hk_finite": self.brown_stabilizers_hk_finite,
                "geodesic": [_names(c) for c in self.geodesic]}

    def to_dot(self) -> str:
        colour = {}
        for name, cs in (("red", self.red), ("blue", self.blue), ("brown", self.brown)):
            for c in cs:
                colour[normalize(c.graph, c.bits)] = name
        t = self.tree
        lines = ["graph overlap {"]
        for v in range(len(t)):
            pre = ",".join(t.preimage(v))
            lines.append(f'  t{v} [label="{pre}"{"" if pre else ", shape=point"}];')
        for k, (i, j) in sorted(t.edges.items()):
            lines.append(f"  t{i} -- t{j} [color={colour.get(t.system.masks[k], 'gray')}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def stabilizer_classes(arena: Arena, wall: Cut, words, mod) -> int:
    """Classes of sampled stabiliser elements of a wall, x ~ y when x y^-1
    passes ``mod``. Translates leaving the truncation are not sampled."""
    G = arena.oracle
    reps: list[str] = []
    for x in words:
        try:
            y = act(arena, x, wall)
        except TruncationError:
            continue
        if _same_wall(y, wall) and not any(mod(G.mul(x, G.inv(r))) for r in reps):
            reps.append(x)
    return len(reps)


def stabilizer_finite(arena: Arena, wall: Cut, mod, radius: int) -> tuple[bool, int]:
    """Whether the class count is the same at ``radius`` and ``radius`` + 1."""
    G = arena.oracle
    small = stabilizer_classes(arena, wall, G.ball(radius), mod)
    big = stabilizer_classes(arena, wall, G.ball(radius + 1), mod)
    return small == big, big


def _reliable(arena: Arena, c: Cut, margin: int) -> bool:
    lim = arena.interior_radius - margin
    return all(arena.depth(v) <= lim for e in coboundary_edges(arena, c) for v in e)


def tree_overlap(arena: Arena, g: str, n: int, rel: RelativeSystem | None = None,
                 stab_radius: int = 3) -> OverlapReport:
    """Walls of T(H) only (red), of gT(H) = T(gHg^-1) only (blue), and of both (brown).

    Only walls whose coboundary stays |g| inside the interior are classified.
    """
    rel = rel or relative_nested_system(arena, n)
    G = arena.oracle
    margin = len(G.normal_form(g))
    mine = rel.walls()
    theirs, _ = _translate_walls(arena, g, mine)
    key = lambda c: normalize(arena.graph, c.bits)
    km = {key(c): c for c in mine if _reliable(arena, c, margin)}
    kt = {key(c): c for c in theirs if _reliable(arena, c, margin)}
    unresolved = len(mine) - len(km) + len(theirs) - len(kt)
    red = [km[k] for k in sorted(km) if k not in kt]
    blue = [kt[k] for k in sorted(kt) if k not in km]
    brown = [km[k] for k in sorted(km) if k in kt]
    union = NestedSystem(arena.graph, sorted(set(km) | set(kt)), level=n)
    tree = build_tree(union)
    bk = {union.pair_index(c) for c in brown}
    verts = {v for k in bk for v in tree.edges[k]}
    ok = True
    if verts:
        start = next(iter(verts))
        seen, stack = {start}, [start]
        while stack:
            u = stack.pop()
            for w, k in tree.adj[u]:
                if k in bk and w not in seen:
                    seen.add(w)
                    stack.append(w)
        ok = seen == verts
    hk = lambda w: G.in_H(w) and G.in_conjugate(w, g)
    finite = all(stabilizer_finite(arena, c, hk, stab_radius)[0] for c in brown)
    go = arena.translate(g, BASE)
    geo = []
    if arena.contains(go):
        geo = [Cut(arena.graph, m) for m in union.masks
               if (BASE in Cut(arena.graph, m)) != (go in Cut(arena.graph, m))]
    return OverlapReport(red, blue, brown, unresolved, ok, finite, geo, tree)


@dataclass
class GTree:
    system: NestedSystem
    tree: StructureTree
    lost: int
    fixed_vertices: list
    vertex_orbits: int
    image_orbits: int
    edge_stabilizers: dict  # pair index -> (stable, classes mod H)

    @property
    def nontrivial(self) -> bool:
        return not self.fixed_vertices

    def to_json(self) -> dict:
        return {"walls": [_names(c) for c in self.system.members], "tree": self.tree.to_json(),
                "lost_translates": self.lost, "fixed_vertices": self.fixed_vertices,
                "vertex_orbits": self.vertex_orbits, "image_vertex_orbits": self.image_orbits,
                "edge_stabilizers": {str(k): {"h_finite": v[0], "classes": v[1]}
                                     for k, v in self.edge_stabilizers.items()}}


def _wall_image(arena: Arena, sysm: NestedSystem, x: str, k: int):
    """(l, flipped) with x.(member k) = member l, or its complement when flipped."""
    try:
        y = act(arena, x, Cut(arena.graph, sysm.masks[k]))
    except TruncationError:
        return None
    l = sysm.pair_index(y)
    if l is None:
        return None
    return l, sysm.masks[l] != y.bits


def act_on_vertex(tree: StructureTree, images, t: int) -> int | None:
    """x.t when the computable wall images single out one tree vertex."""
    v = tree.vertices[t].choice
    want = {}
    for k, im in enumerate(images):
        if im is not None:
            l, flip = im
            want[l] = v[k] != flip
    hits = [u for u, w in enumerate(tree.vertices) if all(w.choice[l] == b for l, b in want.items())]
    return hits[0] if len(hits) == 1 else None


def assemble_g_nested(arena: Arena, n: int, words=None, rel: RelativeSystem | None = None,
                      stab_radius: int = 3) -> GTree:
    """Union of the translates w.E_n(H, X) over a word set, checked nested, with its tree."""
    G = arena.oracle
    rel = rel or relative_nested_system(arena, n)
    words = sorted(set(words) if words is not None else set(G.ball(2)), key=shortlex)
    walls = {}
    lost = 0
    for w in words:
        got, ls = _translate_walls(arena, w, rel.walls())
        lost += len(ls)
        for c in got:
            m = normalize(arena.graph, c.bits)
            if m and m != arena.graph.full:
                walls.setdefault(m, c)
    sysm = NestedSystem(arena.graph, sorted(walls), level=n)  # raises NotNestedError with witness
    tree = build_tree(sysm)
    gens = [G.normal_form(s) for s in G.s_gens] + [G.normal_form(h) for h in G.h_gens]
    gens = [x for x in dict.fromkeys(gens + [G.inv(x) for x in gens]) if x]
    images = {x: [_wall_image(arena, sysm, x, k) for k in range(len(sysm))] for x in gens}
    moves = {x: [act_on_vertex(tree, images[x], t) for t in range(len(tree))] for x in gens}
    fixed = [t for t in range(len(tree)) if all(moves[x][t] == t for x in gens)]
    parent = list(range(len(tree)))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for x in gens:
        for t, u in enumerate(moves[x]):
            if u is not None:
                parent[find(t)] = find(u)
    orbits = len({find(t) for t in range(len(tree))})
    image_orbits = len({find(t) for t in tree.image()})
    stabs = {}
    for k in range(len(sysm)):
        c = Cut(arena.graph, sysm.masks[k])
        if _reliable(arena, c, 0):
            stabs[k] = stabilizer_finite(arena, c, G.in_H, stab_radius)
    return GTree(sysm, tree, lost, fixed, orbits, image_orbits, stabs)
