"""The metric space of almost-equal sets, its graph, the Sageev graph of a
half-space system, Gromov products and integer tree reconstruction.

A point of M is stored as the finite set of coset labels on which it differs
from a fixed reference set; the reference set itself is never built.

Conventions follow the rest of the package: H-cosets are left cosets gH
(arena vertices) and G acts on the left.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import networkx as nx

from .cut_algebra import nested_masks
from .errors import DomainError, InvariantError, PreconditionError, TruncationError
from .graph_core import bits_of, check_guard
from .group_arena import Arena, FinitenessReport, act, rep_of, vid
from .groups import GroupOracle, shortlex
from .pocset import consistent_orientations, flip_edges, principal
from .tree_builder import OrientationVertex

BALL_RADIUS_GUARD = 4
BALL_LABEL_GUARD = 12
WALL_GUARD = 16
PALETTE = ("red", "blue", "darkgreen", "orange", "purple", "brown",
           "magenta", "cyan", "gold", "gray40", "navy", "olive")


@dataclass(frozen=True)
class MetricPoint:
    base: str
    delta: frozenset
    flag: str = field(default="", compare=False)

    def flip(self, *labels) -> "MetricPoint":
        return MetricPoint(self.base, self.delta.symmetric_difference(labels))

    def __repr__(self):
        inner = ",".join(sorted(map(str, self.delta)))
        return f"{self.base}+{{{inner}}}"


def point(base: str = "A", labels: Iterable = ()) -> MetricPoint:
    return MetricPoint(base, frozenset(labels))


def metric_d(p: MetricPoint, q: MetricPoint) -> int:
    if p.base != q.base:
        raise DomainError(f"points over different reference sets {p.base!r} and {q.base!r}")
    return len(p.delta ^ q.delta)


def relabel(p: MetricPoint, f: Callable) -> MetricPoint:
    """Push a point through a map on labels (e.g. translation by a group element)."""
    return MetricPoint(p.base, frozenset(f(x) for x in p.delta))


# -- the graph Gamma --------------------------------------------------------

def gamma_ball(center: MetricPoint, radius: int, universe: Iterable) -> nx.Graph:
    """Points within ``radius`` of ``center`` differing from it only on
    ``universe``; edges join points at distance one and carry that label."""
    labels = sorted(set(universe), key=str)
    check_guard(radius, BALL_RADIUS_GUARD, "gamma ball radius")
    check_guard(len(labels), BALL_LABEL_GUARD, "gamma ball label count")
    if radius < 0:
        raise DomainError("radius must be >= 0")
    G = nx.Graph()
    for k in range(min(radius, len(labels)) + 1):
        for s in itertools.combinations(labels, k):
            G.add_node(center.flip(*s))
    for p in list(G.nodes):
        for x in labels:
            q = p.flip(x)
            if q in G and not G.has_edge(p, q):
                G.add_edge(p, q, label=x)
    G.graph["center"] = center
    G.graph["labels"] = tuple(labels)
    return G


def geodesics(G: nx.Graph, p: MetricPoint, q: MetricPoint) -> list[list[MetricPoint]]:
    """Every shortest path from p to q in the ball, by exhaustive search."""
    n = metric_d(p, q)
    out = []
    path = [p]

    def rec(u):
        if u == q:
            out.append(list(path))
            return
        for w in G.neighbors(u):
            if metric_d(w, q) < metric_d(u, q):
                path.append(w)
                rec(w)
                path.pop()

    rec(p)
    if any(len(x) != n + 1 for x in out):
        raise InvariantError("a monotone path has the wrong length")
    return out


def geodesic_cube(G, p, q) -> tuple[int, int, int]:
    """(d(p, q), number of geodesics, number of vertices they visit)."""
    paths = geodesics(G, p, q)
    verts = {v for path in paths for v in path}
    return metric_d(p, q), len(paths), len(verts)


@dataclass(frozen=True)
class Hyperplane:
    label: object
    edges: tuple
    inside: frozenset   # points whose delta holds the label
    outside: frozenset
    separates: bool     # removal leaves exactly the declared sides

    def to_json(self) -> dict:
        return {"label": str(self.label), "edges": len(self.edges),
                "inside": len(self.inside), "outside": len(self.outside),
                "separates": self.separates}


def hyperplane(G: nx.Graph, label) -> Hyperplane:
    if label not in G.graph.get("labels", ()):
        raise DomainError(f"label {label!r} is not in the ball's universe")
    es = tuple(sorted(((u, w) for u, w, x in G.edges(data="label") if x == label),
                      key=lambda e: (sorted(map(str, e[0].delta)), sorted(map(str, e[1].delta)))))
    inside = frozenset(p for p in G if label in p.delta)
    outside = frozenset(G.nodes) - inside
    H = G.copy()
    H.remove_edges_from(es)
    comps = {frozenset(c) for c in nx.connected_components(H)}
    declared = {s for s in (inside, outside) if s}
    return Hyperplane(label, es, inside, outside, comps == declared)


def gamma_to_dot(G: nx.Graph, name: str = "Gamma") -> str:
    colour = {x: PALETTE[i % len(PALETTE)] for i, x in enumerate(G.graph.get("labels", ()))}
    ids = {p: f"p{i}" for i, p in enumerate(sorted(G, key=lambda p: (len(p.delta), repr(p))))}
    lines = [f"graph {name} {{"]
    for p, i in ids.items():
        lines.append(f'  {i} [label="{p!r}"];')
    for u, w, x in sorted(G.edges(data="label"), key=lambda e: (ids[e[0]], ids[e[1]])):
        a, b = sorted((ids[u], ids[w]))
        lines.append(f'  {a} -- {b} [color={colour[x]}, label="{x}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- half-space systems and the Sageev graph --------------------------------

class AmbiguousInclusionError(TruncationError):
    """Two walls relate differently on the decision points and on a larger check set."""


def _relation(a: int, b: int, universe: int) -> tuple[bool, ...]:
    na, nb = universe & ~a, universe & ~b
    return (not a & b, not a & nb, not na & b, not na & nb)


@dataclass
class HalfSpaceSystem:
    """Walls ``(label, mask)`` over a finite set of points.

    The mask is one half-space; the other is its complement in ``universe``.
    Inclusion between listed half-spaces is mask inclusion.
    """

    points: tuple[str, ...]
    walls: tuple[tuple[str, int], ...]
    base_point: int = 0
    name: str = "A"
    dropped: tuple = ()
    rejected: tuple = ()

    def __post_init__(self):
        full = self.universe
        seen = {}
        for lab, m in self.walls:
            if not (0 < m < full) or m & ~full:
                raise DomainError(f"wall {lab!r} is not a proper subset of the points")
            key = min(m, full & ~m)
            if key in seen:
                raise DomainError(f"walls {seen[key]!r} and {lab!r} coincide")
            seen[key] = lab
        if not 0 <= self.base_point < len(self.points):
            raise DomainError("base point out of range")

    @property
    def universe(self) -> int:
        return (1 << len(self.points)) - 1

    def __len__(self):
        return len(self.walls)

    @property
    def labels(self) -> tuple:
        return tuple(lab for lab, _ in self.walls)

    def pairs(self) -> list[tuple[int, int]]:
        full = self.universe
        return [(m, full & ~m) for _, m in self.walls]

    def includes(self, k: int, s: bool, l: int, t: bool) -> bool:
        """Whether half-space (k, s) lies inside half-space (l, t)."""
        h = self.pairs()
        a, b = h[k][0 if s else 1], h[l][0 if t else 1]
        return a & ~b == 0

    def all_nested(self) -> bool:
        ms = [m for _, m in self.walls]
        return all(nested_masks(x, y, self.universe) for x, y in itertools.combinations(ms, 2))

    def to_json(self) -> dict:
        return {"name": self.name, "points": list(self.points),
                "base": self.points[self.base_point],
                "walls": [{"label": lab, "half": [self.points[i] for i in bits_of(m)]}
                          for lab, m in self.walls],
                "dropped": list(self.dropped), "rejected": [list(p) for p in self.rejected]}

    @classmethod
    def from_sets(cls, points: Sequence[str], walls: Sequence[tuple[str, Iterable[str]]],
                  base=None, name="A") -> "HalfSpaceSystem":
        idx = {p: i for i, p in enumerate(points)}
        ws = []
        for lab, half in walls:
            m = 0
            for x in half:
                m |= 1 << idx[x]
            ws.append((lab, m))
        return cls(tuple(points), tuple(ws), idx[base] if base is not None else 0, name)

    @classmethod
    def from_membership(cls, points: Sequence[str], check: Sequence[str], candidates,
                        base, name="A", strict=True) -> "HalfSpaceSystem":
        """``candidates`` yields ``(label, member)`` with ``member(x) -> bool | None``.

        Walls are decided on ``points`` and their pairwise relations re-checked
        on ``points + check``; a change is a truncation ambiguity.
        """
        allp = list(points) + [x for x in check if x not in set(points)]
        n = len(points)
        full, big = (1 << n) - 1, (1 << len(allp)) - 1
        kept, dropped, known = [], [], []
        seen = set()
        for lab, member in candidates:
            vals = [member(x) for x in allp]
            if any(v is None for v in vals[:n]):
                dropped.append((lab, "outside truncation"))
                continue
            m = sum(1 << i for i, v in enumerate(vals[:n]) if v)
            if not 0 < m < full:
                dropped.append((lab, "not proper on the points"))
                continue
            key = min(m, full & ~m)
            if key in seen:
                dropped.append((lab, "repeats a listed wall"))
                continue
            seen.add(key)
            kn = sum(1 << i for i, v in enumerate(vals) if v is not None)
            mb = sum(1 << i for i, v in enumerate(vals) if v)
            kept.append((lab, m, mb, kn))
        bad = []
        for (la, ma, xa, ka), (lb, mb_, xb, kb) in itertools.combinations(kept, 2):
            dom = ka & kb & big
            if _relation(ma, mb_, full) != _relation(xa & dom, xb & dom, dom):
                bad.append((la, lb))
        if bad and strict:
            raise AmbiguousInclusionError(
                f"{len(bad)} wall pair(s) relate differently past the decision points",
                bad)
        drop = {b for _, b in bad}
        walls = tuple((lab, m) for lab, m, _, _ in kept if lab not in drop)
        return cls(tuple(points), walls, list(points).index(base), name,
                   tuple(dropped), tuple(bad))


def from_arena(arena: Arena, a, words: Iterable[str], strict=True, name="A") -> HalfSpaceSystem:
    """Walls w.a for the given words; decided on interior vertices, checked on all."""
    pts = [v for v in arena.graph.vertices if arena.is_interior(v)]
    rest = [v for v in arena.graph.vertices if not arena.is_interior(v)]

    def cands():
        for w in sorted(set(words), key=shortlex):
            try:
                c = act(arena, w, a)
            except TruncationError:
                yield vid(w), lambda x: None
                continue
            yield vid(w), (lambda c: lambda x: x in c)(c)

    return HalfSpaceSystem.from_membership(pts, rest, cands(), "o", name, strict)


def from_group(oracle: GroupOracle, member: Callable[[str], bool | None], words: Iterable[str],
               radius: int, strict=True, name="A") -> HalfSpaceSystem:
    """Walls gA over the group ball of the given radius, with A given by ``member``.

    y lies in gA when g^-1 y lies in A. Relations are re-checked one step out.
    """
    pts = [vid(w) for w in oracle.ball(radius)]
    more = [vid(w) for w in oracle.ball(radius + 1) if vid(w) not in set(pts)]

    def cands():
        for g in sorted({oracle.normal_form(w) for w in words}, key=shortlex):
            gi = oracle.inv(g)
            yield vid(g), (lambda gi: lambda y: member(oracle.mul(gi, rep_of(y))))(gi)

    return HalfSpaceSystem.from_membership(pts, more, cands(), "o", name, strict)


@dataclass(frozen=True)
class SageevVertex(OrientationVertex):
    points: tuple[str, ...] = ()   # points whose principal orientation this is

    @property
    def principal(self) -> bool:
        return bool(self.points)


def sageev_vertices(sys: HalfSpaceSystem) -> list[SageevVertex]:
    """Orientations picking one half of every wall, closed upward under inclusion."""
    check_guard(len(sys), WALL_GUARD, "wall count")
    pairs = sys.pairs()
    orients = consistent_orientations(pairs)
    hits: dict = {}
    for i, x in enumerate(sys.points):
        hits.setdefault(principal(pairs, i), []).append(x)
    return [SageevVertex(o, tuple(hits.get(o, ()))) for o in orients]


@dataclass
class SageevGraph:
    system: HalfSpaceSystem
    vertices: list[SageevVertex]
    edges: list[tuple[int, int, int]]
    base: int
    component: frozenset

    def graph(self, component_only=True) -> nx.Graph:
        G = nx.Graph()
        keep = self.component if component_only else range(len(self.vertices))
        G.add_nodes_from(keep)
        G.add_edges_from((i, j, {"wall": k}) for i, j, k in self.edges if i in G and j in G)
        return G

    def is_tree(self) -> bool:
        return nx.is_tree(self.graph())

    def to_json(self) -> dict:
        return {"vertices": [{"id": i, "points": list(v.points), "component": i in self.component}
                             for i, v in enumerate(self.vertices)],
                "edges": [[i, j, self.system.labels[k]] for i, j, k in self.edges],
                "base": self.base}


def sageev_graph(sys: HalfSpaceSystem) -> SageevGraph:
    verts = sageev_vertices(sys)
    edges = flip_edges([v.choice for v in verts])
    base_o = principal(sys.pairs(), sys.base_point)
    base = next(i for i, v in enumerate(verts) if v.choice == base_o)
    G = nx.Graph()
    G.add_nodes_from(range(len(verts)))
    G.add_edges_from((i, j) for i, j, _ in edges)
    comp = frozenset(nx.node_connected_component(G, base))
    return SageevGraph(sys, verts, edges, base, comp)


def vertex_to_set(v: OrientationVertex, sys: HalfSpaceSystem, sg: SageevGraph | None = None
                  ) -> MetricPoint:
    """The point A_V: it differs from the reference set exactly on the labels of
    the walls where V disagrees with the base point's principal orientation."""
    if len(v.choice) != len(sys):
        raise DomainError("orientation does not belong to this system")
    base = principal(sys.pairs(), sys.base_point)
    delta = frozenset(lab for (lab, _), x, y in zip(sys.walls, v.choice, base) if x != y)
    flag = ""
    if sg is not None:
        i = next((i for i, w in enumerate(sg.vertices) if w.choice == v.choice), None)
        if i is None or i not in sg.component:
            flag = "outside principal component"
    return MetricPoint(sys.name, delta, flag)


@dataclass(frozen=True)
class SageevReport:
    vertices: int
    component: int
    principal_in_component: bool
    injective: bool
    adjacency: bool
    distance: bool
    nested: bool
    tree: bool | None   # None when the walls are not all nested

    @property
    def ok(self) -> bool:
        return (self.principal_in_component and self.injective and self.adjacency
                and self.distance and self.tree is not False)

    def to_json(self) -> dict:
        return dict(self.__dict__, ok=self.ok)


def sageev_check(sys: HalfSpaceSystem) -> SageevReport:
    sg = sageev_graph(sys)
    comp = sorted(sg.component)
    img = {i: vertex_to_set(sg.vertices[i], sys) for i in comp}
    injective = len(set(img.values())) == len(comp)
    G = sg.graph()
    adjacency = all((metric_d(img[i], img[j]) == 1) == G.has_edge(i, j)
                    for i, j in itertools.combinations(comp, 2))
    dist = dict(nx.all_pairs_shortest_path_length(G))
    distance = all(dist[i][j] == metric_d(img[i], img[j]) for i in comp for j in comp)
    pic = all(i in sg.component for i, v in enumerate(sg.vertices) if v.principal)
    nested = sys.all_nested()
    return SageevReport(len(sg.vertices), len(comp), pic, injective, adjacency, distance,
                        nested, nx.is_tree(G) if nested else None)


# -- Gromov products and integer trees --------------------------------------

def gromov_product(a: MetricPoint, b: MetricPoint, c: MetricPoint) -> Fraction:
    """(b.c)_a."""
    return Fraction(metric_d(a, b) + metric_d(a, c) - metric_d(b, c), 2)


def _matrix(points, metric) -> list[list[int]]:
    if metric is None:
        metric = metric_d
    return [[metric(p, q) for q in points] for p in points]


@dataclass(frozen=True)
class HyperbolicityReport:
    ok: bool
    witness: tuple | None   # (a, b, c, d) indices of the worst violation
    deficit: Fraction       # min{(b.d)_a, (c.d)_a} - (b.c)_a at the witness

    def to_json(self) -> dict:
        return {"ok": self.ok, "witness": self.witness, "deficit": str(self.deficit)}


def zero_hyperbolicity_check(points: Sequence, metric=None, matrix=None) -> HyperbolicityReport:
    """Exhaustive four-point check of (b.c)_a >= min{(b.d)_a, (c.d)_a}."""
    d = matrix if matrix is not None else _matrix(points, metric)
    n = len(d)
    if n < 4:
        raise DomainError("need at least four points")
    worst, wit = 0, None
    for a in range(n):
        da = d[a]
        for b, c, e in itertools.permutations([i for i in range(n) if i != a], 3):
            # doubled products stay integral
            bc = da[b] + da[c] - d[b][c]
            be = da[b] + da[e] - d[b][e]
            ce = da[c] + da[e] - d[c][e]
            gap = min(be, ce) - bc
            if gap > worst:
                worst, wit = gap, (a, b, c, e)
    return HyperbolicityReport(wit is None, wit, Fraction(worst, 2))


@dataclass
class ZTree:
    graph: nx.Graph          # unit-length edges; point nodes are ("p", i)
    embed: list              # point index -> node
    order: tuple[int, ...]

    def distance_matrix(self) -> list[list[int]]:
        sp = {u: nx.single_source_shortest_path_length(self.graph, u) for u in set(self.embed)}
        return [[sp[u][w] for w in self.embed] for u in self.embed]

    def branch_vertices(self) -> list:
        return sorted((u for u in self.graph if self.graph.degree(u) > 2), key=str)

    def skeleton(self) -> nx.Graph:
        """The tree with degree-2 nodes carrying no point suppressed; edge lengths kept."""
        keep = set(self.embed) | {u for u in self.graph if self.graph.degree(u) != 2}
        S = nx.Graph()
        S.add_nodes_from(keep)
        for u in keep:
            for w in self.graph.neighbors(u):
                prev, cur, length = u, w, 1
                while cur not in keep:
                    nxt = next(x for x in self.graph.neighbors(cur) if x != prev)
                    prev, cur, length = cur, nxt, length + 1
                S.add_edge(u, cur, length=length)
        return S

    def to_json(self) -> dict:
        S = self.skeleton()
        name = {u: f"p{u[1]}" if u[0] == "p" else f"s{u[1]}" for u in S}
        return {"points": [name[u] for u in self.embed],
                "edges": sorted([name[u], name[w], l] for u, w, l in S.edges(data="length")),
                "branch": [name[u] for u in self.branch_vertices() if u in name],
                "distances": self.distance_matrix()}


def build_z_tree(points: Sequence, metric=None, order: Sequence[int] | None = None,
                 matrix=None) -> ZTree:
    """Integer tree holding the points isometrically, by insertion in ``order``.

    Each new point hangs off the geodesic from the first inserted point r to
    the earlier point y maximizing (x.y)_r, at distance (x.y)_r from r.
    """
    d = matrix if matrix is not None else _matrix(points, metric)
    n = len(d)
    if n == 0:
        raise DomainError("no points")
    if n >= 4:
        rep = zero_hyperbolicity_check(points, matrix=d)
        if not rep.ok:
            raise PreconditionError(f"metric is not 0-hyperbolic; witness quadruple {rep.witness}")
    order = tuple(range(n)) if order is None else tuple(order)
    if sorted(order) != list(range(n)):
        raise DomainError("order must be a permutation of the point indices")
    T = nx.Graph()
    embed: list = [None] * n
    fresh = itertools.count()
    r = order[0]
    embed[r] = ("p", r)
    T.add_node(embed[r])

    def attach(node, length, i):
        cur = node
        for k in range(length):
            nxt = ("p", i) if k == length - 1 else ("s", next(fresh))
            T.add_edge(cur, nxt)
            cur = nxt
        return cur

    for pos, x in enumerate(order[1:], 1):
        best, y = None, None
        for z in order[:pos]:
            twice = d[r][x] + d[r][z] - d[x][z]
            if twice % 2:
                raise DomainError(f"Gromov product of points {x},{z} at {r} is not an integer")
            if best is None or twice > best:
                best, y = twice, z
        gp = best // 2
        path = nx.shortest_path(T, embed[r], embed[y])
        if gp > len(path) - 1:
            raise InvariantError("Gromov product exceeds the distance to the earlier point")
        at = path[gp]
        tail = d[r][x] - gp
        if tail == 0:
            if at[0] == "s":
                nx.relabel_nodes(T, {at: ("p", x)}, copy=False)
                embed = [("p", x) if u == at else u for u in embed]
                at = ("p", x)
            embed[x] = at
        else:
            embed[x] = attach(at, tail, x)
    out = ZTree(T, embed, order)
    if out.distance_matrix() != [list(row) for row in d]:
        raise InvariantError("reconstructed tree does not re-measure the input metric")
    return out


def order_invariance(points: Sequence, trials: int = 10, seed: int = 0, metric=None) -> bool:
    """Same distance matrix and branch-vertex count over random insertion orders."""
    d = _matrix(points, metric)
    rng = random.Random(seed)
    ref = build_z_tree(points, matrix=d)
    shape = (len(ref.branch_vertices()), ref.graph.number_of_nodes())
    for _ in range(trials):
        order = list(range(len(d)))
        rng.shuffle(order)
        t = build_z_tree(points, matrix=d, order=order)
        if t.distance_matrix() != ref.distance_matrix():
            return False
        if (len(t.branch_vertices()), t.graph.number_of_nodes()) != shape:
            return False
    return True


# -- from a tree back to an almost invariant set ----------------------------

@dataclass
class AlmostInvariantReport:
    arena: Arena
    tree: object
    edge: tuple[int, int]
    wall: int
    x0: str                      # arena vertex with nu(x0) = v
    elements: frozenset          # sampled g with e pointing at g.v
    cut: object                  # arena vertices x with nu(x) on the head side
    finiteness: dict             # generator -> FinitenessReport
    k_identity: bool             # A.K = A on samples, K = stabiliser of v
    h_identity: bool | None      # H.A = A on samples, H = stabiliser of e
    stabilisers: dict = field(default_factory=dict)

    def member(self, g: str) -> bool | None:
        return _member(self, g)

    @property
    def confirmed(self) -> bool:
        return all(r.confirmed for r in self.finiteness.values())

    def to_json(self) -> dict:
        return {"edge": list(self.edge), "v": self.edge[0], "x0": self.x0,
                "A": sorted(self.elements, key=shortlex),
                "cut": self.cut.sorted_members(),
                "finiteness": {x: r.to_json() for x, r in self.finiteness.items()},
                "k_identity": self.k_identity, "h_identity": self.h_identity,
                "stabilisers": {k: sorted(v, key=shortlex) for k, v in self.stabilisers.items()}}


def _tree_vertex(rep, g: str, x: str) -> int | None:
    """nu(g.x) when g.x is an interior arena vertex."""
    a = rep.arena
    y = a.translate(g, x)
    if not a.contains(y) or not a.is_interior(y):
        return None
    return rep.tree.nu[y]


def _side(rep, t: int) -> bool:
    return rep.tree.vertices[t].choice[rep.wall]


def _member(rep, g: str) -> bool | None:
    t = _tree_vertex(rep, g, rep.x0)
    if t is None:
        return None
    return _side(rep, t) == _side(rep, rep.edge[1])


def tree_to_almost_invariant(rel, e: tuple[int, int], v: int | None = None, gens=None,
                             radius: int | None = None) -> AlmostInvariantReport:
    """G[e, v] = {g : e points at g.v}, read off a tree carried by an arena.

    ``rel`` is a relative system (its tree and arena are used). The action on
    tree vertices is g.nu(x) = nu(g.x), so v must lie in the image of nu.
    Sums A + Ax are collected over two word balls and their coset counts
    compared; the answer is confirmed when both agree and every sample lies
    inside the interior.
    """
    arena, tree = rel.arena, rel.tree
    G = arena.oracle
    i, j = e
    walls = [k for k, (a, b) in tree.edges.items() if {a, b} == {i, j}]
    if not walls:
        raise DomainError(f"tree vertices {i} and {j} are not adjacent")
    v = i if v is None else v
    if v != i:
        raise DomainError("v must be the initial vertex of e")
    pre = sorted((x for x in arena.graph.vertices if tree.nu[x] == v and arena.is_interior(x)),
                 key=lambda x: shortlex(rep_of(x)))
    if not pre:
        raise DomainError(f"tree vertex {v} has no interior preimage")
    if gens is None:
        gens = [G.normal_form(s) for s in G.s_gens] + [G.normal_form(h) for h in G.h_gens]
        gens = [x for x in dict.fromkeys(gens + [G.inv(x) for x in gens]) if x]
    gens = [G.normal_form(x) for x in gens]
    longest = max((len(x) for x in gens), default=0)
    x0 = pre[0]
    if radius is None:
        radius = max(0, arena.interior_radius - len(rep_of(x0)) - longest - 1)
    cut = arena.cut(x for x in arena.graph.vertices
                    if _side_of(tree, tree.nu[x], walls[0]) == _side_of(tree, j, walls[0]))
    rep = AlmostInvariantReport(arena, tree, (i, j), walls[0], x0, frozenset(), cut, {},
                                True, None)
    small, big = G.ball(radius), G.ball(radius + 1)
    rep.elements = frozenset(g for g in big if _member(rep, g))

    for x in gens:
        counts, unknown = [], 0
        for ball in (small, big):
            cos = set()
            unknown = 0
            for g in ball:
                a, b = _member(rep, g), _member(rep, G.mul(g, x))
                if a is None or b is None:
                    unknown += 1
                elif a != b:
                    cos.add(G.coset(g))
            counts.append(cos)
        ok = counts[0] == counts[1] and unknown == 0
        rep.finiteness[x] = FinitenessReport(True if ok else None, len(counts[1]), len(counts[0]),
                                             "confirmed" if ok else "truncation-inconclusive",
                                             tuple(sorted(map(vid, counts[1]), key=str)))

    # stabilisers of v and of e among the small ball
    head = sorted((x for x in arena.graph.vertices if tree.nu[x] == j and arena.is_interior(x)),
                  key=lambda x: shortlex(rep_of(x)))
    K = [g for g in small if _tree_vertex(rep, g, x0) == v]
    H = None
    if head:
        H = [g for g in K if _tree_vertex(rep, g, head[0]) == j]
    rep.stabilisers = {"K": K, "H": H if H is not None else []}

    def same(f):
        for g in small:
            a, b = _member(rep, g), _member(rep, f(g))
            if a is not None and b is not None and a != b:
                return False
        return True

    rep.k_identity = all(same(lambda g, k=k: G.mul(g, k)) for k in K)
    if H is not None:
        rep.h_identity = all(same(lambda g, h=h: G.mul(h, g)) for h in H)
    return rep


def _side_of(tree, t: int, k: int) -> bool:
    return tree.vertices[t].choice[k]


@dataclass(frozen=True)
class RoundTrip:
    sageev: SageevGraph
    span: nx.Graph
    isomorphic: bool
    partition_match: bool
    walls: int

    @property
    def ok(self) -> bool:
        return self.isomorphic and self.partition_match and self.sageev.is_tree()


def round_trip(rep: AlmostInvariantReport, point_radius: int, wall_radius: int | None = None,
               strict=False) -> RoundTrip:
    """Feed the translates gA back through the Sageev construction.

    The result is compared with the subtree of the original tree spanned by
    nu(g.x0) for g in the point ball.
    """
    G = rep.arena.oracle
    wall_radius = point_radius + 1 if wall_radius is None else wall_radius
    sys = from_group(G, lambda y: _member(rep, y), G.ball(wall_radius), point_radius, strict)
    sg = sageev_graph(sys)
    tree = rep.tree
    T = nx.Graph()
    T.add_nodes_from(range(len(tree)))
    T.add_edges_from(tree.edges.values())
    marks = {}
    for y in sys.points:
        t = _tree_vertex(rep, rep_of(y), rep.x0)
        if t is None:
            raise TruncationError(f"point {y} leaves the interior", [y])
        marks[y] = t
    nodes = set()
    ts = sorted(set(marks.values()))
    for a, b in itertools.combinations(ts, 2):
        nodes.update(nx.shortest_path(T, a, b))
    nodes.update(ts)
    span = T.subgraph(nodes).copy()
    iso = nx.is_isomorphic(span, sg.graph())
    by_v = {}
    for i, v in enumerate(sg.vertices):
        for y in v.points:
            by_v[y] = i
    part = all((by_v[y] == by_v[z]) == (marks[y] == marks[z])
               for y, z in itertools.combinations(sys.points, 2))
    return RoundTrip(sg, span, iso, part, len(sys))


def orbit_points(arena: Arena, a, words: Iterable[str]) -> list[tuple[str, MetricPoint]]:
    """Translates gA lying at finite distance from A, as points over A.

    Words whose translate differs from A on a non-interior vertex are skipped.
    """
    out, seen = [], set()
    for g in sorted({arena.oracle.normal_form(w) for w in words}, key=shortlex):
        try:
            c = act(arena, g, a)
        except TruncationError:
            continue
        diff = (c ^ a).members
        if any(not arena.is_interior(v) for v in diff):
            continue
        p = MetricPoint("A", frozenset(diff))
        if p not in seen:
            seen.add(p)
            out.append((g, p))
    return out


# -- named systems ----------------------------------------------------------

def _grid_points(k: int) -> list[str]:
    return ["".join(map(str, bits)) for bits in itertools.product((0, 1), repeat=k)]


def _cube_system(k: int) -> HalfSpaceSystem:
    pts = _grid_points(k)
    walls = [(f"x{i}", [p for p in pts if p[i] == "1"]) for i in range(k)]
    return HalfSpaceSystem.from_sets(pts, walls, pts[0], f"cube{k}")


def _line_system(k: int) -> HalfSpaceSystem:
    pts = [str(i) for i in range(k + 1)]
    walls = [(f"w{i}", pts[i + 1:]) for i in range(k)]
    return HalfSpaceSystem.from_sets(pts, walls, "0", f"line{k}")


def _star_system(k: int) -> HalfSpaceSystem:
    pts = ["c"] + [f"l{i}" for i in range(k)]
    walls = [(f"w{i}", [f"l{i}"]) for i in range(k)]
    return HalfSpaceSystem.from_sets(pts, walls, "c", f"star{k}")


def _square_and_tail() -> HalfSpaceSystem:
    pts = ["00", "01", "10", "11", "t"]
    walls = [("x", ["10", "11", "t"]), ("y", ["01", "11", "t"]), ("z", ["t"])]
    return HalfSpaceSystem.from_sets(pts, walls, "00", "square+tail")


def _arena_system(name: str, word_radius: int = 2) -> HalfSpaceSystem:
    """Translates of the relative wall with the shallowest coboundary."""
    from .group_arena import arena_fixture, coboundary_edges
    from .relative_structure import relative_nested_system
    a = arena_fixture(name, 5, 3)
    rel = relative_nested_system(a, 1)
    depth = lambda c: max(a.depth(v) for e in coboundary_edges(a, c) for v in e)
    wall = min(rel.walls(), key=lambda c: (depth(c), c.bits))
    return from_arena(a, wall, a.oracle.ball(word_radius), strict=False, name=f"{name}-translates")


SYSTEM_FIXTURES = {
    "single": lambda: _line_system(1),
    "nested-pair": lambda: _line_system(2),
    "line5": lambda: _line_system(5),
    "square": lambda: _cube_system(2),
    "cube3": lambda: _cube_system(3),
    "cube4": lambda: _cube_system(4),
    "star3": lambda: _star_system(3),
    "square+tail": _square_and_tail,
    "dinf-translates": lambda: _arena_system("dinf"),
    "f2-translates": lambda: _arena_system("f2", 1),
    "z-translates": lambda: _arena_system("z"),
    "amalgam-translates": lambda: _arena_system("bs-amalgam"),
    "z2-translates": lambda: _arena_system("z2"),
    "z2z3-translates": lambda: _arena_system("z2z3"),
}


def system_fixture(name: str) -> HalfSpaceSystem:
    try:
        make = SYSTEM_FIXTURES[name]
    except KeyError:
        raise DomainError(f"unknown half-space system {name!r}; known: {sorted(SYSTEM_FIXTURES)}"
                          ) from None
    return make()


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, default=str)
