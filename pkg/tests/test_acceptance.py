"""The ten acceptance criteria, each checked against an independent oracle.

Every test records a PASS/FAIL line in RESULTS; conftest prints them at the
end of the run. Running this file directly prints them as well.
"""

import itertools
import math
import random
import sys
from contextlib import contextmanager
from fractions import Fraction

import networkx as nx
import pytest

import oracles
from cutforest.cubing import (SYSTEM_FIXTURES, build_z_tree, gamma_ball, hyperplane, metric_d,
                              orbit_points, point, round_trip, system_fixture,
                              tree_to_almost_invariant, vertex_to_set)
from cutforest.cut_algebra import extract_nested_generators
from cutforest.fixtures import corpus, graph_fixture
from cutforest.group_arena import arena_fixture
from cutforest.relative_structure import (_wall_image, act_on_vertex, crossing_case, kropholler_corner,
                                          relative_nested_system, sweep_pairs)
from cutforest.tree_builder import (OrientationVertex, build_tree, canonical_decomposition,
                                    decomposition_variants, evaluate_expression)

RESULTS = {}
TITLES = {
    1: "structure-tree separation",
    2: "nested generator properties",
    3: "canonical decomposition",
    4: "crossing-cut table",
    5: "Kropholler corner finiteness",
    6: "relative tree shape for the amalgam",
    7: "Gamma geodesics and hyperplanes",
    8: "Sageev isomorphism",
    9: "0-hyperbolicity and Z-tree",
    10: "tree to almost invariant set round trip",
}
FIXTURES = ("path4", "barbell", "c4", "c6", "grid2x3")
SWEEP = ("dinf", "f2", "z2", "bs-amalgam")


@contextmanager
def criterion(k):
    note = {}
    try:
        yield note
    except BaseException as exc:
        msg = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
        RESULTS[k] = (False, msg[:160])
        raise
    RESULTS[k] = (True, note.get("msg", ""))


def summary_lines():
    for k in sorted(RESULTS):
        ok, msg = RESULTS[k]
        yield f"criterion {k:2d} {'PASS' if ok else 'FAIL'}  {TITLES[k]}" + (f": {msg}" if msg else "")


@pytest.fixture(scope="module")
def graphs():
    named = [(n, graph_fixture(n)) for n in FIXTURES]
    return named + [(n, g) for n, g in corpus() if len(g) <= 8]


# -- oracles local to the acceptance run ------------------------------------

def automorphisms_bt(g):
    """Capacity-preserving automorphisms by backtracking over vertex images."""
    vs, es = oracles.raw(g)
    cap = {}
    for u, v, c in es:
        cap[(u, v)] = cap[(v, u)] = c
    nb = {v: set() for v in vs}
    for u, v, _ in es:
        nb[u].add(v)
        nb[v].add(u)
    out = []
    m = {}

    def rec(i):
        if i == len(vs):
            out.append(dict(m))
            return
        x = vs[i]
        used = set(m.values())
        for y in vs:
            if y in used or len(nb[x]) != len(nb[y]):
                continue
            if all(cap.get((m[w], y)) == cap[(w, x)] for w in nb[x] if w in m) and \
                    all((m[w], y) not in cap for w in m if w not in nb[x]):
                m[x] = y
                rec(i + 1)
                del m[x]

    rec(0)
    return out


def in_generated_ring(S, gens, full):
    """S lies in the ring generated by gens iff it is a union of the classes
    of points no generator separates (and sits inside their union)."""
    if not gens:
        return not S
    if not S <= frozenset().union(*gens):
        return False
    for x in S:
        for y in full - S:
            if all((x in A) == (y in A) for A in gens):
                return False
    return True


def four_point_ok(d):
    n = len(d)
    for a, b, c, e in itertools.permutations(range(n), 4):
        gp = lambda x, y: Fraction(d[a][x] + d[a][y] - d[x][y], 2)
        if gp(b, c) < min(gp(b, e), gp(c, e)):
            return False
    return True


# -- 1 ----------------------------------------------------------------------

def test_criterion_01_separation(graphs):
    with criterion(1) as note:
        checked = 0
        for name, g in graphs:
            for n in (1, 2, 3):
                cuts = oracles.all_cuts(g, n)
                t = build_tree(extract_nested_generators(g, n))
                for x, y in itertools.combinations(g.vertices, 2):
                    sep = any((x in A) != (y in A) for A in cuts)
                    assert (t.nu[x] == t.nu[y]) == (not sep), (name, n, x, y)
                    checked += 1
        note["msg"] = f"{len(graphs)} graphs, n=1..3, {checked} vertex pairs"


# -- 2 ----------------------------------------------------------------------

def test_criterion_02_generators(graphs):
    with criterion(2) as note:
        for name, g in graphs:
            full = frozenset(g.vertices)
            auts = automorphisms_bt(g)
            prev = set()
            for n in (1, 2, 3):
                E = extract_nested_generators(g, n)
                members = [c.members for c in E]
                for A, B in itertools.combinations(members, 2):
                    assert oracles.nested(A, B, full), (name, n, "crossing pair")
                walls = {frozenset({A, full - A}) for A in members}
                for m in auts:
                    img = {frozenset(frozenset(m[v] for v in h) for h in w) for w in walls}
                    assert img == walls, (name, n, "not invariant")
                assert prev <= walls, (name, n, "not monotone")
                prev = walls
                gens = [h for w in walls for h in w]
                for S in oracles.all_cuts(g, n):
                    assert in_generated_ring(S, gens, full), (name, n, sorted(S))
                if len(g) <= 5 and gens:
                    assert set(oracles.all_cuts(g, n)) <= oracles.ring_fixpoint(gens)
        note["msg"] = f"{len(graphs)} graphs, n=1..3"


# -- 3 ----------------------------------------------------------------------

def _tree_image(t, m):
    """Vertex map of the tree induced by a graph automorphism m, from picked half-spaces."""
    full = frozenset(t.graph.vertices)
    masks = [frozenset(t.graph.names(x)) for x in t.system.masks]
    picked = [frozenset(masks[k] if ch else full - masks[k] for k, ch in enumerate(v.choice))
              for v in t.vertices]
    where = {p: i for i, p in enumerate(picked)}
    return [where[frozenset(frozenset(m[x] for x in h) for h in p)] for p in picked]


def test_criterion_03_decomposition():
    with criterion(3) as note:
        count = 0
        for name in FIXTURES + ("k4",):
            g = graph_fixture(name)
            auts = automorphisms_bt(g)
            for n in (1, 2, 3):
                E = extract_nested_generators(g, n)
                t = build_tree(E)
                full = frozenset(g.vertices)
                gens = [h for c in E for h in (c.members, full - c.members)]
                ring = [S for S in oracles.subsets(sorted(full)) if in_generated_ring(S, gens, full)]
                exprs = {}
                for S in ring:
                    a = g.cut(S)
                    e = canonical_decomposition(a, E, t)
                    assert evaluate_expression(e).members == S, (name, n, sorted(S))
                    sides = frozenset(i for i, s in enumerate(e.sides) if s)
                    assert decomposition_variants(a, E, t) == {sides}, (name, n, sorted(S))
                    exprs[S] = e.sides
                    count += 1
                for m in auts:
                    sig = _tree_image(t, m)
                    for S, sides in exprs.items():
                        img = exprs[frozenset(m[x] for x in S)]
                        assert all(img[sig[i]] == s for i, s in enumerate(sides)), (name, n, m)
        note["msg"] = f"{count} ring elements on {len(FIXTURES) + 1} fixtures"


# -- 4 and 5 ----------------------------------------------------------------

def _halves(rel):
    return [c for m in rel.walls() for c in (m, m.complement())]


def test_criterion_04_crossing_table():
    with criterion(4) as note:
        runs, rows = 0, set()
        for name in SWEEP:
            a = arena_fixture(name, 4, 3)
            rel = relative_nested_system(a, 1)
            full = frozenset(a.graph.vertices)
            pairs, _ = sweep_pairs(a, _halves(rel), a.oracle.ball(3))
            assert pairs, name
            for g, A, B, gb in pairs:
                go = a.translate(g, "o")
                assert "o" not in gb.members and go not in A.members and A.members & gb.members
                cc = crossing_case(a, A, gb, g)
                c = cc.counts
                assert c["a"] + c["e"] + c["f"] + c["b"] == 1, (name, g, c)
                assert c["c"] + c["e"] + c["f"] + c["d"] == 1, (name, g, c)
                assert oracles.nested(A.members, gb.members, full), (name, g)
                assert cc.nested and cc.table_match, (name, g, cc)
                rows.add((cc.o_corner, cc.go_corner, cc.verdict))
                runs += 1
        note["msg"] = f"{runs} runs over {len(SWEEP)} groups, {len(rows)} table rows exercised"


def _orbits_by_union(arena, edges, elems):
    """Orbit count of an edge set under translation by a sample, by union-find."""
    edges = [frozenset(e) for e in edges]
    key = {e: e for e in edges}
    parent = {e: e for e in edges}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for e in edges:
        for h in elems:
            f = frozenset(arena.translate(h, v) for v in e)
            if f in parent:
                parent[find(e)] = find(f)
    return len({find(e) for e in edges})


def test_criterion_05_kropholler():
    with criterion(5) as note:
        total = confirmed = 0
        for name in SWEEP:
            per_key = {}
            for r in (4, 5, 6):
                a = arena_fixture(name, r, 3)
                rel = relative_nested_system(a, 1)
                G = a.oracle
                inner = lambda c: frozenset(v for v in c.members if a.is_interior(v))
                pairs, _ = sweep_pairs(a, _halves(rel), G.ball(3))
                for g, A, B, gb in pairs:
                    k = kropholler_corner(a, A, B, g, gb)
                    cob = oracles.coboundary(a.graph, k.corner.members)
                    inside = all(a.is_interior(v) for e in cob for v in e)
                    if inside:
                        assert k.finiteness.confirmed, (name, r, g)
                        if name != "f2":
                            hk = [h for h in a.h_sample if G.in_H(G.inv(g) + h + g)]
                            assert _orbits_by_union(a, cob, hk) == k.finiteness.orbits, (name, r, g)
                        confirmed += 1
                    per_key.setdefault((g, inner(A), inner(B)), {})[r] = k.finiteness.orbits
                    total += 1
            for key, v in per_key.items():
                seq = [v[r] for r in sorted(v)]
                assert all(x <= y for x, y in zip(seq, seq[1:])), (name, key[0], seq)
        note["msg"] = f"{total} runs at r=4,5,6; {confirmed} with the corner inside the interior, all confirmed"


# -- 6 ----------------------------------------------------------------------

def test_criterion_06_amalgam_shape():
    with criterion(6) as note:
        a = arena_fixture("bs-amalgam", 4, 3)
        rel = relative_nested_system(a, 1)
        T = nx.Graph()
        T.add_nodes_from(range(len(rel.tree)))
        T.add_edges_from(rel.tree.edges.values())
        diam = nx.diameter(T)
        mids = [v for v in T if nx.eccentricity(T, v) == 1]
        fixed = [v for v in mids
                 if all(act_on_vertex(rel.tree, [_wall_image(a, rel.system, h, k)
                                                 for k in range(len(rel.system))], v) == v
                        for h in a.h_sample if h)]
        note["msg"] = f"diameter {diam}"
        assert diam == 2, f"relative tree has diameter {diam}, expected 2"
        assert fixed, "no middle vertex fixed by the H sample"


# -- 7 ----------------------------------------------------------------------

def test_criterion_07_gamma():
    with criterion(7) as note:
        for n in (2, 3, 4):
            A = point("A", ["q"])
            labs = list("wxyz"[:n])
            G = gamma_ball(A, n, labs + ["q"])
            far = A.flip(*labs)
            paths = list(nx.all_shortest_paths(G, A, far))
            assert len(paths) == math.factorial(n), (n, len(paths))
            assert len({v for p in paths for v in p}) == 2 ** n
        for radius, labs in ((1, "xy"), (2, "xyz"), (3, "wxyz"), (4, "vwxyz")):
            G = gamma_ball(point("A", ["x"]), radius, labs)
            for x in labs:
                h = hyperplane(G, x)
                H = G.copy()
                H.remove_edges_from([(u, v) for u, v, l in G.edges(data="label") if l == x])
                comps = {frozenset(c) for c in nx.connected_components(H)}
                assert comps == {h.inside, h.outside}, (radius, x)
        note["msg"] = "n! geodesics and 2^n cube vertices for n=2,3,4; every hyperplane splits its ball in two"


# -- 8 ----------------------------------------------------------------------

def test_criterion_08_sageev():
    with criterion(8) as note:
        nested_count = 0
        for name in sorted(SYSTEM_FIXTURES):
            sys_ = system_fixture(name)
            assert len(sys_) <= 16
            pts = sys_.points
            full = frozenset(pts)
            halves = [(frozenset(sys_.points[i] for i in range(len(pts)) if m >> i & 1),) for _, m in sys_.walls]
            pairs = [(h[0], full - h[0]) for h in halves]
            orients = oracles.orientations(pairs)
            G = nx.Graph()
            G.add_nodes_from(orients)
            for u, v in itertools.combinations(orients, 2):
                if sum(x != y for x, y in zip(u, v)) == 1:
                    G.add_edge(u, v)
            princ = {tuple(x in p[0] for p in pairs) for x in pts}
            base = tuple(pts[sys_.base_point] in p[0] for p in pairs)
            comp = nx.node_connected_component(G, base)
            assert princ <= comp, name
            img = {v: vertex_to_set(OrientationVertex(v), sys_) for v in comp}
            assert len(set(img.values())) == len(comp), (name, "not injective")
            dist = dict(nx.all_pairs_shortest_path_length(G.subgraph(comp)))
            for u, v in itertools.combinations(comp, 2):
                d = metric_d(img[u], img[v])
                assert d == dist[u][v], (name, "distance")
                assert (d == 1) == G.has_edge(u, v), (name, "adjacency")
            if all(oracles.nested(p[0], q[0], full) for p, q in itertools.combinations(pairs, 2)):
                assert nx.is_tree(G.subgraph(comp)), name
                nested_count += 1
        note["msg"] = f"{len(SYSTEM_FIXTURES)} systems, {nested_count} nested ones give trees"


# -- 9 and 10 ---------------------------------------------------------------

@pytest.fixture(scope="module")
def line_reports():
    out = {}
    for name in ("z", "dinf"):
        a = arena_fixture(name, 6, 5)
        rel = relative_nested_system(a, 1)
        out[name] = tree_to_almost_invariant(rel, (rel.tree.nu["o"], rel.tree.nu["t"]))
    return out


def test_criterion_09_zero_hyperbolic(line_reports):
    with criterion(9) as note:
        sizes = []
        for name, ball in (("z", 3), ("dinf", 4)):
            rep = line_reports[name]
            pts = [p for _, p in orbit_points(rep.arena, rep.cut, rep.arena.oracle.ball(ball))]
            assert len(pts) >= 4, name
            d = [[metric_d(p, q) for q in pts] for p in pts]
            assert four_point_ok(d), name
            rng = random.Random(7)
            for trial in range(11):
                order = list(range(len(pts)))
                if trial:
                    rng.shuffle(order)
                t = build_z_tree(pts, order=order)
                sp = dict(nx.all_pairs_shortest_path_length(t.graph))
                assert [[sp[u][v] for v in t.embed] for u in t.embed] == d, (name, order)
                assert nx.is_tree(t.graph)
            sizes.append(f"{name}: {len(pts)} points")
        note["msg"] = ", ".join(sizes) + "; 10 shuffled insertion orders re-measure exactly"


def test_criterion_10_round_trip(line_reports):
    with criterion(10) as note:
        z, d = line_reports["z"], line_reports["dinf"]
        # independent descriptions of the head-side sets on the sampled balls
        want_z = lambda w: w.count("t") >= 1
        want_d = lambda w: w.startswith("t")
        for rep, want in ((z, want_z), (d, want_d)):
            G = rep.arena.oracle
            for w in G.ball(3):
                assert rep.member(w) == want(w), w
            for x, fin in rep.finiteness.items():
                assert fin.confirmed, x
                cos = {G.coset(g) for g in G.ball(3) if want(g) != want(G.mul(g, x))}
                assert len(cos) == fin.orbits, (x, cos)
            rt = round_trip(rep, 2)
            assert rt.isomorphic and rt.partition_match
            S = rt.sageev.graph()
            assert nx.is_tree(S) and max(dict(S.degree()).values()) <= 2
        note["msg"] = "A + Ax confirmed finite for every generator on Z and D-infinity; Sageev trees match the line"


if __name__ == "__main__":
    code = pytest.main([__file__, "-q"])
    print("\n".join(summary_lines()))
    sys.exit(code)
