"""Self-checks behind ``cutforest verify``.

Each suite returns a SuiteResult; ``ok`` is False when an invariant fails.
The test suite holds the independent oracles; these checks use the library's
own enumerations and are meant as a quick smoke run from the command line.
"""

from __future__ import annotations

import itertools
import math
import time
from collections import Counter
from dataclasses import dataclass, field

from .cubing import (SYSTEM_FIXTURES, build_z_tree, gamma_ball, geodesic_cube, hyperplane,
                     order_invariance, orbit_points, point, round_trip, sageev_check,
                     system_fixture, tree_to_almost_invariant, zero_hyperbolicity_check)
from .cut_algebra import (apply_perm, automorphisms, enumerate_cuts, extract_nested_generators,
                          in_ring_closure, nested_masks, normalize, ring_closure)
from .fixtures import graph_fixture
from .group_arena import arena_fixture, coboundary_edges
from .groups import GROUP_FIXTURES, group_fixture
from .relative_structure import (CASE_TABLE, crossing_case, kropholler_corner,
                                 relative_nested_system, sweep_pairs)
from .tree_builder import (build_tree, canonical_decomposition, decomposition_variants,
                           evaluate_expression, tree_automorphism)

GRAPHS = ("path4", "barbell", "c4", "c6", "grid2x3")
SWEEP_GROUPS = ("dinf", "f2", "z2", "bs-amalgam")


@dataclass
class SuiteResult:
    name: str
    ok: bool
    report: dict = field(default_factory=dict)
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {"suite": self.name, "ok": self.ok, "seconds": round(self.seconds, 2),
                "report": self.report}


def _separation(g, n) -> bool:
    t = build_tree(extract_nested_generators(g, n))
    cuts = enumerate_cuts(g, n)
    for x, y in itertools.combinations(g.vertices, 2):
        sep = any((x in c) != (y in c) for c in cuts)
        if (t.nu[x] == t.nu[y]) == sep:
            return False
    return True


def suite_separation(graphs=GRAPHS, levels=(1, 2, 3)) -> SuiteResult:
    rep = {f"{name}/n={n}": _separation(graph_fixture(name), n) for name in graphs for n in levels}
    return SuiteResult("separation", all(rep.values()), rep)


def _generators(g, levels) -> dict:
    auts = automorphisms(g)
    prev: set = set()
    out = {}
    for n in levels:
        E = extract_nested_generators(g, n, auts)
        ms = set(E.masks)
        nested = all(nested_masks(x, y, g.full) for x, y in itertools.combinations(ms, 2))
        inv = all({normalize(g, apply_perm(p, m)) for m in ms} == ms for p in auts)
        closure = all(in_ring_closure(c, E) for c in enumerate_cuts(g, n))
        out[n] = {"nested": nested, "invariant": inv, "monotone": prev <= ms, "generates": closure}
        prev = ms
    return out


def suite_generators(graphs=GRAPHS, levels=(1, 2, 3)) -> SuiteResult:
    rep = {name: _generators(graph_fixture(name), levels) for name in graphs}
    ok = all(all(v.values()) for r in rep.values() for v in r.values())
    return SuiteResult("generators", ok, rep)


def _decompositions(g, n) -> bool:
    E = extract_nested_generators(g, n)
    t = build_tree(E)
    exprs = {}
    for a in (ring_closure(E) if len(E) else [g.cut()]):
        e = canonical_decomposition(a, E, t)
        if evaluate_expression(e) != a:
            return False
        if decomposition_variants(a, E, t) != {frozenset(i for i, s in enumerate(e.sides) if s)}:
            return False
        exprs[a.bits] = e
    for p in automorphisms(g):
        sig = tree_automorphism(t, p)
        for m, e in exprs.items():
            img = exprs[apply_perm(p, m)]
            if any(img.sides[sig[i]] != s for i, s in enumerate(e.sides)):
                return False
    return True


def suite_decomposition(graphs=GRAPHS, levels=(1, 2, 3)) -> SuiteResult:
    rep = {f"{name}/n={n}": _decompositions(graph_fixture(name), n)
           for name in graphs for n in levels}
    return SuiteResult("decomposition", all(rep.values()), rep)


def suite_groups() -> SuiteResult:
    rep = {}
    for name in sorted(GROUP_FIXTURES):
        G = group_fixture(name)
        G.check_confluence(5)
        rep[name] = G.check_axioms(G.ball(2)) is None
    return SuiteResult("groups", all(rep.values()), rep)


def crossing_sweep(name: str, radius: int = 4, interior: int = 3, ball: int = 3):
    """Crossing cases for all (g, A, B) over relative-system half-spaces."""
    a = arena_fixture(name, radius, interior)
    rel = relative_nested_system(a, 1)
    halves = [c for m in rel.walls() for c in (m, m.complement())]
    pairs, lost = sweep_pairs(a, halves, a.oracle.ball(ball))
    return a, [(g, A, B, gb, crossing_case(a, A, gb, g)) for g, A, B, gb in pairs], lost


def suite_crossing(groups=SWEEP_GROUPS) -> SuiteResult:
    rep, ok = {}, True
    rows: Counter = Counter()
    for name in groups:
        _, cases, lost = crossing_sweep(name)
        bad = [c for *_, c in cases if not (c.nested and c.sums_ok and c.table_match)]
        for *_, c in cases:
            rows[(c.o_corner, c.go_corner, c.verdict)] += 1
        rep[name] = {"runs": len(cases), "failures": len(bad), "skipped_translates": lost}
        ok = ok and not bad and bool(cases)
    rep["table"] = [{"o": o, "go": go, "verdict": v, "runs": n,
                     "listed": any((e if e == "A=gB" else e + "=∅") == v
                                   for _, e in CASE_TABLE.get((o, go), []))}
                    for (o, go, v), n in sorted(rows.items())]
    ok = ok and all(r["listed"] for r in rep["table"])
    return SuiteResult("crossing", ok, rep)


def kropholler_sweep(name: str, radii=(4, 5, 6), interior: int = 3, ball: int = 3):
    """Orbit counts keyed by (g, A, B) restricted to the shared interior."""
    counts: dict = {}
    suff_ok = True
    for r in radii:
        a = arena_fixture(name, r, interior)
        rel = relative_nested_system(a, 1)
        halves = [c for m in rel.walls() for c in (m, m.complement())]
        inner = lambda c: frozenset(v for v in c.members if a.is_interior(v))
        pairs, _ = sweep_pairs(a, halves, a.oracle.ball(ball))
        for g, A, B, gb in pairs:
            k = kropholler_corner(a, A, B, g, gb)
            inside = all(a.is_interior(v) for e in coboundary_edges(a, k.corner) for v in e)
            if inside and not k.finiteness.confirmed:
                suff_ok = False
            counts.setdefault((g, inner(A), inner(B)), {})[r] = (
                k.finiteness.orbits, k.finiteness.confirmed, inside)
    return counts, suff_ok


def _monotone(per_r: dict) -> bool:
    vals = [per_r[r][0] for r in sorted(per_r)]
    return all(x <= y for x, y in zip(vals, vals[1:]))


def suite_kropholler(groups=SWEEP_GROUPS, radii=(4, 5, 6)) -> SuiteResult:
    rep, ok = {}, True
    for name in groups:
        counts, suff = kropholler_sweep(name, radii)
        mono = sum(1 for v in counts.values() if _monotone(v))
        conf = sum(1 for v in counts.values() for x in v.values() if x[1])
        total = sum(len(v) for v in counts.values())
        rep[name] = {"keys": len(counts), "monotone": mono, "confirmed_runs": conf,
                     "runs": total, "confirmed_when_interior_suffices": suff}
        ok = ok and suff and mono == len(counts)
    return SuiteResult("kropholler", ok, rep)


def suite_relative(groups=tuple(sorted(GROUP_FIXTURES))) -> SuiteResult:
    rep = {}
    for name in groups:
        rel = relative_nested_system(arena_fixture(name, 4, 3), 1)
        rep[name] = {"walls": len(rel.system), "tree_vertices": len(rel.tree),
                     "diameter": rel.diameter(),
                     "component_lemma": all(all(l.checks.values()) for l in rel.lifts)}
    return SuiteResult("relative", all(r["component_lemma"] for r in rep.values()), rep)


def suite_amalgam_shape(radius: int = 4) -> SuiteResult:
    """The relative tree of the amalgam fixture against the expected diameter 2."""
    a = arena_fixture("bs-amalgam", radius, radius - 1)
    rel = relative_nested_system(a, 1)
    o = rel.tree.nu["o"]
    from .relative_structure import _wall_image, act_on_vertex
    fixed = all(act_on_vertex(rel.tree, [_wall_image(a, rel.system, h, k)
                                          for k in range(len(rel.system))], o) == o
                for h in a.h_sample if h)
    d = rel.diameter()
    return SuiteResult("amalgam-shape", d == 2 and fixed,
                       {"diameter": d, "expected": 2, "base_vertex_fixed_by_H_sample": fixed})


def suite_gamma() -> SuiteResult:
    rep = {}
    for n in (2, 3, 4):
        A = point()
        labs = "wxyz"[:n]
        G = gamma_ball(A, n, labs)
        d, count, cube = geodesic_cube(G, A, A.flip(*labs))
        rep[f"n={n}"] = {"geodesics": count, "cube_vertices": cube,
                         "ok": count == math.factorial(n) and cube == 2 ** n,
                         "hyperplanes_split": all(hyperplane(G, x).separates for x in labs)}
    ok = all(r["ok"] and r["hyperplanes_split"] for r in rep.values())
    return SuiteResult("gamma", ok, rep)


def suite_sageev() -> SuiteResult:
    rep = {name: sageev_check(system_fixture(name)).to_json() for name in sorted(SYSTEM_FIXTURES)}
    return SuiteResult("sageev", all(r["ok"] for r in rep.values()), rep)


def line_report(name: str, radius: int = 6):
    a = arena_fixture(name, radius, radius - 1)
    rel = relative_nested_system(a, 1)
    return tree_to_almost_invariant(rel, (rel.tree.nu["o"], rel.tree.nu["t"]))


def suite_ztree(seed: int = 0) -> SuiteResult:
    rep = {}
    for name, ball in (("z", 3), ("dinf", 4)):
        r = line_report(name)
        pts = [p for _, p in orbit_points(r.arena, r.cut, r.arena.oracle.ball(ball))]
        hyp = zero_hyperbolicity_check(pts)
        t = build_z_tree(pts)
        rep[name] = {"points": len(pts), "zero_hyperbolic": hyp.ok,
                     "branch_vertices": len(t.branch_vertices()),
                     "order_invariant": order_invariance(pts, 10, seed)}
    ok = all(r["zero_hyperbolic"] and r["order_invariant"] for r in rep.values())
    return SuiteResult("ztree", ok, rep)


def suite_roundtrip() -> SuiteResult:
    rep = {}
    for name in ("z", "dinf"):
        r = line_report(name)
        rt = round_trip(r, 2)
        rep[name] = {"A_plus_Ax": {x: f.to_json() for x, f in r.finiteness.items()},
                     "confirmed": r.confirmed, "tree_isomorphic": rt.isomorphic,
                     "points_match": rt.partition_match, "walls": rt.walls}
    ok = all(v["confirmed"] and v["tree_isomorphic"] and v["points_match"] for v in rep.values())
    return SuiteResult("roundtrip", ok, rep)


SUITES = {
    "separation": suite_separation,
    "generators": suite_generators,
    "decomposition": suite_decomposition,
    "groups": suite_groups,
    "relative": suite_relative,
    "crossing": suite_crossing,
    "kropholler": suite_kropholler,
    "amalgam-shape": suite_amalgam_shape,
    "gamma": suite_gamma,
    "sageev": suite_sageev,
    "ztree": suite_ztree,
    "roundtrip": suite_roundtrip,
}


def run_suite(name: str) -> SuiteResult:
    t = time.perf_counter()
    res = SUITES[name]()
    res.seconds = time.perf_counter() - t
    return res
