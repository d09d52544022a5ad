"""Command line front end.

Exit codes: 0 success, 1 bad input or failed precondition, 2 truncation
inconclusive (a report is still written), 3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .errors import CutforestError, DomainError, TruncationError

EXIT_OK, EXIT_PRE, EXIT_TRUNC, EXIT_INV = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    fixture: str | None = None
    input: str | None = None
    n: int = 1
    radius: int = 4
    interior: int | None = None
    ball: int = 2
    format: str = "json"
    output: str | None = None
    seed: int = 0
    group: str = "dinf"
    cut: str | None = None
    mode: str = "tree"
    word: str = ""
    a: int | None = None
    b: int | None = None
    system: str | None = None
    labels: str | None = None
    suite: str = "all"


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, ensure_ascii=False, default=str) + "\n"


def _graph(cfg: RunConfig):
    from .fixtures import graph_fixture
    from .graph_core import Graph
    if cfg.input:
        return Graph.from_json(Path(cfg.input).read_text())
    if not cfg.fixture:
        raise DomainError("give --fixture or --input")
    try:
        return graph_fixture(cfg.fixture)
    except KeyError as exc:
        raise DomainError(str(exc.args[0])) from None


def _arena(cfg: RunConfig):
    from .group_arena import build_coset_graph
    from .groups import group_fixture
    return build_coset_graph(group_fixture(cfg.group), cfg.radius, cfg.interior)


def cmd_fixtures(cfg):
    from .cubing import SYSTEM_FIXTURES
    from .fixtures import GRAPH_FIXTURES
    from .groups import GROUP_FIXTURES
    return EXIT_OK, _dump({"graphs": sorted(GRAPH_FIXTURES), "groups": sorted(GROUP_FIXTURES),
                           "systems": sorted(SYSTEM_FIXTURES)})


def cmd_cuts(cfg):
    from .cut_algebra import enumerate_cuts, extract_nested_generators
    g = _graph(cfg)
    E = extract_nested_generators(g, cfg.n)
    return EXIT_OK, _dump({"n": cfg.n, "cuts": [c.sorted_members() for c in enumerate_cuts(g, cfg.n)],
                           "generators": E.to_json()["cuts"]})


def cmd_tree(cfg):
    from .tree_builder import structure_tree
    t = structure_tree(_graph(cfg), cfg.n)
    return EXIT_OK, t.to_dot() if cfg.format == "dot" else _dump(t.to_json())


def cmd_decompose(cfg):
    from .cut_algebra import extract_nested_generators
    from .tree_builder import build_tree, canonical_decomposition, evaluate_expression
    if not cfg.cut:
        raise DomainError("give --cut as a comma separated vertex list")
    g = _graph(cfg)
    a = g.cut(x.strip() for x in cfg.cut.split(",") if x.strip())
    E = extract_nested_generators(g, cfg.n)
    e = canonical_decomposition(a, E, build_tree(E))
    back = evaluate_expression(e)
    out = e.to_json()
    out.update({"cut": a.sorted_members(), "evaluates_to": back.sorted_members(),
                "round_trip": back == a})
    return (EXIT_OK if back == a else EXIT_INV), _dump(out)


def cmd_arena(cfg):
    a = _arena(cfg)
    if cfg.format == "dot":
        lines = ["graph X {"]
        for v in a.graph.vertices:
            style = "" if a.is_interior(v) else ", style=dashed"
            lines.append(f'  "{v}" [label="{v}"{style}];')
        for u, v in a.edges():
            lines.append(f'  "{u}" -- "{v}";')
        lines.append("}")
        return EXIT_OK, "\n".join(lines) + "\n"
    return EXIT_OK, a.dumps() + "\n"


def _pick_pair(a, rel, cfg):
    from .group_arena import act
    from .relative_structure import sweep_pairs
    halves = [c for m in rel.walls() for c in (m, m.complement())]
    if cfg.a is not None and cfg.b is not None:
        try:
            A, B = halves[cfg.a], halves[cfg.b]
        except IndexError:
            raise DomainError(f"half-space index out of range (0..{len(halves) - 1})") from None
        return A, B, act(a, cfg.word, B)
    pairs, _ = sweep_pairs(a, halves, [a.oracle.normal_form(cfg.word)])
    if not pairs:
        raise DomainError(f"no half-spaces A, B satisfy the corner preconditions for g={cfg.word!r}")
    _, A, B, gb = pairs[0]
    return A, B, gb


def cmd_relative(cfg):
    from .relative_structure import (assemble_g_nested, crossing_case, kropholler_corner,
                                     relative_nested_system, tree_overlap)
    a = _arena(cfg)
    rel = relative_nested_system(a, cfg.n)
    g = a.oracle.normal_form(cfg.word)
    if cfg.mode == "tree":
        if cfg.format == "dot":
            return EXIT_OK, rel.tree.to_dot("TH")
        return EXIT_OK, _dump(rel.to_json())
    if cfg.mode == "corner":
        A, B, gb = _pick_pair(a, rel, cfg)
        r = kropholler_corner(a, A, B, g, gb)
        code = EXIT_OK if r.finiteness.confirmed else EXIT_TRUNC
        return code, _dump(r.to_json())
    if cfg.mode == "crossing":
        A, B, gb = _pick_pair(a, rel, cfg)
        c = crossing_case(a, A, gb, g)
        ok = c.nested and c.sums_ok and c.table_match
        return (EXIT_OK if ok else EXIT_INV), _dump(c.to_json())
    if cfg.mode == "overlap":
        r = tree_overlap(a, g, cfg.n, rel)
        return EXIT_OK, r.to_dot() if cfg.format == "dot" else _dump(r.to_json())
    if cfg.mode == "assemble":
        t = assemble_g_nested(a, cfg.n, a.oracle.ball(cfg.ball), rel)
        return EXIT_OK, t.tree.to_dot("GT") if cfg.format == "dot" else _dump(t.to_json())
    raise DomainError(f"unknown relative mode {cfg.mode!r}")


def cmd_cubing(cfg):
    from .cubing import (gamma_ball, gamma_to_dot, geodesic_cube, hyperplane, point,
                         sageev_check, sageev_graph, system_fixture)
    if cfg.labels is not None:
        labels = [x for x in cfg.labels.split(",") if x]
        A = point()
        G = gamma_ball(A, cfg.radius, labels)
        if cfg.format == "dot":
            return EXIT_OK, gamma_to_dot(G)
        far = A.flip(*labels[:cfg.radius])
        d, count, cube = geodesic_cube(G, A, far)
        return EXIT_OK, _dump({"vertices": G.number_of_nodes(), "edges": G.number_of_edges(),
                               "far_point": repr(far), "distance": d, "geodesics": count,
                               "cube_vertices": cube,
                               "hyperplanes": {x: hyperplane(G, x).to_json() for x in labels}})
    sysm = system_fixture(cfg.system or "square")
    if cfg.format == "dot":
        sg = sageev_graph(sysm)
        lines = ["graph sageev {"]
        for i, v in enumerate(sg.vertices):
            lab = ",".join(v.points) or f"v{i}"
            lines.append(f'  v{i} [label="{lab}"{"" if v.points else ", shape=point"}];')
        for i, j, k in sg.edges:
            lines.append(f'  v{i} -- v{j} [label="{sysm.labels[k]}"];')
        lines.append("}")
        return EXIT_OK, "\n".join(lines) + "\n"
    rep = sageev_check(sysm)
    out = {"system": sysm.to_json(), "graph": sageev_graph(sysm).to_json(), "check": rep.to_json()}
    return (EXIT_OK if rep.ok else EXIT_INV), _dump(out)


def cmd_ztree(cfg):
    from .cubing import build_z_tree, orbit_points, tree_to_almost_invariant, zero_hyperbolicity_check
    from .group_arena import arena_fixture
    from .relative_structure import relative_nested_system
    a = arena_fixture(cfg.group, cfg.radius, cfg.interior)
    rel = relative_nested_system(a, cfg.n)
    nu = rel.tree.nu
    nbrs = [j for j, _ in rel.tree.adj[nu["o"]]]
    if not nbrs:
        raise DomainError("the base vertex has no tree edge")
    head = min(nbrs, key=lambda j: min((len(x), x) for x in rel.tree.preimage(j)))
    rep = tree_to_almost_invariant(rel, (nu["o"], head))
    pts = orbit_points(a, rep.cut, a.oracle.ball(cfg.ball))
    P = [p for _, p in pts]
    hyp = zero_hyperbolicity_check(P) if len(P) >= 4 else None
    t = build_z_tree(P)
    out = {"words": [w for w, _ in pts], "points": [repr(p) for p in P],
           "zero_hyperbolic": None if hyp is None else hyp.to_json(),
           "tree": t.to_json(), "almost_invariant": rep.to_json()}
    return (EXIT_OK if rep.confirmed else EXIT_TRUNC), _dump(out)


def cmd_verify(cfg):
    from .verify import SUITES, run_suite
    names = list(SUITES) if cfg.suite == "all" else cfg.suite.split(",")
    for s in names:
        if s not in SUITES:
            raise DomainError(f"unknown suite {s!r}; known: {', '.join(SUITES)}")
    res = [run_suite(s) for s in names]
    rep = [dict(r.to_json(), seconds=None) for r in res]  # timings would break determinism
    return (EXIT_OK if all(r.ok for r in res) else EXIT_INV), _dump(rep)


COMMANDS = {
    "fixtures": cmd_fixtures, "cuts": cmd_cuts, "tree": cmd_tree, "decompose": cmd_decompose,
    "arena": cmd_arena, "relative": cmd_relative, "cubing": cmd_cubing, "ztree": cmd_ztree,
    "verify": cmd_verify,
}


def run(cfg: RunConfig) -> tuple[int, str]:
    try:
        return COMMANDS[cfg.command](cfg)
    except TruncationError as exc:
        return EXIT_TRUNC, _dump({"error": str(exc), "kind": "truncation", "lost": exc.lost})
    except CutforestError as exc:
        return exc.exit_code, _dump({"error": str(exc), "kind": type(exc).__name__})


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cutforest", description="structure trees and cubings of cuts")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("json", "dot"), default="json")
        sp.add_argument("--output", "-o")
        sp.add_argument("--seed", type=int, default=0)

    def graph_args(sp):
        sp.add_argument("--fixture")
        sp.add_argument("--input", help="graph JSON: {vertices, edges, base}")
        sp.add_argument("-n", type=int, default=1, help="weight bound")

    def group_args(sp, radius=4):
        sp.add_argument("--group", default="dinf")
        sp.add_argument("--radius", type=int, default=radius)
        sp.add_argument("--interior", type=int)

    common(sub.add_parser("fixtures", help="list named fixtures"))
    for name, helptext in (("cuts", "enumerate cuts and nested generators"),
                           ("tree", "structure tree and the map nu")):
        sp = sub.add_parser(name, help=helptext)
        graph_args(sp)
        common(sp)
    sp = sub.add_parser("decompose", help="canonical expression of a cut")
    graph_args(sp)
    sp.add_argument("--cut", required=True, help="comma separated vertices")
    common(sp)
    sp = sub.add_parser("arena", help="truncated coset graph")
    group_args(sp)
    common(sp)
    sp = sub.add_parser("relative", help="relative tree, corners, crossing cases, overlaps")
    group_args(sp)
    sp.add_argument("-n", type=int, default=1)
    sp.add_argument("--mode", choices=("tree", "corner", "crossing", "overlap", "assemble"),
                    default="tree")
    sp.add_argument("--word", default="", help="group element g")
    sp.add_argument("--a", type=int, help="index of A among the half-spaces")
    sp.add_argument("--b", type=int, help="index of B among the half-spaces")
    sp.add_argument("--ball", type=int, default=2, help="word ball radius for assemble")
    common(sp)
    sp = sub.add_parser("cubing", help="Gamma balls and Sageev graphs")
    sp.add_argument("--system", help="named half-space system")
    sp.add_argument("--labels", help="comma separated coset labels for a Gamma ball")
    sp.add_argument("--radius", type=int, default=2)
    common(sp)
    sp = sub.add_parser("ztree", help="integer tree through orbit points")
    group_args(sp, radius=6)
    sp.add_argument("-n", type=int, default=1)
    sp.add_argument("--ball", type=int, default=3)
    common(sp)
    sp = sub.add_parser("verify", help="run the self-check suites")
    sp.add_argument("--suite", default="all")
    common(sp)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(**{k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__})
    try:
        code, text = run(cfg)
    except Exception as exc:  # anything unexpected is an invariant failure
        code, text = EXIT_INV, _dump({"error": f"{type(exc).__name__}: {exc}", "kind": "internal"})
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    if code:
        try:
            msg = json.loads(text).get("error")
        except (ValueError, AttributeError):
            msg = None
        if msg:
            print(f"cutforest: {msg}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
