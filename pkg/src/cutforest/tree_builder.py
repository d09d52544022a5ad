"""Structure trees of nested cut systems and canonical decompositions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .cut_algebra import (NestedSystem, NotNestedError, apply_perm, atoms, extract_nested_generators,
                          in_ring, nested_masks, normalize)
from .errors import DomainError, InvariantError, StructuralError
from .graph_core import Cut, Graph
from .pocset import consistent_orientations, flip_edges, principal


@dataclass(frozen=True)
class OrientationVertex:
    """One half-space per wall; ``choice[k]`` is True when the representative
    of pair k is picked (False picks its complement)."""

    choice: tuple[bool, ...]

    def picks(self, k: int) -> bool:
        return self.choice[k]


class StructureTree:
    """Tree whose edges are the member pairs of a nested system.

    ``edges[k] = (i, j)`` where tree vertex i picks the representative of pair
    k and tree vertex j picks its complement.
    """

    def __init__(self, system: NestedSystem, vertices: list[OrientationVertex],
                 edges: dict[int, tuple[int, int]], nu: dict[str, int]):
        self.system = system
        self.graph = system.graph
        self.vertices = vertices
        self.edges = edges
        self.nu = nu
        self.level = system.level
        self.index = {v.choice: i for i, v in enumerate(vertices)}
        self.adj: list[list[tuple[int, int]]] = [[] for _ in vertices]
        for k, (i, j) in sorted(edges.items()):
            self.adj[i].append((j, k))
            self.adj[j].append((i, k))

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"StructureTree(|V|={len(self.vertices)}, |E|={len(self.edges)}, level={self.level})"

    def degree(self, t: int) -> int:
        return len(self.adj[t])

    def is_tree(self) -> bool:
        if len(self.edges) != len(self.vertices) - 1:
            return False
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for w, _ in self.adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)

    def preimage(self, t: int) -> list[str]:
        return [x for x in self.graph.vertices if self.nu[x] == t]

    def image(self) -> set[int]:
        return set(self.nu.values())

    def path_walls(self, s: int, t: int) -> list[int]:
        """Pairs on the tree geodesic from s to t."""
        a, b = self.vertices[s].choice, self.vertices[t].choice
        return [k for k in range(len(a)) if a[k] != b[k]]

    def distance(self, s: int, t: int) -> int:
        return len(self.path_walls(s, t))

    def to_dot(self, name: str = "T") -> str:
        lines = [f"graph {name} {{"]
        for t in range(len(self.vertices)):
            pre = ",".join(self.preimage(t))
            label = f"t{t}\\n{{{pre}}}" if pre else f"t{t}"
            shape = "ellipse" if pre else "point"
            lines.append(f'  t{t} [label="{label}", shape={shape}];')
        for k, (i, j) in sorted(self.edges.items()):
            c = ",".join(Cut(self.graph, self.system.masks[k]).sorted_members())
            lines.append(f'  t{i} -- t{j} [label="{{{c}}}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "vertices": [{"id": t, "preimage": self.preimage(t)} for t in range(len(self.vertices))],
            "edges": [{"pair": k, "cut": Cut(self.graph, self.system.masks[k]).sorted_members(),
                       "inside": i, "outside": j} for k, (i, j) in sorted(self.edges.items())],
            "nu": dict(self.nu),
        }


def _walls(system: NestedSystem) -> list[tuple[int, int]]:
    full = system.graph.full
    return [(m, full & ~m) for m in system.masks]


def build_tree(system: NestedSystem) -> StructureTree:
    w = system.crossing_witness()
    if w is not None:
        raise NotNestedError(f"cuts {w[0]} and {w[1]} cross", w)
    walls = _walls(system)
    orients = consistent_orientations(walls)
    vertices = [OrientationVertex(o) for o in orients]
    edges = {k: (i, j) for i, j, k in flip_edges(orients)}
    g = system.graph
    pos = {o: i for i, o in enumerate(orients)}
    nu = {}
    for x in g.vertices:
        o = principal(walls, g.index[x])
        if o not in pos:
            raise InvariantError(f"principal orientation of {x} is inconsistent")
        nu[x] = pos[o]
    tree = StructureTree(system, vertices, edges, nu)
    if len(edges) != len(system) or not tree.is_tree():
        raise InvariantError("orientation graph of a nested system is not a tree")
    return tree


def structure_tree(g: Graph, n: int) -> StructureTree:
    return build_tree(extract_nested_generators(g, n))


def tree_automorphism(tree: StructureTree, perm: Sequence[int]) -> list[int]:
    """Permutation of tree vertices induced by a graph automorphism that
    leaves the system invariant."""
    sysm = tree.system
    g = tree.graph
    full = g.full
    image = []  # wall k -> (wall l, flipped)
    for m in sysm.masks:
        pm = apply_perm(perm, m)
        l = sysm.pair_index(pm)
        if l is None:
            raise DomainError("automorphism does not preserve the system")
        image.append((l, sysm.masks[l] != pm))
    out = []
    for v in tree.vertices:
        new = [None] * len(v.choice)
        for k, (l, flip) in enumerate(image):
            new[l] = v.choice[k] != flip
        out.append(tree.index[tuple(new)])
    return out


# --- canonical decomposition -------------------------------------------------

FORMS = ("direct-union", "complemented-union", "recursive-merge")


@dataclass(frozen=True)
class CanonicalExpression:
    """Expression of a cut over the member pairs of a nested system.

    ``sides[t]`` is True when tree vertex t is on the A-side; this is the
    canonical artifact. ``generators`` and ``form`` are derived from it:
    direct-union means A is the union of the generators, complemented-union
    that A is the complement of their union, recursive-merge that A is the
    symmetric difference of the base-avoiding representatives of the
    generator pairs, complemented when ``base_in_a``.
    """

    tree: StructureTree = field(repr=False)
    sides: tuple[bool, ...]
    generators: tuple[Cut, ...]
    form: str
    base_in_a: bool
    tie_rule_vertices: tuple[int, ...] = ()

    @property
    def pairs(self) -> tuple[int, ...]:
        return tuple(sorted(self.tree.system.pair_index(c) for c in self.generators))

    def to_json(self) -> dict:
        return {
            "form": self.form,
            "generators": [c.sorted_members() for c in self.generators],
            "a_side_tree_vertices": [t for t, s in enumerate(self.sides) if s],
            "base_in_a": self.base_in_a,
            "tie_rule_vertices": list(self.tie_rule_vertices),
            "tie_rule": "non-image vertex joins the side with strictly more incident "
                        "member subsets; exact ties go to the complement side",
        }


def _mu_mask(a: int, system: NestedSystem) -> list[int]:
    full = system.graph.full
    return [k for k, m in enumerate(system.masks) if not nested_masks(a, m, full)]


def _twigs(tree: StructureTree, crossing: list[int]) -> list[int]:
    deg: dict[int, int] = {}
    for k in crossing:
        for t in tree.edges[k]:
            deg[t] = deg.get(t, 0) + 1
    return [k for k in crossing if any(deg[t] == 1 for t in tree.edges[k])]


def _nested_sides(a: int, tree: StructureTree, ties: list[int]) -> frozenset[int]:
    """Tree vertices on the A-side for a cut nested with every member."""
    system = tree.system
    g = tree.graph
    full = g.full
    n = len(tree.vertices)
    if a == 0:
        return frozenset()
    if a == full:
        return frozenset(range(n))
    k = system.pair_index(a)
    if k is not None:
        pick = system.masks[k] == a
        return frozenset(t for t, v in enumerate(tree.vertices) if v.choice[k] == pick)
    ac = full & ~a
    zc = []
    for m in system.masks:
        inside = (m & ~a) == 0 or (m & ~ac) == 0  # representative lies in A or in A*
        zc.append(not inside)
    z = tree.index.get(tuple(zc))
    if z is None:
        raise InvariantError("cut nested with the system does not determine a tree vertex")
    out = set()
    n_a = n_as = 0
    for _, k in tree.adj[z]:
        x = system.masks[k] if not zc[k] else full & ~system.masks[k]  # half away from z
        on_a = (x & ~a) == 0
        if on_a:
            n_a += 1
        else:
            n_as += 1
        out.update(t for t, v in enumerate(tree.vertices) if v.choice[k] != zc[k] and on_a)
    pre = [x for x in g.vertices if tree.nu[x] == z]
    if pre:
        if (a >> g.index[pre[0]]) & 1:
            out.add(z)
    else:
        ties.append(z)
        if n_a > n_as:
            out.add(z)
    return frozenset(out)


def _default_choice(twigs: list[int]) -> int:
    return twigs[0]


def _sides(a: int, tree: StructureTree, choose, ties, twigs_only=True) -> frozenset[int]:
    crossing = _mu_mask(a, tree.system)
    if not crossing:
        return _nested_sides(a, tree, ties)
    options = _twigs(tree, crossing) if twigs_only else crossing
    if not options:
        raise InvariantError("crossing members have no twig")
    k = choose(options)
    c = tree.system.masks[k]
    full = tree.graph.full
    s1 = _sides(a & c, tree, choose, ties, twigs_only)
    s2 = _sides(a & (full & ~c), tree, choose, ties, twigs_only)
    return s1 ^ s2


def _check_domain(a: Cut, system: NestedSystem, tree: StructureTree) -> None:
    if a.graph is not system.graph:
        raise StructuralError("cut and system live on different graphs")
    if tree.system is not system:
        raise StructuralError("tree was not built from this system")
    full = system.graph.full
    blocks = atoms(list(system.masks) + [full & ~m for m in system.masks], full) if len(system) else []
    if not in_ring(a.bits, blocks):
        raise DomainError(f"{a} is not in the ring generated by the system")


def expression_from_sides(tree: StructureTree, sides: Sequence[bool], ties=()) -> CanonicalExpression:
    system = tree.system
    g = tree.graph
    full = g.full
    sset = {t for t, s in enumerate(sides) if s}
    toward, away = [], []
    for k, (i, j) in sorted(tree.edges.items()):
        if sides[i] != sides[j]:
            m = system.masks[k]
            toward.append(m if sides[i] else full & ~m)
            away.append(full & ~toward[-1])

    def branch(x):
        k = system.pair_index(x)
        pick = system.masks[k] == x
        return {t for t, v in enumerate(tree.vertices) if v.choice[k] == pick}

    union_t = set().union(*(branch(x) for x in toward)) if toward else set()
    union_a = set().union(*(branch(x) for x in away)) if away else set()
    if union_t == sset:
        form, gens = "direct-union", toward
    elif union_a == set(range(len(sides))) - sset:
        form, gens = "complemented-union", away
    else:
        form, gens = "recursive-merge", toward
    return CanonicalExpression(
        tree=tree, sides=tuple(bool(s) for s in sides),
        generators=tuple(Cut(g, m) for m in gens), form=form,
        base_in_a=bool(sides[tree.nu[g.base]]), tie_rule_vertices=tuple(sorted(set(ties))))


def canonical_decomposition(a: Cut, system: NestedSystem, tree: StructureTree,
                            choose: Callable[[list[int]], int] | None = None) -> CanonicalExpression:
    """Canonical expression of ``a`` by induction on its crossing number.

    Cuts nested with every member are read off a single tree vertex; otherwise
    ``a`` is split along a twig of the subtree of crossing members and the two
    halves are merged, dropping pairs that occur in both.
    """
    _check_domain(a, system, tree)
    ties: list[int] = []
    s = _sides(a.bits, tree, choose or _default_choice, ties)
    sides = [t in s for t in range(len(tree.vertices))]
    return expression_from_sides(tree, sides, ties)


def decomposition_variants(a: Cut, system: NestedSystem, tree: StructureTree,
                           twigs_only: bool = True) -> set[frozenset[int]]:
    """A-side vertex sets reachable over every admissible order of splits."""
    _check_domain(a, system, tree)
    memo: dict[int, set[frozenset[int]]] = {}
    full = tree.graph.full

    def rec(m):
        if m in memo:
            return memo[m]
        crossing = _mu_mask(m, system)
        if not crossing:
            res = {_nested_sides(m, tree, [])}
        else:
            res = set()
            for k in (_twigs(tree, crossing) if twigs_only else crossing):
                c = system.masks[k]
                for s1 in rec(m & c):
                    for s2 in rec(m & (full & ~c)):
                        res.add(s1 ^ s2)
        memo[m] = res
        return res

    return rec(a.bits)


def evaluate_expression(expr: CanonicalExpression) -> Cut:
    """The cut an expression denotes, computed from its generator form alone."""
    g = expr.tree.graph
    full = g.full
    gens = expr.generators
    if expr.form not in FORMS:
        raise StructuralError(f"unknown expression form {expr.form!r}")
    for c in gens:
        if c.graph is not g:
            raise StructuralError("generator from another graph")
    u = 0
    for c in gens:
        u |= c.bits
    if expr.form == "direct-union":
        return Cut(g, u)
    if expr.form == "complemented-union":
        return Cut(g, full & ~u)
    m = full if expr.base_in_a else 0
    for c in gens:
        m ^= normalize(g, c.bits)
    return Cut(g, m)
