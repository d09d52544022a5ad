"""The Boolean ring of cuts: enumeration, corners, nested generating sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from networkx.algorithms.isomorphism import GraphMatcher
import networkx as nx

from .errors import CapacityError, GenerationError, PreconditionError, StructuralError
from .graph_core import Cut, Graph, bits_of, check_guard

ENUM_GUARD = 24
AUT_GUARD = 10
CLOSURE_GUARD = 1 << 16


class NotNestedError(PreconditionError):
    def __init__(self, msg, witness):
        super().__init__(msg)
        self.witness = witness


def nested_masks(a: int, b: int, full: int) -> bool:
    """True when at least one of the four corners of a and b is empty."""
    na, nb = full & ~a, full & ~b
    return not (a & b) or not (a & nb) or not (na & b) or not (na & nb)


def normalize(g: Graph, mask: int) -> int:
    """Representative of {A, A*}: the side not containing the base vertex."""
    if mask >> g.base_index & 1:
        return g.full & ~mask
    return mask


@dataclass(frozen=True)
class CornerReport:
    a: Cut
    b: Cut
    corners: tuple[Cut, Cut, Cut, Cut]  # A∩B, A∩B*, A*∩B, A*∩B*
    empty: tuple[bool, bool, bool, bool]

    @property
    def nested(self) -> bool:
        return any(self.empty)

    def to_json(self) -> dict:
        names = ("A&B", "A&B*", "A*&B", "A*&B*")
        return {
            "corners": {n: c.sorted_members() for n, c in zip(names, self.corners)},
            "empty": dict(zip(names, self.empty)),
            "nested": self.nested,
        }


def corner_analysis(a: Cut, b: Cut) -> CornerReport:
    if a.graph is not b.graph:
        raise StructuralError("cuts belong to different graphs")
    ac, bc = a.complement(), b.complement()
    corners = (a & b, a & bc, ac & b, ac & bc)
    return CornerReport(a, b, corners, tuple(not c for c in corners))


def enumerate_cuts(g: Graph, n: int, both_sides_connected: bool = False) -> list[Cut]:
    """Proper cuts of weight at most n, one per {A, A*}, in bitset order."""
    if n < 1:
        raise PreconditionError("weight bound n must be >= 1")
    return [Cut(g, m) for m in _cut_masks(g, n, both_sides_connected)]


def _cut_masks(g: Graph, n: int, both_sides_connected: bool) -> list[int]:
    check_guard(len(g), ENUM_GUARD, "vertex count")
    b = g.base_index
    full = g.full
    out = []
    # enumerate subsets of V - {base} via a compressed counter
    others = [i for i in range(len(g)) if i != b]
    for k in range(1, 1 << len(others)):
        m = 0
        kk = k
        while kk:
            low = kk & -kk
            m |= 1 << others[low.bit_length() - 1]
            kk ^= low
        if g.weight_mask(m) > n:
            continue
        if both_sides_connected and not (
                g.is_connected_mask(m) and g.is_connected_mask(full & ~m)):
            continue
        out.append(m)
    out.sort()
    return out


class NestedSystem:
    """A complement-closed family of pairwise nested cuts.

    Stored as one representative per {C, C*} pair (the side avoiding the base
    vertex), sorted by bitmask.
    """

    def __init__(self, graph: Graph, cuts: Iterable, level: int | None = None,
                 automorphisms: Sequence[tuple[int, ...]] = (), check: bool = True):
        masks = set()
        for c in cuts:
            m = c.bits if isinstance(c, Cut) else int(c)
            if isinstance(c, Cut) and c.graph is not graph:
                raise StructuralError("cut belongs to another graph")
            m = normalize(graph, m)
            if m == 0:
                raise PreconditionError("empty cut (or whole vertex set) in a nested system")
            masks.add(m)
        self.graph = graph
        self.masks = tuple(sorted(masks))
        self.level = level
        self.automorphisms = tuple(automorphisms)
        self._pos = {m: i for i, m in enumerate(self.masks)}
        if check:
            w = self.crossing_witness()
            if w is not None:
                raise NotNestedError(f"cuts {w[0]} and {w[1]} cross", w)

    def crossing_witness(self):
        full = self.graph.full
        ms = self.masks
        for i in range(len(ms)):
            for j in range(i + 1, len(ms)):
                if not nested_masks(ms[i], ms[j], full):
                    return (Cut(self.graph, ms[i]), Cut(self.graph, ms[j]))
        return None

    @property
    def members(self) -> tuple[Cut, ...]:
        return tuple(Cut(self.graph, m) for m in self.masks)

    def half_spaces(self) -> list[Cut]:
        full = self.graph.full
        return [Cut(self.graph, m) for m in self.masks] + [
            Cut(self.graph, full & ~m) for m in self.masks]

    def __len__(self):
        return len(self.masks)

    def __iter__(self):
        return iter(self.members)

    def pair_index(self, c: Cut | int) -> int | None:
        m = c.bits if isinstance(c, Cut) else c
        return self._pos.get(normalize(self.graph, m))

    def __contains__(self, c) -> bool:
        return self.pair_index(c) is not None

    def as_sets(self) -> set[frozenset[str]]:
        return {self.graph.names(m) for m in self.masks}

    def to_json(self) -> dict:
        return {"level": self.level,
                "cuts": [Cut(self.graph, m).sorted_members() for m in self.masks]}

    def __repr__(self):
        return f"NestedSystem(level={self.level}, {list(self.members)})"


def mu(a: Cut, system: NestedSystem) -> int:
    """Number of member pairs of ``system`` not nested with ``a``."""
    if a.graph is not system.graph:
        raise StructuralError("cut and system live on different graphs")
    full = system.graph.full
    return sum(1 for m in system.masks if not nested_masks(a.bits, m, full))


def _generator_masks(generators) -> tuple[Graph | None, list[int]]:
    if isinstance(generators, NestedSystem):
        return generators.graph, [c.bits for c in generators.half_spaces()]
    gens = list(generators)
    if not gens:
        return None, []
    g = gens[0].graph
    for c in gens:
        if c.graph is not g:
            raise StructuralError("generators live on different graphs")
    return g, [c.bits for c in gens]


def atoms(masks: Sequence[int], universe: int) -> list[int]:
    """Blocks of the partition of the union of ``masks`` by membership pattern."""
    sig: dict[tuple, int] = {}
    for i in bits_of(universe):
        key = tuple(m >> i & 1 for m in masks)
        if any(key):
            sig[key] = sig.get(key, 0) | (1 << i)
    return sorted(sig.values())


def ring_closure(generators, limit: int = CLOSURE_GUARD) -> set[Cut]:
    """Closure of the generators and the empty set under symmetric difference
    and intersection.

    A NestedSystem contributes both sides of every pair. The subring generated
    by finitely many sets is the set of unions of their atoms, which is what
    is built here.
    """
    g, masks = _generator_masks(generators)
    if g is None:
        raise PreconditionError("ring_closure needs at least one generator")
    blocks = atoms(masks, g.full)
    if (1 << len(blocks)) > limit:
        raise CapacityError(f"closure would hold 2^{len(blocks)} sets, over limit {limit}")
    out = set()
    for k in range(1 << len(blocks)):
        m = 0
        for i, blk in enumerate(blocks):
            if k >> i & 1:
                m |= blk
        out.add(Cut(g, m))
    return out


def in_ring(c: Cut | int, blocks: Sequence[int], graph: Graph | None = None) -> bool:
    """Whether ``c`` is a union of the given atoms."""
    m = c.bits if isinstance(c, Cut) else c
    covered = 0
    for blk in blocks:
        if m & blk:
            if blk & ~m:
                return False
            covered |= blk
    return covered == m


def in_ring_closure(c: Cut, generators) -> bool:
    g, masks = _generator_masks(generators)
    if g is None:
        return c.bits == 0
    return in_ring(c, atoms(masks, g.full))


def automorphisms(g: Graph) -> list[tuple[int, ...]]:
    """All capacity-preserving automorphisms, as index permutations."""
    check_guard(len(g), AUT_GUARD, "vertex count for automorphism search")
    G = nx.Graph()
    G.add_nodes_from(range(len(g)))
    for i, j, c in g.edges:
        G.add_edge(i, j, c=c)
    gm = GraphMatcher(G, G, edge_match=lambda x, y: x["c"] == y["c"])
    perms = [tuple(m[i] for i in range(len(g))) for m in gm.isomorphisms_iter()]
    perms.sort()
    return perms


def apply_perm(perm: Sequence[int], mask: int) -> int:
    out = 0
    for i in bits_of(mask):
        out |= 1 << perm[i]
    return out


def extract_nested_generators(g: Graph, n: int, auts: Sequence[tuple[int, ...]] | None = None
                              ) -> NestedSystem:
    """A nested, automorphism-invariant generating set of the weight-<=n cuts.

    Levels are built in turn, each seeded with the previous one, so the result
    for i is contained in the result for j >= i. At each level candidates
    (both sides connected) are tried in (weight, crossings with the pool,
    bitmask) order; whole automorphism orbits are accepted or rejected at once.
    """
    if n < 1:
        raise PreconditionError("level n must be >= 1")
    if auts is None:
        auts = automorphisms(g)
    full = g.full
    accepted: list[int] = []
    acc_set: set[int] = set()
    for k in range(1, n + 1):
        targets = _cut_masks(g, k, False)
        pool = _cut_masks(g, k, True)

        def uncovered():
            if not accepted:
                return list(targets)
            blocks = atoms(accepted + [full & ~m for m in accepted], full)
            return [t for t in targets if not in_ring(t, blocks)]

        if not uncovered():
            continue
        cross = {c: sum(1 for d in pool if not nested_masks(c, d, full)) for c in pool}
        order = sorted(pool, key=lambda c: (g.weight_mask(c), cross[c], c))
        for c in order:
            if c in acc_set:
                continue
            orbit = sorted({normalize(g, apply_perm(p, c)) for p in auts} | {c})
            ok = all(nested_masks(x, y, full) for i, x in enumerate(orbit) for y in orbit[i + 1:])
            ok = ok and all(nested_masks(x, y, full) for x in orbit for y in accepted)
            if not ok:
                continue
            for x in orbit:
                if x not in acc_set:
                    accepted.append(x)
                    acc_set.add(x)
            if not uncovered():
                break
        left = uncovered()
        if left:
            raise GenerationError(
                f"greedy selection at level {k} does not generate {len(left)} cut(s)",
                [Cut(g, m) for m in left])
    return NestedSystem(g, accepted, level=n, automorphisms=auts)
