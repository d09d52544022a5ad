"""Finite weighted simple graphs and cuts over them.

Vertex ids are opaque strings, mapped once to dense indices; a cut is an
integer bitmask over that order so that set algebra on cuts is O(1).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Iterable

from .errors import CapacityError, StructuralError


def guard(limit: int) -> int:
    """Scale an enumeration guard by CUTFOREST_GUARD_SCALE (default 1)."""
    try:
        scale = float(os.environ.get("CUTFOREST_GUARD_SCALE", "1"))
    except ValueError:
        scale = 1.0
    return max(1, int(limit * scale))


def check_guard(value: int, limit: int, what: str) -> None:
    lim = guard(limit)
    if value > lim:
        raise CapacityError(
            f"{what} = {value} exceeds guard {lim} (raise CUTFOREST_GUARD_SCALE to allow)")


def bits_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class Graph:
    """A connected simple graph with positive integer edge capacities.

    ``edges`` holds ``(i, j, capacity)`` with ``i < j`` over dense indices.
    """

    __slots__ = ("vertices", "index", "edges", "base", "adj", "_nbrs", "_cap")

    def __init__(self, vertices: Iterable, edges: Iterable, base=None):
        verts = tuple(str(v) for v in vertices)
        if len(set(verts)) != len(verts):
            raise StructuralError("duplicate vertex ids")
        if not verts:
            raise StructuralError("graph has no vertices")
        index = {v: i for i, v in enumerate(verts)}
        caps: dict[tuple[int, int], int] = {}
        for e in edges:
            if len(e) == 2:
                u, v, c = e[0], e[1], 1
            elif len(e) == 3:
                u, v, c = e
                c = 1 if c is None else c
            else:
                raise StructuralError(f"bad edge record {e!r}")
            u, v = str(u), str(v)
            if u not in index or v not in index:
                raise StructuralError(f"edge {u}-{v} has an unlisted endpoint")
            if u == v:
                raise StructuralError(f"loop at {u}")
            if not isinstance(c, int) or isinstance(c, bool) or c < 1:
                raise StructuralError(f"capacity of {u}-{v} must be a positive integer")
            i, j = sorted((index[u], index[v]))
            if (i, j) in caps:
                raise StructuralError(f"parallel edge {u}-{v}")
            caps[(i, j)] = c
        self.vertices = verts
        self.index = index
        self.edges = tuple((i, j, c) for (i, j), c in sorted(caps.items()))
        self._cap = caps
        nbrs = [[] for _ in verts]
        adj = [0] * len(verts)
        for i, j, _ in self.edges:
            nbrs[i].append(j)
            nbrs[j].append(i)
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        self._nbrs = tuple(tuple(n) for n in nbrs)
        self.adj = tuple(adj)
        if base is None:
            base = verts[-1]
        base = str(base)
        if base not in index:
            raise StructuralError(f"base vertex {base!r} is not a vertex")
        self.base = base
        if self.components_mask(self.full) != [self.full]:
            raise StructuralError("graph is not connected")

    def __repr__(self):
        return f"Graph(|V|={len(self.vertices)}, |E|={len(self.edges)}, base={self.base!r})"

    def __len__(self):
        return len(self.vertices)

    @property
    def full(self) -> int:
        return (1 << len(self.vertices)) - 1

    @property
    def base_index(self) -> int:
        return self.index[self.base]

    def capacity(self, u, v) -> int:
        i, j = sorted((self.vid(u), self.vid(v)))
        return self._cap[(i, j)]

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self._nbrs[i]

    def vid(self, v) -> int:
        try:
            return self.index[str(v)]
        except KeyError:
            raise StructuralError(f"unknown vertex {v!r}") from None

    def mask(self, vs: Iterable) -> int:
        m = 0
        for v in vs:
            m |= 1 << self.vid(v)
        return m

    def names(self, mask: int) -> frozenset[str]:
        return frozenset(self.vertices[i] for i in bits_of(mask))

    def cut(self, vs: Iterable = ()) -> "Cut":
        return Cut(self, self.mask(vs))

    def weight_mask(self, mask: int) -> int:
        w = 0
        for i, j, c in self.edges:
            if ((mask >> i) ^ (mask >> j)) & 1:
                w += c
        return w

    def components_mask(self, region: int) -> list[int]:
        """Connected components of the induced subgraph, ordered by least index."""
        comps = []
        rest = region
        while rest:
            low = rest & -rest
            comp = low
            frontier = low
            while frontier:
                nxt = 0
                for i in bits_of(frontier):
                    nxt |= self.adj[i]
                nxt &= region & ~comp
                comp |= nxt
                frontier = nxt
            comps.append(comp)
            rest &= ~comp
        return comps

    def is_connected_mask(self, region: int) -> bool:
        return region != 0 and len(self.components_mask(region)) == 1

    def edge_names(self, i: int, j: int) -> tuple[str, str]:
        return (self.vertices[i], self.vertices[j])

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [[self.vertices[i], self.vertices[j], c] for i, j, c in self.edges],
            "base": self.base,
        }

    @classmethod
    def from_json(cls, data) -> "Graph":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            return cls(data["vertices"], data["edges"], data.get("base"))
        except (KeyError, TypeError) as exc:
            raise StructuralError(f"malformed graph JSON: {exc}") from None


@dataclass(frozen=True)
class Cut:
    """A vertex subset A of ``graph``; ``bits`` follows the graph's vertex order."""

    graph: Graph
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits > self.graph.full:
            raise StructuralError("cut bits out of range for graph")

    def _same(self, other: "Cut") -> None:
        if other.graph is not self.graph:
            raise StructuralError("cuts belong to different graphs")

    def __eq__(self, other):
        if not isinstance(other, Cut):
            return NotImplemented
        return self.graph is other.graph and self.bits == other.bits

    def __hash__(self):
        return hash((id(self.graph), self.bits))

    def __repr__(self):
        return "Cut{" + ",".join(sorted(self.members, key=self.graph.vid)) + "}"

    @property
    def members(self) -> frozenset[str]:
        return self.graph.names(self.bits)

    def sorted_members(self) -> list[str]:
        return sorted(self.members, key=self.graph.vid)

    def __contains__(self, v) -> bool:
        return bool(self.bits >> self.graph.vid(v) & 1)

    def __len__(self):
        return bin(self.bits).count("1")

    def __bool__(self):
        return self.bits != 0

    def complement(self) -> "Cut":
        return Cut(self.graph, self.graph.full & ~self.bits)

    star = complement

    def __and__(self, other):
        self._same(other)
        return Cut(self.graph, self.bits & other.bits)

    def __or__(self, other):
        self._same(other)
        return Cut(self.graph, self.bits | other.bits)

    def __xor__(self, other):
        self._same(other)
        return Cut(self.graph, self.bits ^ other.bits)

    def __sub__(self, other):
        self._same(other)
        return Cut(self.graph, self.bits & ~other.bits)

    def issubset(self, other) -> bool:
        self._same(other)
        return self.bits & ~other.bits == 0

    __le__ = issubset

    def is_proper(self) -> bool:
        return 0 != self.bits != self.graph.full


def _check(g: Graph, a: Cut) -> None:
    if a.graph is not g:
        raise StructuralError("cut does not belong to this graph")


def coboundary(g: Graph, a: Cut) -> frozenset[tuple[str, str]]:
    """Edges with exactly one endpoint in ``a``, as vertex-id pairs in graph order."""
    _check(g, a)
    m = a.bits
    return frozenset(g.edge_names(i, j) for i, j, _ in g.edges if ((m >> i) ^ (m >> j)) & 1)


def cut_weight(g: Graph, a: Cut) -> int:
    _check(g, a)
    return g.weight_mask(a.bits)


def separates(g: Graph, a: Cut, u, v) -> bool:
    _check(g, a)
    return (u in a) != (v in a)


def components(g: Graph, region) -> list[frozenset[str]]:
    if isinstance(region, Cut):
        _check(g, region)
        mask = region.bits
    else:
        mask = g.mask(region)
    return [g.names(c) for c in g.components_mask(mask)]
