"""Named graph fixtures and the seeded small-graph corpus."""

from __future__ import annotations

import random

import networkx as nx

from .graph_core import Graph


def path_graph(n: int) -> Graph:
    vs = [str(i) for i in range(1, n + 1)]
    return Graph(vs, [(vs[i], vs[i + 1]) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    vs = [str(i) for i in range(1, n + 1)]
    return Graph(vs, [(vs[i], vs[(i + 1) % n]) for i in range(n)])


def barbell() -> Graph:
    vs = [str(i) for i in range(1, 7)]
    es = [("1", "2"), ("1", "3"), ("2", "3"), ("4", "5"), ("4", "6"), ("5", "6"), ("3", "4")]
    return Graph(vs, es)


def grid(rows: int, cols: int) -> Graph:
    """Grid graph; vertices are numbered row by row from 1."""
    name = lambda r, c: str(r * cols + c + 1)
    vs = [name(r, c) for r in range(rows) for c in range(cols)]
    es = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                es.append((name(r, c), name(r, c + 1)))
            if r + 1 < rows:
                es.append((name(r, c), name(r + 1, c)))
    return Graph(vs, es)


def from_networkx(G: nx.Graph, weight: str | None = None) -> Graph:
    nodes = sorted(G.nodes())
    rename = {v: str(i + 1) for i, v in enumerate(nodes)}
    es = []
    for u, v, data in G.edges(data=True):
        c = data.get(weight, 1) if weight else 1
        es.append((rename[u], rename[v], c))
    return Graph([rename[v] for v in nodes], es)


GRAPH_FIXTURES = {
    "path4": lambda: path_graph(4),
    "barbell": barbell,
    "c4": lambda: cycle_graph(4),
    "c6": lambda: cycle_graph(6),
    "grid2x3": lambda: grid(2, 3),
    "k4": lambda: from_networkx(nx.complete_graph(4)),
    "petersen": lambda: from_networkx(nx.petersen_graph()),
}


def graph_fixture(name: str) -> Graph:
    try:
        return GRAPH_FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown graph fixture {name!r}; known: {sorted(GRAPH_FIXTURES)}") from None


def corpus(max_atlas_vertices: int = 6, n_random: int = 30, seed: int = 20240601) -> list[tuple[str, Graph]]:
    """Connected graphs for exhaustive property checks.

    Every connected graph from the networkx atlas with 2..max_atlas_vertices
    vertices, followed by ``n_random`` seeded random connected graphs on 7 or 8
    vertices, some with capacities 2.
    """
    out = []
    for k, G in enumerate(nx.graph_atlas_g()):
        n = G.number_of_nodes()
        if n > max_atlas_vertices:
            break
        if n >= 2 and nx.is_connected(G):
            out.append((f"atlas{k}", from_networkx(G)))
    rng = random.Random(seed)
    made = 0
    while made < n_random:
        n = rng.choice((7, 8))
        p = rng.uniform(0.25, 0.6)
        G = nx.gnp_random_graph(n, p, seed=rng.randrange(1 << 30))
        if not nx.is_connected(G):
            continue
        if made % 3 == 2:
            for u, v in G.edges():
                G[u][v]["c"] = rng.choice((1, 1, 2))
            g = from_networkx(G, "c")
        else:
            g = from_networkx(G)
        out.append((f"rand{made}", g))
        made += 1
    return out
