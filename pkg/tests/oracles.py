"""Brute-force oracles, deliberately independent of the package internals."""

import itertools

import networkx as nx


def raw(g):
    """(vertices, [(u, v, c)]) from a Graph, via its JSON form only."""
    d = g.to_json()
    return d["vertices"], [tuple(e) for e in d["edges"]]


def nx_graph(g):
    vs, es = raw(g)
    G = nx.Graph()
    G.add_nodes_from(vs)
    for u, v, c in es:
        G.add_edge(u, v, c=c)
    return G


def subsets(vs):
    for r in range(len(vs) + 1):
        for s in itertools.combinations(vs, r):
            yield frozenset(s)


def coboundary(g, A):
    _, es = raw(g)
    return {(u, v) for u, v, _ in es if (u in A) != (v in A)}


def weight(g, A):
    _, es = raw(g)
    return sum(c for u, v, c in es if (u in A) != (v in A))


def all_cuts(g, n):
    """Every proper vertex subset of weight <= n (both sides of each pair)."""
    vs, _ = raw(g)
    full = frozenset(vs)
    return [A for A in subsets(vs) if A and A != full and weight(g, A) <= n]


def cut_pairs(g, n):
    """{A, A*} pairs as frozensets of frozensets."""
    full = frozenset(raw(g)[0])
    return {frozenset({A, full - A}) for A in all_cuts(g, n)}


def nested(A, B, full):
    Ac, Bc = full - A, full - B
    return not (A & B) or not (A & Bc) or not (Ac & B) or not (Ac & Bc)


def separated(g, n, x, y):
    return any((x in A) != (y in A) for A in all_cuts(g, n))


def automorphisms(g):
    vs, es = raw(g)
    E = {frozenset((u, v)): c for u, v, c in es}
    out = []
    for p in itertools.permutations(vs):
        m = dict(zip(vs, p))
        if all(E.get(frozenset((m[u], m[v]))) == c for u, v, c in es):
            out.append(m)
    return out


def ring_fixpoint(gens):
    """Closure under symmetric difference and intersection by naive iteration."""
    cur = {frozenset()} | {frozenset(x) for x in gens}
    while True:
        new = set(cur)
        for a in cur:
            for b in cur:
                new.add(a ^ b)
                new.add(a & b)
        if new == cur:
            return cur
        cur = new


def orientations(halfpairs):
    """All picks satisfying (1) one per pair and (2) upward closure, by 2^m scan."""
    m = len(halfpairs)
    out = []
    for bits in itertools.product((True, False), repeat=m):
        chosen = [halfpairs[k][0] if bits[k] else halfpairs[k][1] for k in range(m)]
        allh = [h for p in halfpairs for h in p]
        ok = all(C in chosen for B in chosen for C in allh if B <= C)
        if ok:
            out.append(bits)
    return out


def coset_classes(G, radius):
    """Elements of a word ball grouped into left H-cosets using only in_H and
    normal forms: x ~ y iff x^-1 y in H."""
    elems = G.ball(radius)
    classes = []
    for x in elems:
        for c in classes:
            if G.in_H(G.inv(c[0]) + x):
                c.append(x)
                break
        else:
            classes.append([x])
    return classes


def coset_graph(G, radius, keep):
    """Edges {xH, xsH} among the classes whose shortlex-least element passes keep."""
    classes = coset_classes(G, radius)
    label = {}
    for c in classes:
        m = min(c, key=lambda w: (len(w), w))
        for x in c:
            label[x] = m
    steps = [G.normal_form(s) for s in G.s_gens] + [G.inv(s) for s in G.s_gens]
    verts = {label[x] for x in label if keep(label[x])}
    edges = set()
    for x in label:
        for s in steps:
            y = G.mul(x, s)
            if y in label and label[x] in verts and label[y] in verts and label[x] != label[y]:
                edges.add(frozenset((label[x], label[y])))
    return verts, edges
