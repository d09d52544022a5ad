import pytest
from hypothesis import given

import oracles
from strategies import connected_graphs
from cutforest.cut_algebra import (NestedSystem, NotNestedError, apply_perm, automorphisms,
                                   extract_nested_generators, ring_closure)
from cutforest.errors import DomainError
from cutforest.fixtures import graph_fixture
from cutforest.tree_builder import (CanonicalExpression, build_tree, canonical_decomposition,
                                    decomposition_variants, evaluate_expression, structure_tree,
                                    tree_automorphism)

SMALL = ["path4", "barbell", "c4", "c6", "grid2x3", "k4"]


def test_single_wall(path4):
    t = build_tree(NestedSystem(path4, [path4.cut("12")]))
    assert len(t) == 2 and len(t.edges) == 1 and t.is_tree()


def test_path4_tree(path4):
    t = structure_tree(path4, 1)
    assert len(t) == 4 and sorted(t.degree(i) for i in range(4)) == [1, 1, 2, 2]
    assert len({t.nu[x] for x in "1234"}) == 4


def test_c4_star(c4):
    t = structure_tree(c4, 2)
    assert len(t) == 5
    degs = sorted(t.degree(i) for i in range(5))
    assert degs == [1, 1, 1, 1, 4]
    center = next(i for i in range(5) if t.degree(i) == 4)
    assert center not in t.image()
    assert t.preimage(center) == []
    assert 'shape=point' in t.to_dot()


def test_c4_level1_trivial(c4):
    t = structure_tree(c4, 1)
    assert len(t) == 1 and not t.edges and t.is_tree()


def test_barbell_level1(barbell):
    t = structure_tree(barbell, 1)
    assert len(t) == 2 and len(t.edges) == 1
    assert len({t.nu[x] for x in "123"}) == 1 and len({t.nu[x] for x in "456"}) == 1
    assert t.nu["1"] != t.nu["4"]


def test_build_tree_rejects_crossing(c4):
    s = NestedSystem(c4, [c4.cut("12"), c4.cut("23")], check=False)
    with pytest.raises(NotNestedError) as ei:
        build_tree(s)
    assert {frozenset(c.members) for c in ei.value.witness} == {frozenset("12"), frozenset("23")}


def check_separation(g, n):
    t = structure_tree(g, n)
    assert t.is_tree()
    cuts = oracles.all_cuts(g, n)
    vs = list(g.vertices)
    for i, x in enumerate(vs):
        for y in vs[i + 1:]:
            sep = any((x in A) != (y in A) for A in cuts)
            assert (t.nu[x] == t.nu[y]) == (not sep), (x, y)


@pytest.mark.parametrize("name", SMALL + ["petersen"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_separation_fixtures(name, n):
    check_separation(graph_fixture(name), n)


@given(connected_graphs(max_n=7, max_cap=2))
def test_separation_random(g):
    for n in (1, 2):
        check_separation(g, n)


@pytest.mark.parametrize("name", SMALL)
def test_orientations_match_oracle(name):
    g = graph_fixture(name)
    for n in (1, 2):
        E = extract_nested_generators(g, n)
        t = build_tree(E)
        pairs = [(c.members, frozenset(g.vertices) - c.members) for c in E]
        want = set(oracles.orientations(pairs))
        assert {v.choice for v in t.vertices} == want
        for k, (i, j) in t.edges.items():
            a, b = t.vertices[i].choice, t.vertices[j].choice
            assert [l for l in range(len(a)) if a[l] != b[l]] == [k]


@pytest.mark.parametrize("name", ["c4", "barbell", "c6", "grid2x3"])
def test_nu_equivariant(name):
    g = graph_fixture(name)
    t = structure_tree(g, 2)
    for p in automorphisms(g):
        sig = tree_automorphism(t, p)
        assert sorted(sig) == list(range(len(t)))
        for x in g.vertices:
            y = g.vertices[p[g.index[x]]]
            assert t.nu[y] == sig[t.nu[x]]
        for k, (i, j) in t.edges.items():
            assert any({sig[i], sig[j]} == {a, b} for a, b in t.edges.values())


def test_decompose_member(path4):
    E = extract_nested_generators(path4, 1)
    t = build_tree(E)
    e = canonical_decomposition(path4.cut("1"), E, t)
    assert [c.members for c in e.generators] == [frozenset("1")]
    assert evaluate_expression(e) == path4.cut("1")


def test_decompose_path4_13(path4):
    E = extract_nested_generators(path4, 1)
    t = build_tree(E)
    a = path4.cut("13")
    e = canonical_decomposition(a, E, t)
    assert [e.sides[t.nu[x]] for x in "1234"] == [True, False, True, False]
    assert evaluate_expression(e) == a
    assert len(decomposition_variants(a, E, t)) == 1
    assert len(decomposition_variants(a, E, t, twigs_only=False)) == 1


def test_decompose_c4_union(c4):
    E = extract_nested_generators(c4, 2)
    t = build_tree(E)
    e = canonical_decomposition(c4.cut("12"), E, t)
    assert e.form == "direct-union"
    assert {c.members for c in e.generators} == {frozenset("1"), frozenset("2")}
    center = next(i for i in range(len(t)) if t.degree(i) == 4)
    assert e.sides[center] is False
    assert e.tie_rule_vertices == (center,)
    assert e.to_json()["tie_rule_vertices"] == [center]


def test_empty_set_at_non_image_vertex(c4):
    E = extract_nested_generators(c4, 2)
    t = build_tree(E)
    gens = tuple(c4.cut(x) for x in "1234")  # every edge at the center, toward it
    expr = CanonicalExpression(t, (False,) * len(t), gens, "complemented-union", False)
    assert evaluate_expression(expr) == c4.cut()
    assert canonical_decomposition(c4.cut(), E, t).sides == (False,) * len(t)


def test_domain_error(c4):
    E = extract_nested_generators(c4, 1)  # empty system
    t = build_tree(E)
    with pytest.raises(DomainError):
        canonical_decomposition(c4.cut("12"), E, t)


def check_decompositions(g, n):
    E = extract_nested_generators(g, n)
    t = build_tree(E)
    auts = automorphisms(g)
    exprs = {}
    for a in ring_closure(E) if len(E) else [g.cut()]:
        e = canonical_decomposition(a, E, t)
        assert evaluate_expression(e) == a
        for x in g.vertices:
            assert e.sides[t.nu[x]] == (x in a)
        assert decomposition_variants(a, E, t) == {frozenset(i for i, s in enumerate(e.sides) if s)}
        exprs[a.bits] = e
    for p in auts:
        sig = tree_automorphism(t, p)
        for m, e in exprs.items():
            img = exprs[apply_perm(p, m)]
            assert all(img.sides[sig[i]] == s for i, s in enumerate(e.sides))


@pytest.mark.parametrize("name", SMALL)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_decomposition_properties(name, n):
    check_decompositions(graph_fixture(name), n)
