import networkx as nx
import pytest
from hypothesis import given, strategies as st

import oracles
from cutforest.errors import OracleError, PreconditionError, TruncationError
from cutforest.group_arena import (act, arena_fixture, build_coset_graph, coboundary_edges, is_H_finite,
                                   quotient_graph, rep_of)
from cutforest.groups import GROUP_FIXTURES, GroupOracle, group_fixture


@pytest.mark.parametrize("name", sorted(GROUP_FIXTURES))
def test_fixture_axioms(name):
    G = group_fixture(name)
    G.check_confluence(5)
    sample = G.ball(2)
    G.check_axioms(sample)


@pytest.mark.parametrize("name", sorted(GROUP_FIXTURES))
@given(data=st.data())
def test_normal_forms_random_words(name, data):
    G = group_fixture(name)
    w = data.draw(st.text(alphabet="".join(G.letters), max_size=12))
    u = data.draw(st.text(alphabet="".join(G.letters), max_size=6))
    assert G.normal_form(w) == G.normal_form(w, rightmost=True)
    assert G.mul(w, G.inv(w)) == ""
    c = G.coset(w)
    assert G.coset(c) == c and G.in_H(G.inv(w) + c)
    for h in G.h_gens:
        assert G.coset(w + h) == c
    assert G.coset(u + w) == G.coset(u + c)  # left translation is well defined on cosets


def test_nonconfluent_rejected():
    bad = GroupOracle("bad", ("a", "b"), (("ab", ""), ("ba", "b")), {"a": "b", "b": "a"},
                      (), ("a",), lambda w: w, lambda w: w == "")
    with pytest.raises(OracleError):
        bad.check_confluence(3)


def test_unknown_fixture():
    with pytest.raises(PreconditionError):
        group_fixture("sl2z")


def test_z_line():
    a = arena_fixture("z", 4)
    assert len(a.graph) == 9
    G = nx.Graph(a.edges())
    assert nx.is_isomorphic(G, nx.path_graph(9))
    assert a.boundary == {"tttt", "TTTT"}
    d = a.to_json()
    assert d["radius"] == 4 and d["interior_radius"] == 3 and d["boundary"]


def test_dinf_line():
    a = arena_fixture("dinf", 4)
    assert nx.is_isomorphic(nx.Graph(a.edges()), nx.path_graph(len(a.graph)))
    assert a.translate("s", "o") == "o"
    assert a.translate("s", "t") == "st"


def test_f2_tree():
    a = arena_fixture("f2", 3)
    G = nx.Graph(a.edges())
    assert nx.is_tree(G)
    # o branches once for every a^k b^{+-1}
    assert G.degree("o") == len({a.translate(h, v) for h in a.h_sample for v in ("b", "B")} & set(G))


@pytest.mark.parametrize("name,r", [("z", 4), ("dinf", 4), ("f2", 3), ("z2", 3), ("z2z3", 3),
                                    ("bs-amalgam", 4)])
def test_arena_matches_coset_enumeration(name, r):
    a = arena_fixture(name, r)
    G = a.oracle
    verts, edges = oracles.coset_graph(G, r + 1, lambda w: len(G.coset(w)) <= r)
    got_v = {G.coset(rep_of(v)) for v in a.graph.vertices}
    assert {G.coset(w) for w in verts} == got_v
    got_e = {frozenset(G.coset(rep_of(x)) for x in e) for e in a.edges()}
    assert {frozenset(G.coset(x) for x in e) for e in edges} == got_e
    assert all(len(e) == 2 for e in got_e)


@pytest.mark.parametrize("name", ["dinf", "f2", "z2", "bs-amalgam", "z2z3"])
def test_h_fixes_base_and_orbit_labels_invariant(name):
    a = arena_fixture(name, 4)
    for h in a.h_sample[:9]:
        assert a.translate(h, "o") == "o"
        for e in a.edges()[:20]:
            he = (a.translate(h, e[0]), a.translate(h, e[1]))
            if all(a.contains(x) for x in he):
                assert a.edge_key(he) == a.edge_key(e)
                assert a.graph.capacity(*he) == 1


def test_is_H_finite_examples():
    d = arena_fixture("dinf", 4)
    pos = d.cut(["st", "stst"])
    r = is_H_finite(d, pos)
    assert r.finite and r.orbits == 1 and r.confirmed
    assert is_H_finite(d, []).orbits == 0
    f = arena_fixture("f2", 3)
    A = f.cut([v for v in f.graph.vertices if v[0] in "bB"])
    r = is_H_finite(f, A)
    assert r.confirmed and r.orbits == 2


def test_is_H_finite_inconclusive_near_boundary():
    z = arena_fixture("z", 4)
    r = is_H_finite(z, [("ttt", "tttt")])
    assert r.verdict == "truncation-inconclusive" and r.finite is None


def test_act_examples():
    z = arena_fixture("z", 4)
    A = z.cut(["TTTT", "TTT", "TT", "T", "o"])
    assert act(z, "", A) == A
    assert act(z, "t", A) == z.cut(["TTTT", "TTT", "TT", "T", "o", "t"])
    with pytest.raises(TruncationError) as ei:
        act(z, "tttt", A)
    assert ei.value.lost
    d = arena_fixture("dinf", 4)
    pos = d.cut(["st", "stst"])
    assert act(d, "s", pos) == d.cut(["t", "tst"])
    # permutation oracle: translate vertex by vertex where defined
    for v in pos.members:
        assert d.translate("s", v) in act(d, "s", pos)


def test_act_preserves_weight():
    a = arena_fixture("f2", 4)
    A = a.cut([v for v in a.graph.vertices if v.startswith("b")])
    for w in ("a", "A", "aa"):
        assert len(coboundary_edges(a, act(a, w, A))) == len(coboundary_edges(a, A))


def test_quotients():
    z = arena_fixture("z", 4)
    q = quotient_graph(z, interior_only=False)
    assert nx.is_isomorphic(nx.Graph([q.graph.edge_names(i, j) for i, j, _ in q.graph.edges]),
                            nx.Graph(z.edges()))
    d = quotient_graph(arena_fixture("dinf", 4))
    assert d.graph.vertices == ("o", "t", "tst")
    assert [c for _, _, c in d.graph.edges] == [1, 1]
    z2 = quotient_graph(arena_fixture("z2", 4))
    assert nx.is_isomorphic(nx.Graph([z2.graph.edge_names(i, j) for i, j, _ in z2.graph.edges]),
                            nx.path_graph(len(z2.graph)))
    assert all(not set(v) & {"x", "X"} for v in z2.graph.vertices)


def test_z2_half_plane_is_almost_invariant():
    a = arena_fixture("z2", 4)
    A = a.cut([v for v in a.graph.vertices if v.startswith("y")])
    assert A.is_proper() and len(A) > 1 and len(A.complement()) > 1
    assert is_H_finite(a, A).orbits == 1
    for h in ("x", "X", "xx"):
        assert act(a, h, A) == A  # AH = A seen from the left action of H on cosets


def test_radius_guard():
    with pytest.raises(PreconditionError):
        build_coset_graph(group_fixture("z"), 1)
