from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hfree.constructions import gen_clique, gen_loose_path, gen_star
from hfree.embeddings import contains_copy, max_edge_disjoint_packing
from hfree.hypercore import Hypergraph, empty_hypergraph
from hfree.invariants import are_isomorphic
from hfree.treecolor import (
    ContainsT,
    NotALeaf,
    attach_leaf,
    build_leaf_families,
    connectors,
    delete_leaf,
    is_r_forest,
    is_r_tree,
    leaves,
    palette_bound,
    tree_free_coloring,
)

import oracles

P3 = gen_loose_path(3, 3)
S3 = gen_star(3, 3)
EDGE = Hypergraph(3, 3, ((0, 1, 2),))


def test_tree_recognition():
    assert is_r_tree(Hypergraph(3, 7, ((0, 1, 2), (0, 3, 4), (0, 5, 6))))
    assert not is_r_forest(Hypergraph(3, 4, ((0, 1, 2), (1, 2, 3))))
    assert is_r_tree(EDGE)
    assert is_r_forest(Hypergraph(3, 6, ((0, 1, 2), (3, 4, 5))))
    assert not is_r_tree(Hypergraph(3, 6, ((0, 1, 2), (3, 4, 5))))
    assert not is_r_tree(Hypergraph(3, 4, ((0, 1, 2),)))  # isolated vertex


@st.composite
def small(draw):
    r = draw(st.integers(2, 3))
    n = draw(st.integers(r, 8))
    pool = list(combinations(range(n), r))
    return Hypergraph(r, n, tuple(draw(st.lists(st.sampled_from(pool), unique=True, max_size=6))))


@given(small())
def test_forest_matches_dfs_oracle(G):
    assert is_r_forest(G) == (not oracles.berge_cycle(G))


def test_leaves_examples():
    assert leaves(P3) == [(0, 1, 2), (4, 5, 6)]
    assert leaves(S3) == list(S3.edges)
    assert leaves(EDGE) == [(0, 1, 2)]


def test_delete_leaf_examples():
    Q = delete_leaf(P3, (4, 5, 6))
    assert Q.edges == ((0, 1, 2), (2, 3, 4)) and Q.n == 5
    assert delete_leaf(S3, (0, 5, 6)).edges == ((0, 1, 2), (0, 3, 4))
    two = gen_loose_path(3, 2)
    for e in two.edges:
        assert are_isomorphic(delete_leaf(two, e), EDGE)
    with pytest.raises(NotALeaf):
        delete_leaf(P3, (2, 3, 4))
    with pytest.raises(NotALeaf):
        delete_leaf(EDGE, (0, 1, 2))


def test_leaf_families():
    two = gen_loose_path(3, 2)
    for T in (P3, S3):
        fam = build_leaf_families(T)
        assert len(fam) == 3
        assert len(fam.families[1]) == 1 and are_isomorphic(fam.families[1][0], two)
        assert len(fam.families[2]) == 1 and are_isomorphic(fam.families[2][0], EDGE)
        for i, F in enumerate(fam.families):
            assert all(x.m == T.m - i and x.n == 2 * (T.m - i) + 1 for x in F)
    assert len(build_leaf_families(EDGE)) == 1


def test_leaf_families_branching():
    # spider with legs of length 1 and 2 has two non-isomorphic deletions
    T = Hypergraph(2, 4, ((0, 1), (0, 2), (2, 3)))
    fam = build_leaf_families(T)
    assert len(fam.families[1]) == 1  # both deletions give a 2-edge path
    T = Hypergraph(2, 6, ((0, 1), (0, 2), (0, 3), (3, 4), (4, 5)))
    fam = build_leaf_families(T)
    assert len(fam.families[1]) == 2


def test_connector_examples():
    fam = build_leaf_families(P3)
    two = Hypergraph(3, 5, ((0, 1, 2), (2, 3, 4)))
    assert connectors(two, 1, fam) == (0, 1, 3, 4)
    fam = build_leaf_families(S3)
    assert connectors(two, 1, fam) == (2,)
    fam = build_leaf_families(P3)
    assert connectors(EDGE, 2, fam) == (0, 1, 2)


def test_attach_leaf_shape():
    T = attach_leaf(EDGE, 1)
    assert T.edges == ((0, 1, 2), (1, 3, 4)) and is_r_tree(T)


def test_star_host_example():
    G = Hypergraph(3, 9, tuple((0,) + c for c in combinations(range(1, 9), 2)))
    assert contains_copy(G, P3) is None
    col, trace = tree_free_coloring(G, P3)
    assert col.is_proper(G) and col.palette_size <= 9
    assert trace.degeneracy <= 8


def test_disjoint_triangles():
    G = Hypergraph(2, 9, tuple(e for k in range(3) for e in [(3 * k, 3 * k + 1), (3 * k, 3 * k + 2), (3 * k + 1, 3 * k + 2)]))
    col, _ = tree_free_coloring(G, gen_loose_path(2, 3))
    assert col.is_proper(G) and col.palette_size <= 5


def test_empty_and_containing_hosts():
    col, _ = tree_free_coloring(empty_hypergraph(6, 3), P3)
    assert col.palette_size == 1
    with pytest.raises(ContainsT) as info:
        tree_free_coloring(Hypergraph(3, 8, P3.edges), P3)
    assert set(info.value.witness.edges) == set(P3.edges)


def test_trace_invariants():
    gen = np.random.default_rng(4)
    T = gen_loose_path(2, 4)
    for _ in range(10):
        G = oracles.random_hypergraph(gen, 12, 2, 0.3)
        G = G.without_edges(max_edge_disjoint_packing(G, T).edges)
        col, tr = tree_free_coloring(G, T)
        seen = set()
        for i, Ai in enumerate(tr.A, start=1):
            assert not seen & set(Ai)
            seen |= set(Ai)
            for v in Ai:
                assert len(tr.X[v]) == (T.r - 1) * (T.m - i)
        for u, v in tr.HG_edges:
            assert u in tr.X.get(v, ()) or v in tr.X.get(u, ())
        assert col.palette_size <= palette_bound(2, 4) and col.is_proper(G)
        assert tr.to_json()["degeneracy"] == tr.degeneracy


def test_clique_hosts_with_star_tree():
    # K_4 as 2-graph avoids no 3-star, so it must be rejected
    with pytest.raises(ContainsT):
        tree_free_coloring(gen_clique(2, 4), gen_star(2, 3))
