from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hfree.constructions import gen_clique, gen_Fr, gen_loose_path, gen_pair_overlap
from hfree.embeddings import (
    Matcher,
    contains_copy,
    edge_disjoint,
    enumerate_copies,
    fan_copy_from_witness,
    independent_neighborhoods_check,
    max_edge_disjoint_packing,
)
from hfree.hypercore import Hypergraph, HypergraphError, complete_hypergraph
from hfree.invariants import SizeCap, are_isomorphic

import oracles

K3 = gen_clique(2, 3)
K4 = gen_clique(2, 4)
C5 = Hypergraph(2, 5, ((0, 1), (1, 2), (2, 3), (3, 4), (0, 4)))
STAR = Hypergraph(3, 7, ((0, 1, 2), (0, 3, 4), (0, 5, 6)))


def test_copy_counts():
    assert len(enumerate_copies(K4, K3)) == 4
    assert enumerate_copies(C5, K3) == []
    assert len(enumerate_copies(complete_hypergraph(4, 3), gen_pair_overlap(3, 2))) == 6


def test_contains_examples():
    F3 = gen_Fr(3)
    c = contains_copy(F3, F3)
    assert c is not None and set(c.edges) == set(F3.edges)
    assert contains_copy(complete_hypergraph(4, 3), F3) is None
    c = contains_copy(complete_hypergraph(5, 3), F3)
    assert c is not None and are_isomorphic(c.as_hypergraph(5), F3)
    assert c.edges == ((0, 1, 2), (0, 1, 3), (0, 1, 4), (2, 3, 4))


def test_uniformity_and_cap():
    with pytest.raises(HypergraphError):
        contains_copy(K4, gen_Fr(3))
    with pytest.raises(SizeCap):
        contains_copy(complete_hypergraph(20, 2), gen_loose_path(2, 17))


def test_anchored_embeddings_respect_anchor():
    P = gen_loose_path(2, 2)  # 0-1-2
    for sup, img in Matcher(K4).embeddings(P, anchors={1: 3}):
        assert dict(zip(sup, img))[1] == 3


def test_packing_examples():
    pk = max_edge_disjoint_packing(K4, K3)
    assert len(pk.copies) == 1 and pk.maximal
    rest = K4.without_edges(pk.edges)
    assert rest.m == 3 and contains_copy(rest, K3) is None
    two = Hypergraph(2, 6, ((0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)))
    assert len(max_edge_disjoint_packing(two, K3).copies) == 2


def test_packing_maximal_on_random_hosts():
    gen = np.random.default_rng(3)
    H = gen_pair_overlap(3, 2)
    for i in range(50):
        G = oracles.random_hypergraph(gen, 12, 3, 0.2)
        pk = max_edge_disjoint_packing(G, H, order_seed=i)
        assert edge_disjoint(pk.copies)
        used = pk.edges
        for c in enumerate_copies(G, H):
            assert used & set(c.edges)


@st.composite
def host_and_pattern(draw):
    r = draw(st.integers(2, 3))
    n = draw(st.integers(r + 1, 6))
    pool = list(combinations(range(n), r))
    G = Hypergraph(r, n, tuple(draw(st.lists(st.sampled_from(pool), unique=True, max_size=10))))
    patt = {2: [K3, gen_loose_path(2, 2), gen_loose_path(2, 3)], 3: [gen_pair_overlap(3, 2), gen_pair_overlap(3, 1), gen_Fr(3)]}
    H = draw(st.sampled_from(patt[r]))
    return G, H


@given(host_and_pattern())
def test_enumeration_matches_brute_force(data):
    G, H = data
    got = {c.edges for c in enumerate_copies(G, H)}
    assert got == oracles.copies(G, H)
    for es in got:
        sub = Hypergraph(G.r, G.n, es)
        assert len(sub.support) == len(H.support)


def test_indnbd_examples():
    assert independent_neighborhoods_check(STAR).ok
    F3 = gen_Fr(3)
    res = independent_neighborhoods_check(F3)
    assert not res.ok and res.core == (0, 1) and res.edge == (2, 3, 4)
    assert set(fan_copy_from_witness(F3, res)) == set(F3.edges)


def test_indnbd_agrees_with_definition():
    gen = np.random.default_rng(11)
    F3 = gen_Fr(3)
    for _ in range(40):
        G = oracles.random_hypergraph(gen, 9, 3, 0.15)
        ok = independent_neighborhoods_check(G).ok
        assert ok == (contains_copy(G, F3) is None) == (not oracles.has_fan(G))
