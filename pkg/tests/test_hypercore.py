from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hfree.hypercore import (
    Coloring,
    DuplicateEdge,
    DuplicateVertexInEdge,
    EdgeCountMismatch,
    Hypergraph,
    HypergraphError,
    MalformedHeader,
    VertexOutOfRange,
    WrongArity,
    codegree_table,
    empty_hypergraph,
    fano_plane,
    induced_subhypergraph,
    neighborhood,
    parse_hypergraph,
    read_hypergraph,
    serialize_hypergraph,
    write_hypergraph,
)

STAR = Hypergraph(3, 7, ((0, 1, 2), (0, 3, 4), (0, 5, 6)))


@st.composite
def hypergraphs(draw, max_n=9):
    r = draw(st.integers(2, 4))
    n = draw(st.integers(r, max_n))
    pool = list(combinations(range(n), r))
    edges = draw(st.lists(st.sampled_from(pool), unique=True, max_size=min(len(pool), 25)))
    return Hypergraph(r, n, tuple(edges))


def test_round_trip_single_edge():
    text = "3 7 1\n0 1 2\n"
    G = parse_hypergraph(text)
    assert (G.r, G.n, G.m) == (3, 7, 1)
    assert serialize_hypergraph(G) == text


def test_duplicate_vertex_reports_line():
    with pytest.raises(DuplicateVertexInEdge) as info:
        parse_hypergraph("3 7 1\n0 0 2\n")
    assert info.value.line == 2


@pytest.mark.parametrize(
    "text, exc, line",
    [
        ("3 7\n", MalformedHeader, 1),
        ("x 7 1\n0 1 2\n", MalformedHeader, 1),
        ("3 7 1\n0 1\n", WrongArity, 2),
        ("3 7 2\n0 1 2\n2 1 0\n", DuplicateEdge, 3),
        ("3 7 1\n0 1 7\n", VertexOutOfRange, 2),
        ("3 7 2\n0 1 2\n", EdgeCountMismatch, None),
    ],
)
def test_parse_errors(text, exc, line):
    with pytest.raises(exc) as info:
        parse_hypergraph(text)
    if line is not None:
        assert info.value.line == line


def test_comments_and_canonical_order():
    G = parse_hypergraph(b"# hi\n3 5 2\n\n2 3 4\n# mid\n1 0 2\n")
    assert serialize_hypergraph(G) == "3 5 2\n0 1 2\n2 3 4\n"


def test_fano_is_a_7_7_system():
    F = fano_plane()
    assert (F.r, F.n, F.m) == (3, 7, 7)
    assert set(F.edges) == {(0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5)}


def test_induced_examples():
    F = fano_plane()
    H, vmap = induced_subhypergraph(F, range(7))
    assert H == F and vmap == tuple(range(7))
    H, _ = induced_subhypergraph(Hypergraph(3, 3, ((0, 1, 2),)), [0, 1])
    assert (H.n, H.m) == (2, 0)
    H, vmap = induced_subhypergraph(F, [3, 4, 5, 6])  # complement of the line 012
    assert (H.n, H.m) == (4, 0)
    with pytest.raises(VertexOutOfRange):
        induced_subhypergraph(F, [0, 9])


def test_neighborhood_examples():
    assert neighborhood(STAR, [0, 1]) == (2,)
    assert neighborhood(STAR, [1, 3]) == ()
    E = empty_hypergraph(6, 3)
    assert all(neighborhood(E, S) == () for S in combinations(range(6), 2))
    F = fano_plane()
    assert all(len(neighborhood(F, S)) == 1 for S in combinations(range(7), 2))
    with pytest.raises(HypergraphError):
        neighborhood(F, [0])


@given(hypergraphs())
def test_round_trip_property(G):
    assert parse_hypergraph(serialize_hypergraph(G)) == G


@given(hypergraphs())
def test_handshake(G):
    assert sum(G.degrees) == G.r * G.m


@given(hypergraphs(), st.data())
def test_neighborhood_counts_edges(G, data):
    S = tuple(sorted(data.draw(st.sets(st.integers(0, G.n - 1), min_size=G.r - 1, max_size=G.r - 1))))
    N = neighborhood(G, S)
    assert not set(N) & set(S)
    assert len(N) == sum(1 for e in G.edges if set(S) <= set(e))
    assert codegree_table(G).get(S, ()) == N


@given(hypergraphs(), st.data())
def test_induced_keeps_exactly_inside_edges(G, data):
    S = sorted(data.draw(st.sets(st.integers(0, G.n - 1))))
    H, vmap = induced_subhypergraph(G, S)
    back = {tuple(vmap[v] for v in e) for e in H.edges}
    assert back == {e for e in G.edges if set(e) <= set(S)}


def test_file_io(tmp_path):
    path = tmp_path / "star.hg"
    write_hypergraph(STAR, path)
    assert read_hypergraph(path) == STAR


def test_coloring_checks(backend):
    F = fano_plane()
    good = Coloring([0, 0, 1, 1, 2, 2, 0], 3)
    mono = [e for e in F.edges if len({good.colors[v] for v in e}) == 1]
    assert good.monochromatic_edges(F) == mono
    with pytest.raises(HypergraphError):
        Coloring([0, 3], 3)
    assert Coloring([0] * 7, 1).monochromatic_edges(F) == list(F.edges)
