"""Coloring hypergraphs that avoid a fixed r-tree.

Leaf deletion turns the tree T (t edges) into families F_0 = {T}, F_1, ...,
F_{t-1} = {single edge}. Round i collects A_i, the vertices of G_i that host
a connector of some copy of a member of F_i, and removes them. Each v in
A_i remembers the other vertices X_v of one such copy. The graph joining v
to X_v is 2(r-1)(t-1)-degenerate, and any proper coloring of it is a weak
coloring of G.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .embeddings import Matcher, contains_copy
from .hypercore import Coloring, Edge, Hypergraph, HypergraphError, induced_subhypergraph
from .invariants import canonical_code
from .solvers import degeneracy_coloring, smallest_last


class NotATree(HypergraphError):
    pass


class NotALeaf(HypergraphError):
    pass


class ContainsT(HypergraphError):
    def __init__(self, witness):
        super().__init__(f"host contains the forbidden tree: {list(witness.edges)}")
        self.witness = witness


def _components(G: Hypergraph) -> tuple[bool, int]:
    """(incidence graph acyclic, number of components touching an edge)."""
    # union-find over vertices and edges as nodes n..n+m-1
    parent = list(range(G.n + G.m))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    acyclic = True
    for i, e in enumerate(G.edges):
        node = G.n + i
        for v in e:
            a, b = find(node), find(v)
            if a == b:
                acyclic = False
            else:
                parent[a] = b
    roots = {find(G.n + i) for i in range(G.m)}
    return acyclic, len(roots)


def is_r_forest(G: Hypergraph) -> bool:
    """No Berge cycle, i.e. the vertex-edge incidence graph is a forest."""
    return _components(G)[0]


def is_r_tree(G: Hypergraph) -> bool:
    """Connected r-forest with at least one edge and no isolated vertices."""
    if G.m == 0:
        return False
    acyclic, comps = _components(G)
    if not acyclic or comps != 1 or len(G.support) != G.n:
        return False
    assert G.n == (G.r - 1) * G.m + 1
    return True


def _require_tree(T: Hypergraph) -> None:
    if not is_r_tree(T):
        raise NotATree("expected a connected r-forest spanning all its vertices")


def leaves(T: Hypergraph) -> list[Edge]:
    _require_tree(T)
    deg = T.degrees
    return [e for e in T.edges if sum(deg[v] > 1 for v in e) <= 1]


def delete_leaf(T: Hypergraph, e) -> Hypergraph:
    """Drop leaf e and its degree-1 vertices; survivors keep their order."""
    e = tuple(sorted(e))
    if T.m < 2:
        raise NotALeaf("a single edge has no leaf to delete")
    if e not in leaves(T):
        raise NotALeaf(f"{e} is not a leaf")
    deg = T.degrees
    keep = [v for v in range(T.n) if not (v in e and deg[v] == 1)]
    idx = {v: i for i, v in enumerate(keep)}
    edges = tuple(tuple(idx[v] for v in f) for f in T.edges if f != e)
    return Hypergraph(T.r, len(keep), edges)


def attach_leaf(T: Hypergraph, v: int) -> Hypergraph:
    """T plus a fresh edge through v and r-1 new vertices."""
    fresh = tuple(range(T.n, T.n + T.r - 1))
    return Hypergraph(T.r, T.n + T.r - 1, T.edges + (tuple(sorted((v,) + fresh)),))


@dataclass
class LeafFamilies:
    tree: Hypergraph
    families: list[list[Hypergraph]]
    parents: list[list[list[int]]] = field(default_factory=list)
    codes: list[list[bytes]] = field(default_factory=list)

    @property
    def t(self) -> int:
        return self.tree.m

    def __len__(self) -> int:
        return len(self.families)


def build_leaf_families(T: Hypergraph) -> LeafFamilies:
    """F_0 = {T}; F_i holds every leaf deletion of a member of F_{i-1}, up to
    isomorphism. ``parents[i][j]`` lists the indices in F_{i-1} that produce
    member j of F_i."""
    _require_tree(T)
    fams = [[T]]
    codes = [[canonical_code(T)]]
    parents: list[list[list[int]]] = [[[]]]
    for _ in range(1, T.m):
        cur: list[Hypergraph] = []
        cur_codes: list[bytes] = []
        cur_par: list[list[int]] = []
        for pi, P in enumerate(fams[-1]):
            for e in leaves(P):
                Q = delete_leaf(P, e)
                c = canonical_code(Q)
                if c in cur_codes:
                    j = cur_codes.index(c)
                    if pi not in cur_par[j]:
                        cur_par[j].append(pi)
                else:
                    cur.append(Q)
                    cur_codes.append(c)
                    cur_par.append([pi])
        fams.append(cur)
        codes.append(cur_codes)
        parents.append(cur_par)
    return LeafFamilies(tree=T, families=fams, parents=parents, codes=codes)


def connectors(Tp: Hypergraph, i: int, fam: LeafFamilies) -> tuple[int, ...]:
    """Vertices of Tp where a fresh leaf gives a member of F_{i-1}."""
    if i < 1 or i >= len(fam):
        raise ValueError(f"connector index must lie in 1..{len(fam) - 1}, got {i}")
    targets = set(fam.codes[i - 1])
    out = tuple(v for v in range(Tp.n) if canonical_code(attach_leaf(Tp, v)) in targets)
    assert out, "every leaf-deletion member has a connector"
    return out


@dataclass
class TreeColoringTrace:
    A: list[list[int]]
    X: dict[int, list[int]]
    witnesses: dict[int, tuple[int, int, list[Edge]]]
    HG_edges: list[tuple[int, int]]
    elimination_order: list[int]
    degeneracy: int
    coloring: Coloring

    def to_json(self) -> dict:
        return {
            "A": self.A,
            "X": {str(v): xs for v, xs in sorted(self.X.items())},
            "witnesses": {
                str(v): {"round": i, "member": j, "edges": [list(e) for e in es]}
                for v, (i, j, es) in sorted(self.witnesses.items())
            },
            "HG_edges": [list(e) for e in self.HG_edges],
            "elimination_order": self.elimination_order,
            "degeneracy": self.degeneracy,
            "coloring": self.coloring.to_json(),
        }


def palette_bound(r: int, t: int) -> int:
    return 2 * (r - 1) * (t - 1) + 1


def tree_free_coloring(G: Hypergraph, T: Hypergraph) -> tuple[Coloring, TreeColoringTrace]:
    """Color a T-free host with at most 2(r-1)(t-1)+1 colors.

    Raises ContainsT, carrying the copy, when G is not T-free.
    """
    if G.r != T.r:
        raise HypergraphError(f"uniformity mismatch: host r={G.r}, tree r={T.r}")
    _require_tree(T)
    wit = contains_copy(G, T)
    if wit is not None:
        raise ContainsT(wit)
    r, t = T.r, T.m
    fam = build_leaf_families(T)
    conn = [[]] + [[connectors(P, i, fam) for P in fam.families[i]] for i in range(1, t)]

    alive = list(range(G.n))
    A: list[list[int]] = []
    X: dict[int, list[int]] = {}
    witnesses: dict[int, tuple[int, int, list[Edge]]] = {}
    for i in range(1, t):
        Gi, vmap = induced_subhypergraph(G, alive)
        matcher = Matcher(Gi)
        Ai: list[int] = []
        for local in range(Gi.n):
            found = _first_anchored_copy(matcher, fam.families[i], conn[i], local)
            if found is None:
                continue
            j, edges = found
            host = [tuple(vmap[x] for x in e) for e in edges]
            v = vmap[local]
            Ai.append(v)
            X[v] = sorted({x for e in host for x in e} - {v})
            witnesses[v] = (i, j, host)
            assert len(X[v]) == (r - 1) * (t - i)
        A.append(Ai)
        gone = set(Ai)
        alive = [v for v in alive if v not in gone]

    # nothing left over can carry an edge: F_{t-1} is the single edge
    rest = set(alive)
    assert not any(all(v in rest for v in e) for e in G.edges)
    _recheck_witnesses(G, fam, conn, A, witnesses)

    hg = sorted({(min(u, v), max(u, v)) for v, xs in X.items() for u in xs})
    HG = Hypergraph(2, G.n, tuple(hg))
    order, d = smallest_last(HG)
    assert d <= 2 * (r - 1) * (t - 1), "auxiliary graph exceeds its degeneracy bound"
    col = degeneracy_coloring(HG)
    assert col.palette_size <= palette_bound(r, t)
    assert col.is_proper(G), "auxiliary coloring is not proper for the host"
    col.meta.update({"method": "tree", "bound": palette_bound(r, t)})
    trace = TreeColoringTrace(
        A=A, X=X, witnesses=witnesses, HG_edges=hg, elimination_order=order, degeneracy=d, coloring=col
    )
    return col, trace


def _first_anchored_copy(matcher: Matcher, members, member_conns, v: int):
    """First (member index, host edges) with a connector of the member on v."""
    for j, (P, cs) in enumerate(zip(members, member_conns)):
        for c in cs:
            for sup, img in matcher.embeddings(P, anchors={c: v}):
                lab = dict(zip(sup, img))
                return j, sorted(tuple(sorted(lab[x] for x in e)) for e in P.edges)
    return None


def _recheck_witnesses(G, fam, conn, A, witnesses) -> None:
    """Each stored copy lies in G_i and maps a connector onto its vertex."""
    removed: set[int] = set()
    for i, Ai in enumerate(A, start=1):
        for v in Ai:
            ri, j, edges = witnesses[v]
            assert ri == i
            assert all(G.has_edge(e) for e in edges)
            span = {x for e in edges for x in e}
            assert v in span and not (span & removed)
            copy = Hypergraph(G.r, G.n, tuple(edges))
            sub, vmap = induced_subhypergraph(copy, sorted(span))
            P = fam.families[i][j]
            back = {old: new for new, old in enumerate(vmap)}
            # some connector of P must land on v in some isomorphism
            assert any(
                next(Matcher(sub).embeddings(P, anchors={c: back[v]}), None) is not None for c in conn[i][j]
            )
        removed.update(Ai)
