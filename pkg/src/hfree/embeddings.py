"""Copies of a pattern inside a host, edge-disjoint packings, and the
neighborhood form of F_r-freeness.

A copy is an edge subset of the host isomorphic to the pattern (copies are
not necessarily induced). Two embeddings with the same image edge set are
the same copy.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Mapping, NamedTuple, Sequence

from . import rng
from .hypercore import Edge, Hypergraph, HypergraphError, codegree_table
from .invariants import PATTERN_VERTEX_CAP, SizeCap


@dataclass(frozen=True)
class Copy:
    edges: tuple[Edge, ...]
    pattern: Hypergraph
    vertex_map: tuple[int, ...] = ()

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(sorted(set().union(*map(set, self.edges))))

    def as_hypergraph(self, n: int) -> Hypergraph:
        return Hypergraph(self.pattern.r, n, self.edges)


@dataclass
class Packing:
    copies: list[Copy]
    pattern: Hypergraph
    maximal: bool = False

    @property
    def edges(self) -> set[Edge]:
        return {e for c in self.copies for e in c.edges}

    def summary(self) -> dict:
        return {"copies": len(self.copies), "edges": len(self.edges), "maximal": self.maximal}


def _pattern_support(H: Hypergraph) -> tuple[list[Edge], int, tuple[int, ...]]:
    sup = H.support
    idx = {v: i for i, v in enumerate(sup)}
    return [tuple(idx[v] for v in e) for e in H.edges], len(sup), sup


class Matcher:
    """Backtracking embedder of small patterns into one host.

    Pattern vertices are placed connectivity-first. A vertex that closes a
    pattern edge draws candidates from the host neighborhood of the images
    of that edge's other r-1 vertices; otherwise from the common host
    adjacency of its placed pattern neighbors. Host degree must dominate
    pattern degree.
    """

    def __init__(self, G: Hypergraph):
        self.G = G
        self.codeg = {k: frozenset(v) for k, v in codegree_table(G).items()}
        self.adj = G.adjacency
        self.deg = G.degrees

    def embeddings(
        self,
        H: Hypergraph,
        anchors: Mapping[int, int] | None = None,
        cap: int = PATTERN_VERTEX_CAP,
    ) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
        """Yield ``(support, image)`` pairs, ``image[i]`` hosting ``support[i]``.

        ``anchors`` pins pattern vertices (original labels) to host vertices.
        """
        G = self.G
        if H.r != G.r:
            raise HypergraphError(f"uniformity mismatch: pattern r={H.r}, host r={G.r}")
        pedges, nv, sup = _pattern_support(H)
        if nv > cap:
            raise SizeCap(f"pattern spans {nv} vertices, cap is {cap}")
        if nv == 0:
            yield sup, ()
            return
        pidx = {v: i for i, v in enumerate(sup)}
        pinned = {}
        for pv, hv in (anchors or {}).items():
            if pv not in pidx:
                raise HypergraphError(f"anchor {pv} is not in the pattern support")
            pinned[pidx[pv]] = hv

        padj = [set() for _ in range(nv)]
        pdeg = [0] * nv
        for e in pedges:
            for v in e:
                pdeg[v] += 1
                padj[v].update(u for u in e if u != v)

        order: list[int] = []
        placed: set[int] = set()
        for v in sorted(pinned):
            order.append(v)
            placed.add(v)
        while len(order) < nv:
            pool = [v for v in range(nv) if v not in placed and padj[v] & placed]
            pool = pool or [v for v in range(nv) if v not in placed]
            v = min(pool, key=lambda x: (-len(padj[x] & placed), -pdeg[x], x))
            order.append(v)
            placed.add(v)
        pos = {v: i for i, v in enumerate(order)}
        closing: list[list[tuple[int, ...]]] = [[] for _ in range(nv)]
        for e in pedges:
            last = max(e, key=pos.__getitem__)
            closing[pos[last]].append(tuple(u for u in e if u != last))
        back = [[u for u in padj[order[k]] if pos[u] < k] for k in range(nv)]

        image = [-1] * nv
        used: set[int] = set()
        codeg, adj, deg, hn = self.codeg, self.adj, self.deg, G.n

        def candidates(k: int):
            v = order[k]
            if v in pinned:
                return (pinned[v],)
            pools = []
            for rest in closing[k]:
                key = tuple(sorted(image[u] for u in rest))
                pool = codeg.get(key)
                if not pool:
                    return ()
                pools.append(pool)
            if not pools:
                pools = [adj[image[u]] for u in back[k]]
            if not pools:
                return range(hn)
            pools.sort(key=len)
            first, others = pools[0], pools[1:]
            return sorted(w for w in first if all(w in p for p in others))

        def rec(k: int):
            if k == nv:
                yield sup, tuple(image)
                return
            v = order[k]
            for w in candidates(k):
                if w in used or deg[w] < pdeg[v]:
                    continue
                if any(image[u] not in adj[w] for u in back[k]):
                    continue
                if v in pinned:
                    # pinned vertices skip the candidate pools, so check edges here
                    if not all(
                        tuple(sorted([image[u] for u in rest] + [w])) in G.edge_set for rest in closing[k]
                    ):
                        continue
                image[v] = w
                used.add(w)
                yield from rec(k + 1)
                used.discard(w)
                image[v] = -1

        yield from rec(0)

    def copies(self, H: Hypergraph, limit: int | None = None, anchors=None) -> Iterator[Copy]:
        """Distinct copies in search order (not sorted)."""
        seen: set[tuple[Edge, ...]] = set()
        for sup, img in self.embeddings(H, anchors=anchors):
            lab = dict(zip(sup, img))
            es = tuple(sorted(tuple(sorted(lab[v] for v in e)) for e in H.edges))
            if es in seen:
                continue
            seen.add(es)
            vmap = tuple(lab.get(v, -1) for v in range(H.n))
            yield Copy(edges=es, pattern=H, vertex_map=vmap)
            if limit is not None and len(seen) >= limit:
                return


def enumerate_copies(G: Hypergraph, H: Hypergraph, limit: int | None = None) -> list[Copy]:
    """All copies of H in G, ordered by their sorted host edge lists.

    With ``limit`` the first ``limit`` copies in search order are returned
    (still sorted), which is deterministic but not the global first.
    """
    found = list(Matcher(G).copies(H, limit=limit))
    found.sort(key=lambda c: c.edges)
    return found


def contains_copy(G: Hypergraph, H: Hypergraph) -> Copy | None:
    for c in Matcher(G).copies(H, limit=1):
        return c
    return None


def max_edge_disjoint_packing(
    G: Hypergraph, H: Hypergraph, order_seed: int | None = None, stream_path: tuple[int, ...] = ()
) -> Packing:
    """Greedy maximal collection of pairwise edge-disjoint copies.

    Copies are scanned in sorted order, permuted by ``order_seed`` when given.
    Maximality is then certified twice: every copy meets the packing, and
    the host minus the packing edges contains no copy at all.
    """
    copies = enumerate_copies(G, H)
    if order_seed is not None and copies:
        perm = rng.stream(order_seed, rng.STREAM_PACKING, *stream_path).permutation(len(copies))
        copies = [copies[i] for i in perm]
    used: set[Edge] = set()
    chosen: list[Copy] = []
    for c in copies:
        if used.isdisjoint(c.edges):
            chosen.append(c)
            used.update(c.edges)
    packing = Packing(copies=chosen, pattern=H)
    meets_all = all(not used.isdisjoint(c.edges) for c in copies)
    residue_free = contains_copy(G.without_edges(used), H) is None
    if not (meets_all and residue_free):
        raise AssertionError("greedy packing failed its maximality certificate")
    packing.maximal = True
    return packing


class IndNbdResult(NamedTuple):
    ok: bool
    core: tuple[int, ...] | None = None
    edge: Edge | None = None


def independent_neighborhoods_check(G: Hypergraph) -> IndNbdResult:
    """True iff no edge lies inside N(A) for any (r-1)-set A.

    The failing case returns the lexicographically first core A and the
    first edge inside its neighborhood; together with the r edges A + x for
    x in that edge, they form a copy of F_r.
    """
    if G.r < 2:
        raise HypergraphError("neighborhoods need r >= 2")
    from math import comb

    for core, nbhd in sorted(codegree_table(G).items()):
        if len(nbhd) < G.r:
            continue
        if comb(len(nbhd), G.r) <= G.m:
            for cand in combinations(nbhd, G.r):
                if cand in G.edge_set:
                    return IndNbdResult(False, core, cand)
        else:
            inside = set(nbhd)
            for e in G.edges:
                if all(v in inside for v in e):
                    return IndNbdResult(False, core, e)
    return IndNbdResult(True)


def fan_copy_from_witness(G: Hypergraph, res: IndNbdResult) -> tuple[Edge, ...]:
    """Expand a failing neighborhood witness to the F_r edge set it certifies."""
    assert res.core is not None and res.edge is not None
    spokes = [tuple(sorted(res.core + (x,))) for x in res.edge]
    return tuple(sorted(spokes + [res.edge]))


def edge_disjoint(copies: Sequence[Copy]) -> bool:
    seen: set[Edge] = set()
    for c in copies:
        if not seen.isdisjoint(c.edges):
            return False
        seen.update(c.edges)
    return True
