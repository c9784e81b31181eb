"""Slow, obviously-correct reference implementations used only by tests.

Nothing here shares code with the package beyond the Hypergraph container.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations, product

import numpy as np

from hfree.hypercore import Hypergraph


def random_hypergraph(gen: np.random.Generator, n: int, r: int, p: float) -> Hypergraph:
    edges = [e for e in combinations(range(n), r) if gen.random() < p]
    return Hypergraph(r, n, tuple(edges))


def density(H: Hypergraph) -> Fraction:
    best = None
    for k in range(2, H.m + 1):
        for sub in combinations(H.edges, k):
            v = len(set().union(*map(set, sub)))
            val = Fraction(k - 1, v - H.r)
            if best is None or val > best:
                best = val
    return best


def automorphisms(H: Hypergraph):
    es = set(H.edges)
    for perm in permutations(range(H.n)):
        if {tuple(sorted(perm[v] for v in e)) for e in H.edges} == es:
            yield perm


def edge_alpha(H: Hypergraph) -> dict:
    counts = {e: 0 for e in H.edges}
    for perm in automorphisms(H):
        for e in H.edges:
            if tuple(sorted(perm[v] for v in e)) == e:
                counts[e] += 1
    return counts


def isomorphic(H1: Hypergraph, H2: Hypergraph) -> bool:
    if (H1.r, H1.n, H1.m) != (H2.r, H2.n, H2.m):
        return False
    target = set(H2.edges)
    return any(
        {tuple(sorted(perm[v] for v in e)) for e in H1.edges} == target for perm in permutations(range(H1.n))
    )


def copies(G: Hypergraph, H: Hypergraph) -> set:
    """Copy edge sets via every injection of the pattern support."""
    sup = H.support
    found = set()
    for img in permutations(range(G.n), len(sup)):
        lab = dict(zip(sup, img))
        es = tuple(sorted(tuple(sorted(lab[v] for v in e)) for e in H.edges))
        if all(e in G.edge_set for e in es):
            found.add(es)
    return found


def alpha(G: Hypergraph) -> int:
    for k in range(G.n, -1, -1):
        for S in combinations(range(G.n), k):
            s = set(S)
            if not any(all(v in s for v in e) for e in G.edges):
                return k
    return 0


def chi(G: Hypergraph) -> int:
    if G.n == 0:
        return 0
    for k in range(1, G.n + 1):
        for cols in product(range(k), repeat=G.n):
            if all(len({cols[v] for v in e}) > 1 for e in G.edges):
                return k
    return G.n


def has_fan(G: Hypergraph) -> bool:
    """F_r by definition: an (r-1)-set A and an edge E0 with A+x an edge for all x in E0."""
    r = G.r
    for A in combinations(range(G.n), r - 1):
        for e0 in G.edges:
            if set(A) & set(e0):
                continue
            if all(tuple(sorted(A + (x,))) in G.edge_set for x in e0):
                return True
    return False


def berge_cycle(G: Hypergraph) -> bool:
    """Incidence-graph cycle search by DFS (separate from union-find)."""
    n = G.n
    adj = {("v", v): [] for v in range(n)}
    for i, e in enumerate(G.edges):
        adj[("e", i)] = [("v", v) for v in e]
        for v in e:
            adj[("v", v)].append(("e", i))
    seen = set()
    for start in adj:
        if start in seen:
            continue
        stack = [(start, None)]
        while stack:
            node, parent = stack.pop()
            if node in seen:
                return True
            seen.add(node)
            for nxt in adj[node]:
                if nxt != parent:
                    stack.append((nxt, node))
    return False
