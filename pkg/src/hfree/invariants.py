"""Density and automorphism invariants, plus small-pattern isomorphism.

The density of a nontrivial r-graph H is the maximum of (e'-1)/(v'-r) over
subhypergraphs with e' >= 2 edges spanning v' vertices. It is computed
exactly (``fractions.Fraction``) by sweeping every edge subset.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Sequence

import numpy as np

from . import kernels
from .hypercore import Edge, Hypergraph, HypergraphError

MAX_SWEEP_EDGES = 22
PATTERN_VERTEX_CAP = 16
MAX_AUTOMORPHISMS = 2_000_000


class NontrivialRequired(HypergraphError):
    """Density needs at least two edges."""


class SizeCap(HypergraphError):
    """Pattern exceeds the exhaustive-search size cap."""


@dataclass(frozen=True)
class DensityReport:
    rho: Fraction
    witness: tuple[Edge, ...]
    balanced: bool
    whole: Fraction
    notes: tuple[str, ...] = ()

    @property
    def rho_str(self) -> str:
        return f"{self.rho.numerator}/{self.rho.denominator}"


def _support_relabel(H: Hypergraph) -> tuple[list[Edge], int]:
    sup = H.support
    idx = {v: i for i, v in enumerate(sup)}
    return [tuple(idx[v] for v in e) for e in H.edges], len(sup)


def _density_value(edges: Sequence[Edge], r: int) -> Fraction:
    verts = set().union(*map(set, edges))
    return Fraction(len(edges) - 1, len(verts) - r)


def _looks_like_fan(H: Hypergraph) -> bool:
    """r edges through a common (r-1)-core plus the edge on their tips."""
    r = H.r
    if H.m != r + 1 or len(H.support) != 2 * r - 1:
        return False
    for e0 in H.edges:
        rest = [set(e) for e in H.edges if e != e0]
        core = set.intersection(*rest)
        if len(core) == r - 1 and set().union(*rest) - core == set(e0):
            return True
    return False


def compute_rho(H: Hypergraph) -> DensityReport:
    if H.m < 2:
        raise NontrivialRequired(f"density needs >= 2 edges, got {H.m}")
    if H.m > MAX_SWEEP_EDGES:
        raise SizeCap(f"edge-subset sweep capped at {MAX_SWEEP_EDGES} edges, got {H.m}")
    edges, nv = _support_relabel(H)
    if nv > 62:
        raise SizeCap(f"pattern spans {nv} vertices, bitmask sweep supports 62")
    vmasks = np.array([sum(1 << v for v in e) for e in edges], dtype=np.int64)
    num, den, sub = kernels.density_sweep(vmasks, H.r)
    rho = Fraction(num, den)
    witness = tuple(H.edges[j] for j in range(H.m) if sub >> j & 1)
    whole = _density_value(H.edges, H.r)
    notes = []
    if H.r >= 3 and _looks_like_fan(H):
        notes.append(
            f"fan pattern F_{H.r}: exact density {rho} = r/(r-1); "
            "a value of 2 is only correct for r = 2"
        )
    return DensityReport(rho=rho, witness=witness, balanced=(whole == rho), whole=whole, notes=tuple(notes))


@dataclass(frozen=True)
class MemberProfile:
    v: int
    e: int
    rho: Fraction
    alpha: int
    balanced: bool


@dataclass(frozen=True)
class FamilyProfile:
    r: int
    order: tuple[int, ...]
    rho: Fraction
    s: int
    members: tuple[MemberProfile, ...]
    density_above_threshold: bool
    all_balanced: bool

    def sorted_members(self) -> list[MemberProfile]:
        return [self.members[i] for i in self.order]


def family_profile(family: Sequence[Hypergraph]) -> FamilyProfile:
    """Sort a forbidden family by density and count the minimum-density members."""
    if not family:
        raise HypergraphError("empty family")
    r = family[0].r
    if any(H.r != r for H in family):
        raise HypergraphError("family mixes uniformities")
    members = []
    for H in family:
        rep = compute_rho(H)
        aut = edge_automorphisms(H)
        members.append(MemberProfile(v=len(H.support), e=H.m, rho=rep.rho, alpha=aut.alpha_min, balanced=rep.balanced))
    order = tuple(sorted(range(len(members)), key=lambda i: members[i].rho))
    rho = members[order[0]].rho
    s = sum(1 for m in members if m.rho == rho)
    return FamilyProfile(
        r=r,
        order=order,
        rho=rho,
        s=s,
        members=tuple(members),
        density_above_threshold=rho > Fraction(1, r - 1) if r > 1 else False,
        all_balanced=all(m.balanced for m in members),
    )


# -- color refinement ------------------------------------------------------


def _refine(edges: Sequence[Edge], nv: int, colors: list[int], inc: list[list[int]]) -> list[int]:
    """Iterate incidence-signature refinement to a stable ordered partition."""
    ncls = len(set(colors))
    while True:
        sigs = []
        for v in range(nv):
            around = sorted(tuple(sorted(colors[u] for u in edges[i] if u != v)) for i in inc[v])
            sigs.append((colors[v], tuple(around)))
        ranks = {s: k for k, s in enumerate(sorted(set(sigs)))}
        colors = [ranks[s] for s in sigs]
        if len(ranks) == ncls:
            return colors
        ncls = len(ranks)


def _incidence(edges: Sequence[Edge], nv: int) -> list[list[int]]:
    inc: list[list[int]] = [[] for _ in range(nv)]
    for i, e in enumerate(edges):
        for v in e:
            inc[v].append(i)
    return inc


# -- automorphisms ---------------------------------------------------------


@dataclass(frozen=True)
class AutReport:
    alpha_per_edge: dict[Edge, int]
    alpha_min: int
    group_order: int
    orbits: tuple[tuple[Edge, ...], ...] = field(default=())


def _automorphisms(edges: Sequence[Edge], nv: int):
    """Yield every permutation of range(nv) mapping the edge set onto itself."""
    inc = _incidence(edges, nv)
    colors = _refine(edges, nv, [0] * nv, inc)
    eset = set(edges)
    adj = [set() for _ in range(nv)]
    for e in edges:
        for v in e:
            adj[v].update(u for u in e if u != v)
    # connectivity-first order so edges close early
    order: list[int] = []
    placed: set[int] = set()
    while len(order) < nv:
        frontier = [v for v in range(nv) if v not in placed and adj[v] & placed]
        pool = frontier or [v for v in range(nv) if v not in placed]
        v = min(pool, key=lambda x: (-len(adj[x] & placed), -len(inc[x]), x))
        order.append(v)
        placed.add(v)
    pos = {v: i for i, v in enumerate(order)}
    closing: list[list[Edge]] = [[] for _ in range(nv)]
    for e in edges:
        closing[max(pos[v] for v in e)].append(e)

    image = [-1] * nv
    used = [False] * nv

    def rec(k: int):
        if k == nv:
            yield tuple(image)
            return
        v = order[k]
        for w in range(nv):
            if used[w] or colors[w] != colors[v]:
                continue
            if any(image[u] >= 0 and image[u] not in adj[w] for u in adj[v]):
                continue
            image[v] = w
            used[w] = True
            if all(tuple(sorted(image[u] for u in e)) in eset for e in closing[k]):
                yield from rec(k + 1)
            used[w] = False
            image[v] = -1

    yield from rec(0)


def edge_automorphisms(H: Hypergraph) -> AutReport:
    """Count, per edge, the automorphisms of H that fix that edge setwise."""
    if H.m == 0:
        raise HypergraphError("automorphism report needs a nonempty hypergraph")
    edges, nv = _support_relabel(H)
    if nv > PATTERN_VERTEX_CAP:
        raise SizeCap(f"pattern spans {nv} vertices, cap is {PATTERN_VERTEX_CAP}")
    iso_factor = factorial(H.n - nv)
    counts = {e: 0 for e in edges}
    orbit_of: dict[Edge, set[Edge]] = {e: set() for e in edges}
    total = 0
    for perm in _automorphisms(edges, nv):
        total += 1
        if total > MAX_AUTOMORPHISMS:
            raise SizeCap(f"more than {MAX_AUTOMORPHISMS} automorphisms")
        for e in edges:
            img = tuple(sorted(perm[v] for v in e))
            orbit_of[e].add(img)
            if img == e:
                counts[e] += 1
    back = dict(zip(edges, H.edges))
    per_edge = {back[e]: c * iso_factor for e, c in counts.items()}
    orbits = sorted({tuple(sorted(back[x] for x in o)) for o in orbit_of.values()})
    return AutReport(
        alpha_per_edge=per_edge,
        alpha_min=min(per_edge.values()),
        group_order=total * iso_factor,
        orbits=tuple(orbits),
    )


# -- canonical form --------------------------------------------------------


def canonical_form(H: Hypergraph, cap: int = PATTERN_VERTEX_CAP) -> tuple[int, int, tuple[Edge, ...]]:
    """Least relabeled edge list over the leaves of a refinement search.

    Individualization-refinement makes the set of leaf relabelings depend
    only on the isomorphism class, so the minimum over leaves is a canonical
    form. Leaves with equal codes expose automorphisms, which prune sibling
    branches lying in the same orbit. Isolated vertices are dropped from the
    search and kept as a count.
    """
    edges, nv = _support_relabel(H)
    if nv > cap:
        raise SizeCap(f"pattern spans {nv} vertices, cap is {cap}")
    inc = _incidence(edges, nv)
    best_code: list = [None]
    best_leaf: list = [None]
    autos: list[tuple[int, ...]] = []

    def leaf(colors: list[int]):
        code = tuple(sorted(tuple(sorted(colors[v] for v in e)) for e in edges))
        if best_code[0] is None or code < best_code[0]:
            best_code[0], best_leaf[0] = code, colors
        elif code == best_code[0]:
            inv = [0] * nv
            for v, c in enumerate(best_leaf[0]):
                inv[c] = v
            autos.append(tuple(inv[colors[v]] for v in range(nv)))

    def search(colors: list[int], prefix: tuple[int, ...]):
        colors = _refine(edges, nv, colors, inc)
        if len(set(colors)) == nv:
            leaf(colors)
            return
        sizes: dict[int, int] = {}
        for c in colors:
            sizes[c] = sizes.get(c, 0) + 1
        target = min(c for c, k in sizes.items() if k > 1)
        explored: list[int] = []
        for v in range(nv):
            if colors[v] != target:
                continue
            if explored and _same_orbit(v, explored, prefix, autos):
                continue
            keyed = [(c, 0 if (u == v or c != target) else 1) for u, c in enumerate(colors)]
            ranks = {k: i for i, k in enumerate(sorted(set(keyed)))}
            search([ranks[k] for k in keyed], prefix + (v,))
            explored.append(v)

    if nv:
        search([0] * nv, ())
    return (H.r, H.n, best_code[0] or ())


def _same_orbit(v: int, explored: list[int], prefix: tuple[int, ...], autos: list[tuple[int, ...]]) -> bool:
    """Is v reachable from an explored vertex by automorphisms fixing prefix?"""
    gens = [g for g in autos if all(g[p] == p for p in prefix)]
    if not gens:
        return False
    seen = set(explored)
    stack = list(explored)
    while stack:
        x = stack.pop()
        for g in gens:
            y = g[x]
            if y == v:
                return True
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return False


def canonical_code(H: Hypergraph, cap: int = PATTERN_VERTEX_CAP) -> bytes:
    r, n, edges = canonical_form(H, cap)
    body = ";".join(",".join(map(str, e)) for e in edges)
    return f"{r}|{n}|{body}".encode()


def are_isomorphic(H1: Hypergraph, H2: Hypergraph, cap: int = PATTERN_VERTEX_CAP) -> bool:
    if (H1.r, H1.n, H1.m) != (H2.r, H2.n, H2.m):
        return False
    if sorted(H1.degrees) != sorted(H2.degrees):
        return False
    return canonical_code(H1, cap) == canonical_code(H2, cap)
