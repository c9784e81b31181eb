"""Exact independence and weak-chromatic solvers, and constructive colorings.

Independence is the strong notion: a vertex set is independent when it
contains no edge entirely. A weak coloring forbids monochromatic edges.
Every coloring returned here is checked against its host before return.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Callable, Iterable

import numpy as np

from . import kernels, rng
from .embeddings import independent_neighborhoods_check
from .hypercore import Coloring, Hypergraph, HypergraphError, codegree_table, induced_subhypergraph

EXHAUSTIVE_CAP = 20


@dataclass(frozen=True)
class SolverBudget:
    max_nodes: int = 20_000_000
    max_seconds: float | None = None
    max_resamples: int = 1_000_000

    def __post_init__(self):
        if self.max_nodes <= 0 or self.max_resamples <= 0:
            raise ValueError("budget caps must be positive")
        if self.max_seconds is not None and self.max_seconds <= 0:
            raise ValueError("time cap must be positive")


class BudgetExceeded(RuntimeError):
    """A cap was hit. Carries the best bounds and witness found so far."""

    def __init__(self, message: str, lower=None, upper=None, best=None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper
        self.best = best


class PreconditionFailed(ValueError):
    pass


class NotIndependentNeighborhoods(ValueError):
    def __init__(self, core, edge):
        super().__init__(f"edge {edge} lies inside the neighborhood of {core}")
        self.core = core
        self.edge = edge


class ExtractorContractViolation(RuntimeError):
    def __init__(self, message: str, subinstance: Hypergraph, returned):
        super().__init__(message)
        self.subinstance = subinstance
        self.returned = returned


@dataclass(frozen=True)
class IndependentSet:
    vertices: tuple[int, ...]
    certified_maximum: bool = False
    below_guarantee: bool = False
    source: str = ""

    def __len__(self) -> int:
        return len(self.vertices)


class _Meter:
    def __init__(self, budget: SolverBudget | None):
        self.budget = budget or SolverBudget()
        self.nodes = 0
        self.start = time.monotonic()

    def tick(self) -> bool:
        """Count one node; False once any cap is exhausted."""
        self.nodes += 1
        if self.nodes > self.budget.max_nodes:
            return False
        if self.budget.max_seconds is not None and self.nodes & 1023 == 0:
            return time.monotonic() - self.start <= self.budget.max_seconds
        return True


def _popcount(x: int) -> int:
    return x.bit_count()


def _bits(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


# -- independence number ---------------------------------------------------


def _greedy_independent(G: Hypergraph) -> int:
    masks_of = [[G.edge_masks[i] for i in G.incidence[v]] for v in range(G.n)]
    S = 0
    for v in sorted(range(G.n), key=lambda x: (G.degrees[x], x)):
        S2 = S | (1 << v)
        if all(e & S2 != e for e in masks_of[v]):
            S = S2
    return S


def independence_number(G: Hypergraph, budget: SolverBudget | None = None) -> tuple[int, IndependentSet]:
    """Exact strong independence number by depth-first branch and bound.

    Upper bound at each node: ``|S| + |C|`` minus a greedy count of pairwise
    disjoint edge remainders inside the candidate set C, since each such
    remainder must lose a vertex.
    """
    meter = _Meter(budget)
    n = G.n
    masks = G.edge_masks
    masks_of = [[masks[i] for i in G.incidence[v]] for v in range(n)]
    by_size = sorted(masks, key=_popcount)

    best_set = _greedy_independent(G)
    best = [_popcount(best_set), best_set]

    C0 = (1 << n) - 1
    for e in masks:
        if _popcount(e) == 1:
            C0 &= ~e

    def bound(S: int, C: int) -> int:
        live = S | C
        packed = 0
        taken = 0
        for e in by_size:
            if e & live == e:
                rem = e & C
                if rem & taken == 0:
                    taken |= rem
                    packed += 1
        return _popcount(S) + _popcount(C) - packed

    root_ub = bound(0, C0)

    def rec(S: int, C: int):
        if not meter.tick():
            raise BudgetExceeded(
                f"independence search exceeded {meter.budget.max_nodes} nodes",
                lower=best[0],
                upper=root_ub,
                best=IndependentSet(tuple(_bits(best[1])), source="branch-and-bound"),
            )
        if C == 0:
            if _popcount(S) > best[0]:
                best[0], best[1] = _popcount(S), S
            return
        if bound(S, C) <= best[0]:
            return
        live = S | C
        # branch on the candidate in the most live edges
        v = max(_bits(C), key=lambda x: (sum(1 for e in masks_of[x] if e & live == e), -x))
        bit = 1 << v
        S2 = S | bit
        C2 = C & ~bit
        for e in masks_of[v]:
            if e & (S2 | C2) == e:
                rem = e & ~S2
                if rem & (rem - 1) == 0:
                    C2 &= ~rem
        rec(S2, C2)
        rec(S, C & ~bit)

    rec(0, C0)
    witness = tuple(_bits(best[1]))
    assert G.is_independent(witness)
    return best[0], IndependentSet(witness, certified_maximum=True, source="branch-and-bound")


def exhaustive_independence_number(G: Hypergraph) -> tuple[int, tuple[int, ...]]:
    """Oracle: scan all 2^n vertex subsets (numba/numpy kernel)."""
    if G.n > EXHAUSTIVE_CAP:
        raise HypergraphError(f"exhaustive scan capped at n = {EXHAUSTIVE_CAP}")
    a, w = kernels.exhaustive_alpha(G.edge_mask_array(), G.n)
    return a, tuple(_bits(w))


# -- weak chromatic number -------------------------------------------------


def _greedy_coloring(G: Hypergraph) -> list[int]:
    colors = [-1] * G.n
    for v in sorted(range(G.n), key=lambda x: (-G.degrees[x], x)):
        banned = set()
        for i in G.incidence[v]:
            others = [colors[u] for u in G.edges[i] if u != v]
            if all(c >= 0 for c in others) and len(set(others)) == 1:
                banned.add(others[0])
        c = 0
        while c in banned:
            c += 1
        colors[v] = c
    return colors


def _k_colorable(G: Hypergraph, k: int, meter: _Meter) -> list[int] | None:
    n = G.n
    order = sorted(range(n), key=lambda x: (-G.degrees[x], x))
    pos = {v: i for i, v in enumerate(order)}
    closing: list[list[tuple[int, ...]]] = [[] for _ in range(n)]
    for e in G.edges:
        closing[max(pos[v] for v in e)].append(e)
    colors = [-1] * n

    def rec(i: int, used: int) -> bool:
        if not meter.tick():
            raise BudgetExceeded(f"coloring search exceeded {meter.budget.max_nodes} nodes", lower=k)
        if i == n:
            return True
        v = order[i]
        # a new color may only be the next unused one
        for c in range(min(k, used + 1)):
            colors[v] = c
            if all(any(colors[u] != c for u in e) for e in closing[i]):
                if rec(i + 1, max(used, c + 1)):
                    return True
        colors[v] = -1
        return False

    return list(colors) if rec(0, 0) else None


def weak_chromatic_number(G: Hypergraph, budget: SolverBudget | None = None) -> tuple[int, Coloring]:
    """Exact weak chromatic number by iterative deepening on the palette."""
    if G.n == 0:
        return 0, Coloring((), 0)
    if not G.edges:
        return 1, Coloring((0,) * G.n, 1)
    if G.r < 2:
        raise HypergraphError("a hypergraph with 1-element edges has no proper coloring")
    meter = _Meter(budget)
    greedy = _greedy_coloring(G)
    ub = max(greedy) + 1
    for k in range(2, ub):
        try:
            found = _k_colorable(G, k, meter)
        except BudgetExceeded as exc:
            exc.lower, exc.upper = k, ub
            exc.best = Coloring(greedy, ub)
            raise
        if found is not None:
            col = Coloring(found, k)
            assert col.is_proper(G)
            return k, col
    col = Coloring(greedy, ub)
    assert col.is_proper(G)
    return ub, col


def exhaustive_chromatic_number(G: Hypergraph) -> int:
    """Oracle: minimum cover of the vertex set by independent sets."""
    if G.n > EXHAUSTIVE_CAP:
        raise HypergraphError(f"exhaustive scan capped at n = {EXHAUSTIVE_CAP}")
    if G.r < 2 and G.edges:
        raise HypergraphError("a hypergraph with 1-element edges has no proper coloring")
    return kernels.exhaustive_chromatic(G.edge_mask_array(), G.n)


# -- graphs: degeneracy ----------------------------------------------------


def _graph_adjacency(graph: Hypergraph) -> list[set[int]]:
    if graph.r != 2:
        raise HypergraphError(f"degeneracy coloring needs a graph (r = 2), got r = {graph.r}")
    adj: list[set[int]] = [set() for _ in range(graph.n)]
    for u, v in graph.edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def smallest_last(graph: Hypergraph) -> tuple[list[int], int]:
    """Elimination order removing a minimum-degree vertex each step, and the
    degeneracy (largest degree seen at removal). Ties go to the smaller id."""
    adj = _graph_adjacency(graph)
    deg = [len(a) for a in adj]
    heap = [(d, v) for v, d in enumerate(deg)]
    heapq.heapify(heap)
    gone = [False] * graph.n
    order: list[int] = []
    d_max = 0
    while heap:
        d, v = heapq.heappop(heap)
        if gone[v] or d != deg[v]:
            continue
        gone[v] = True
        order.append(v)
        d_max = max(d_max, d)
        for u in adj[v]:
            if not gone[u]:
                deg[u] -= 1
                heapq.heappush(heap, (deg[u], u))
    return order, d_max


def degeneracy_coloring(graph: Hypergraph) -> Coloring:
    """Greedy coloring in reverse smallest-last order; at most d+1 colors."""
    adj = _graph_adjacency(graph)
    order, d = smallest_last(graph)
    colors = [-1] * graph.n
    for v in reversed(order):
        taken = {colors[u] for u in adj[v]}
        c = 0
        while c in taken:
            c += 1
        colors[v] = c
    palette = max(colors, default=-1) + 1
    assert palette <= d + 1
    col = Coloring(colors, palette, meta={"degeneracy": d})
    assert col.is_proper(graph)
    return col


# -- independent sets for independent-neighborhood hosts -------------------


def _at_least_root(size: int, n: int, r: int) -> bool:
    """size >= n ** (1/r), in integers."""
    return size**r >= n


def _random_deletion(G: Hypergraph, gen: np.random.Generator, trials: int) -> tuple[int, ...]:
    n, r, m = G.n, G.r, G.m
    if m == 0:
        return tuple(range(n))
    # maximizes n q - m q^r, the expected survivors after one deletion per edge
    q = min(1.0, (n / (r * m)) ** (1.0 / (r - 1))) if r > 1 else 0.5
    deg = G.degrees
    masks_of = [[G.edge_masks[i] for i in G.incidence[v]] for v in range(n)]
    fill_order = sorted(range(n), key=lambda x: (deg[x], x))
    best: tuple[int, ...] = ()
    for _ in range(trials):
        pick = gen.random(n) < q
        S = 0
        for v in np.flatnonzero(pick):
            S |= 1 << int(v)
        for e, em in zip(G.edges, G.edge_masks):
            if S & em == em:
                drop = max(e, key=lambda x: (deg[x], -x))
                S &= ~(1 << drop)
        for v in fill_order:
            bit = 1 << v
            if S & bit:
                continue
            S2 = S | bit
            if all(em & S2 != em for em in masks_of[v]):
                S = S2
        if _popcount(S) > len(best):
            best = tuple(_bits(S))
    return best


def turan_independent_set(
    G: Hypergraph,
    seed: int | None = 0,
    trials: int = 32,
    exact_cap: int = 40,
    stream_path: tuple[int, ...] = (),
) -> IndependentSet:
    """Independent set of size >= n^(1/r) on independent-neighborhood hosts.

    Candidates: the largest (r-1)-set neighborhood (independent when G has
    independent neighborhoods; verified here) and the best of ``trials``
    randomized deletion rounds. If G has independent neighborhoods and both
    fall short, an exact search runs when ``n <= exact_cap``; otherwise the
    result is flagged ``below_guarantee``.
    """
    n = G.n
    if G.m == 0:
        return IndependentSet(tuple(range(n)), certified_maximum=True, source="all")
    nbhd: tuple[int, ...] = ()
    for core, nb in sorted(codegree_table(G).items()):
        if len(nb) > len(nbhd) and G.is_independent(nb):
            nbhd = nb
    gen = rng.stream(seed, rng.STREAM_TURAN, *stream_path)
    rand = _random_deletion(G, gen, trials)
    result = IndependentSet(nbhd, source="neighborhood")
    if len(rand) > len(nbhd):
        result = IndependentSet(rand, source="random-deletion")
    if not _at_least_root(len(result), n, G.r):
        guaranteed = G.r >= 2 and independent_neighborhoods_check(G).ok
        if guaranteed and n <= exact_cap:
            _, exact = independence_number(G)
            result = IndependentSet(exact.vertices, certified_maximum=True, source="exact")
        result = IndependentSet(
            result.vertices,
            certified_maximum=result.certified_maximum,
            below_guarantee=not _at_least_root(len(result), n, G.r),
            source=result.source,
        )
    assert G.is_independent(result.vertices)
    return result


# -- peeling ---------------------------------------------------------------


def peel_palette_bound(n: int, alpha: Fraction) -> int:
    """ceil(2 n^(1-alpha)) computed exactly for rational alpha."""
    if n == 0:
        return 0
    p, q = alpha.numerator, alpha.denominator
    target = 2**q * n ** (q - p)  # (2 n^(1-alpha))^q
    c = max(1, ceil(2 * n ** (1 - float(alpha))) - 2)
    while c**q < target:
        c += 1
    while c > 1 and (c - 1) ** q >= target:
        c -= 1
    return c


def recursive_coloring(
    G: Hypergraph,
    extractor: Callable[[Hypergraph], Iterable[int] | IndependentSet],
    alpha: Fraction | float | str = Fraction(1, 2),
) -> Coloring:
    """Peel independent sets, one fresh color each.

    ``extractor`` receives each remaining induced subhypergraph (vertices
    relabeled 0..m-1) and must return an independent set of size >= m^alpha.
    The palette is then at most ceil(2 n^(1-alpha)).
    """
    alpha = Fraction(alpha).limit_denominator(10**6) if not isinstance(alpha, Fraction) else alpha
    if not (0 < alpha <= Fraction(1, 2)):
        raise ValueError(f"alpha must lie in (0, 1/2], got {alpha}")
    p, q = alpha.numerator, alpha.denominator
    colors = [-1] * G.n
    remaining = list(range(G.n))
    palette = 0
    while remaining:
        sub, vmap = induced_subhypergraph(G, remaining)
        got = extractor(sub)
        ids = list(got.vertices if isinstance(got, IndependentSet) else got)
        m = sub.n
        if len(set(ids)) != len(ids) or any(not (0 <= v < m) for v in ids):
            raise ExtractorContractViolation("extractor returned invalid vertex ids", sub, ids)
        if not sub.is_independent(ids):
            raise ExtractorContractViolation("extractor returned a dependent set", sub, ids)
        if len(ids) ** q < m**p:
            raise ExtractorContractViolation(f"extractor returned {len(ids)} < {m}^{alpha} vertices", sub, ids)
        for v in ids:
            colors[vmap[v]] = palette
        palette += 1
        taken = {vmap[v] for v in ids}
        remaining = [v for v in remaining if v not in taken]
    bound = peel_palette_bound(G.n, alpha)
    if palette > bound:
        raise AssertionError(f"peeling used {palette} colors, bound is {bound}")
    col = Coloring(colors, palette, meta={"bound": bound})
    assert col.is_proper(G)
    return col


def exact_extractor(sub: Hypergraph) -> tuple[int, ...]:
    return independence_number(sub)[1].vertices


# -- local lemma resampling ------------------------------------------------


def lll_degree_ok(G: Hypergraph, k: int) -> bool:
    """max degree <= k^(r-1) / (4r), in integers."""
    return 4 * G.r * G.max_degree <= k ** (G.r - 1)


def lll_coloring(
    G: Hypergraph,
    k: int,
    seed: int | None = 0,
    budget: SolverBudget | None = None,
    enforce_precondition: bool = True,
    stream_path: tuple[int, ...] = (),
) -> Coloring:
    """Random k-coloring repaired by resampling monochromatic edges.

    Each step resamples every vertex of the lowest-index monochromatic edge.
    """
    if k < 1:
        raise ValueError(f"palette must be positive, got {k}")
    if enforce_precondition and not lll_degree_ok(G, k):
        raise PreconditionFailed(
            f"max degree {G.max_degree} exceeds k^(r-1)/(4r) = {k ** (G.r - 1)}/{4 * G.r}"
        )
    budget = budget or SolverBudget()
    gen = rng.stream(seed, rng.STREAM_LLL, *stream_path)
    colors = gen.integers(k, size=G.n).astype(np.int64)
    mono = kernels.monochromatic_mask(G.edge_array(), colors) if G.edges else np.zeros(0, bool)
    heap = [int(i) for i in np.flatnonzero(mono)]
    heapq.heapify(heap)
    edges, inc = G.edges, G.incidence

    def is_mono(i: int) -> bool:
        e = edges[i]
        c = colors[e[0]]
        return all(colors[v] == c for v in e[1:])

    resamples = 0
    while heap:
        i = heapq.heappop(heap)
        if not is_mono(i):
            continue
        if resamples >= budget.max_resamples:
            best = Coloring(colors.tolist(), k, meta={"resamples": resamples, "proper": False})
            raise BudgetExceeded(f"resample cap {budget.max_resamples} reached", best=best)
        resamples += 1
        e = edges[i]
        colors[list(e)] = gen.integers(k, size=len(e))
        for v in e:
            for j in inc[v]:
                if is_mono(j):
                    heapq.heappush(heap, j)
    col = Coloring(colors.tolist(), k, meta={"resamples": resamples})
    assert col.is_proper(G)
    return col


# -- independent-neighborhood coloring -------------------------------------


@dataclass
class StageReport:
    k: int
    r: int
    low_degree_threshold: Fraction
    low_vertices: int
    n_prime: int
    stage1_palette: int
    stage2_palette: int
    stage2_bound: int
    palette: int
    b_indep: Fraction
    premise_holds: bool
    n_prime_within: bool | None = None
    within_k: bool | None = None
    resamples: int = 0
    extractor_flags: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = dict(self.__dict__)
        out["low_degree_threshold"] = str(self.low_degree_threshold)
        out["b_indep"] = str(self.b_indep)
        return out


def b_indep(r: int) -> Fraction:
    """Lower-bound constant 1/(40 r^2 2^r)."""
    return Fraction(1, 40 * r * r * 2**r)


def _premise(m: int, k: int, r: int) -> bool:
    """m <= b k^(r + 1/(r-1)), raised to the power r-1 to stay in integers."""
    b = b_indep(r)
    lhs = Fraction(m) ** (r - 1)
    rhs = b ** (r - 1) * Fraction(k) ** (r * (r - 1) + 1)
    return lhs <= rhs


def indnbd_coloring(
    G: Hypergraph,
    k: int,
    seed: int | None = 0,
    budget: SolverBudget | None = None,
    exact_cap: int = 40,
) -> tuple[Coloring, StageReport]:
    """Two-stage coloring of an independent-neighborhood host.

    Vertices of degree below d = k^(r-1)/(2r 2^r) get a resampling coloring
    with k/2 colors; the rest are peeled with independent sets of size
    m^(1/r) on a disjoint palette.
    """
    if k < 2 or k % 2:
        raise ValueError(f"k must be a positive even integer, got {k}")
    r = G.r
    if r < 2:
        raise HypergraphError("needs r >= 2")
    check = independent_neighborhoods_check(G)
    if not check.ok:
        raise NotIndependentNeighborhoods(check.core, check.edge)
    d = Fraction(k ** (r - 1), 2 * r * 2**r)
    low = [v for v in range(G.n) if G.degrees[v] < d]
    high = [v for v in range(G.n) if G.degrees[v] >= d]
    colors = [-1] * G.n

    p1 = 0
    resamples = 0
    if low:
        GA, amap = induced_subhypergraph(G, low)
        if GA.m == 0:
            p1 = 1
            for v in amap:
                colors[v] = 0
        else:
            c1 = lll_coloring(GA, k // 2, seed, budget, stream_path=(0,))
            p1 = k // 2
            resamples = c1.meta.get("resamples", 0)
            for i, v in enumerate(amap):
                colors[v] = c1.colors[i]

    p2 = 0
    flags: list[str] = []
    if high:
        GB, bmap = induced_subhypergraph(G, high)
        calls = [0]

        def extractor(sub: Hypergraph) -> IndependentSet:
            calls[0] += 1
            res = turan_independent_set(sub, seed, exact_cap=exact_cap, stream_path=(1, calls[0]))
            if res.below_guarantee:
                flags.append(f"below_guarantee:m={sub.n}")
            return res

        c2 = recursive_coloring(GB, extractor, Fraction(1, r))
        p2 = c2.palette_size
        for i, v in enumerate(bmap):
            colors[v] = p1 + c2.colors[i]

    palette = p1 + p2
    report = StageReport(
        k=k,
        r=r,
        low_degree_threshold=d,
        low_vertices=len(low),
        n_prime=len(high),
        stage1_palette=p1,
        stage2_palette=p2,
        stage2_bound=peel_palette_bound(len(high), Fraction(1, r)),
        palette=palette,
        b_indep=b_indep(r),
        premise_holds=_premise(G.m, k, r),
        resamples=resamples,
        extractor_flags=flags,
    )
    if report.premise_holds:
        report.n_prime_within = len(high) * d <= r * G.m
        report.within_k = palette <= k
    col = Coloring(colors, max(palette, 1) if G.n else 0, meta={"stages": [p1, p2]})
    assert col.is_proper(G)
    assert palette <= k // 2 + report.stage2_bound
    return col, report
