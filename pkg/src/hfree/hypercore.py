"""Uniform hypergraph data model and the plain-text edge-list format.

File format::

    r n m
    <r ascending vertex ids>      (m lines)

Lines starting with ``#`` are ignored. Serialization sorts edges
lexicographically, so ``to_text(parse_hypergraph(x))`` is the canonical
form of ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, ...]

# signed 64-bit masks keep numba arithmetic in one integer type
MAX_MASK_BITS = 62


class HypergraphError(ValueError):
    """Invalid hypergraph data."""


class HypergraphFormatError(HypergraphError):
    """A parse failure tied to a line of the input."""

    kind = "FormatError"

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{self.kind} at {where}{message}")


class MalformedHeader(HypergraphFormatError):
    kind = "MalformedHeader"


class WrongArity(HypergraphFormatError):
    kind = "WrongArity"


class DuplicateVertexInEdge(HypergraphFormatError):
    kind = "DuplicateVertexInEdge"


class DuplicateEdge(HypergraphFormatError):
    kind = "DuplicateEdge"


class VertexOutOfRange(HypergraphFormatError):
    kind = "VertexOutOfRange"


class EdgeCountMismatch(HypergraphFormatError):
    kind = "EdgeCountMismatch"


def _check_edge(e: Sequence[int], r: int, n: int, line: int | None = None) -> Edge:
    if len(e) != r:
        raise WrongArity(f"expected {r} vertices, got {len(e)}", line)
    s = tuple(sorted(int(v) for v in e))
    for a, b in zip(s, s[1:]):
        if a == b:
            raise DuplicateVertexInEdge(f"vertex {a} repeated", line)
    if s and (s[0] < 0 or s[-1] >= n):
        bad = s[0] if s[0] < 0 else s[-1]
        raise VertexOutOfRange(f"vertex {bad} not in 0..{n - 1}", line)
    return s


@dataclass(frozen=True)
class Hypergraph:
    """An r-uniform hypergraph on vertices ``0..n-1``.

    Edges are stored as sorted tuples in lexicographic order. Instances are
    immutable; derived structures (degrees, incidence, bitmasks) are cached
    on first use.
    """

    r: int
    n: int
    edges: tuple[Edge, ...]
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.r < 1:
            raise HypergraphError(f"uniformity must be positive, got {self.r}")
        if self.n < 0:
            raise HypergraphError(f"vertex count must be >= 0, got {self.n}")
        checked = sorted(_check_edge(e, self.r, self.n) for e in self.edges)
        for a, b in zip(checked, checked[1:]):
            if a == b:
                raise DuplicateEdge(f"edge {a} repeated")
        object.__setattr__(self, "edges", tuple(checked))

    @classmethod
    def from_edges(cls, edges: Iterable[Iterable[int]], n: int | None = None, r: int | None = None) -> "Hypergraph":
        es = [tuple(e) for e in edges]
        if r is None:
            if not es:
                raise HypergraphError("cannot infer uniformity of an empty edge list")
            r = len(es[0])
        if n is None:
            n = 1 + max((max(e) for e in es), default=-1)
        return cls(r, n, tuple(es))

    # -- basic queries --------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.edges)

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def edge_set(self) -> frozenset[Edge]:
        if "edge_set" not in self._cache:
            self._cache["edge_set"] = frozenset(self.edges)
        return self._cache["edge_set"]

    def has_edge(self, e: Iterable[int]) -> bool:
        return tuple(sorted(e)) in self.edge_set

    @property
    def degrees(self) -> tuple[int, ...]:
        if "degrees" not in self._cache:
            deg = [0] * self.n
            for e in self.edges:
                for v in e:
                    deg[v] += 1
            self._cache["degrees"] = tuple(deg)
        return self._cache["degrees"]

    def degree(self, v: int) -> int:
        return self.degrees[v]

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    @property
    def incidence(self) -> tuple[tuple[int, ...], ...]:
        """For each vertex, the indices of the edges containing it."""
        if "incidence" not in self._cache:
            inc: list[list[int]] = [[] for _ in range(self.n)]
            for i, e in enumerate(self.edges):
                for v in e:
                    inc[v].append(i)
            self._cache["incidence"] = tuple(tuple(x) for x in inc)
        return self._cache["incidence"]

    @property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        """For each vertex, the vertices sharing at least one edge with it."""
        if "adjacency" not in self._cache:
            adj: list[set[int]] = [set() for _ in range(self.n)]
            for e in self.edges:
                for v in e:
                    adj[v].update(e)
            for v in range(self.n):
                adj[v].discard(v)
            self._cache["adjacency"] = tuple(frozenset(a) for a in adj)
        return self._cache["adjacency"]

    @property
    def support(self) -> tuple[int, ...]:
        """Vertices lying in at least one edge."""
        return tuple(v for v, d in enumerate(self.degrees) if d)

    @property
    def edge_masks(self) -> tuple[int, ...]:
        """Each edge as a Python-int vertex bitmask."""
        if "edge_masks" not in self._cache:
            self._cache["edge_masks"] = tuple(sum(1 << v for v in e) for e in self.edges)
        return self._cache["edge_masks"]

    def edge_array(self) -> np.ndarray:
        """Edges as an ``(m, r)`` int64 array."""
        if not self.edges:
            return np.zeros((0, self.r), dtype=np.int64)
        return np.asarray(self.edges, dtype=np.int64)

    def edge_mask_array(self) -> np.ndarray:
        """Edge bitmasks as int64; requires ``n <= MAX_MASK_BITS``."""
        if self.n > MAX_MASK_BITS:
            raise HypergraphError(f"bitmask kernels need n <= {MAX_MASK_BITS}, got n = {self.n}")
        return np.asarray(self.edge_masks, dtype=np.int64)

    # -- derived hypergraphs -------------------------------------------

    def without_edges(self, removed: Iterable[Edge]) -> "Hypergraph":
        drop = set(removed)
        return Hypergraph(self.r, self.n, tuple(e for e in self.edges if e not in drop))

    def relabel(self, perm: Sequence[int]) -> "Hypergraph":
        """Apply the vertex bijection ``v -> perm[v]``."""
        return Hypergraph(self.r, self.n, tuple(tuple(sorted(perm[v] for v in e)) for e in self.edges))

    def is_independent(self, vertices: Iterable[int]) -> bool:
        s = set(vertices)
        return not any(all(v in s for v in e) for e in self.edges)

    def to_text(self) -> str:
        return serialize_hypergraph(self)

    def __str__(self) -> str:
        return f"Hypergraph(r={self.r}, n={self.n}, m={self.m})"


@dataclass(frozen=True)
class Coloring:
    """A vertex coloring; validity is checked, never assumed."""

    colors: tuple[int, ...]
    palette_size: int
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "colors", tuple(int(c) for c in self.colors))
        if any(c < 0 or c >= self.palette_size for c in self.colors):
            raise HypergraphError("color id outside palette")

    @property
    def used(self) -> int:
        return len(set(self.colors))

    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.palette_size)]
        for v, c in enumerate(self.colors):
            out[c].append(v)
        return out

    def monochromatic_edges(self, G: Hypergraph) -> list[Edge]:
        from .kernels import monochromatic_mask

        if len(self.colors) != G.n:
            raise HypergraphError(f"coloring covers {len(self.colors)} vertices, host has {G.n}")
        if not G.edges:
            return []
        mask = monochromatic_mask(G.edge_array(), np.asarray(self.colors, dtype=np.int64))
        return [e for e, bad in zip(G.edges, mask) if bad]

    def is_proper(self, G: Hypergraph) -> bool:
        return not self.monochromatic_edges(G)

    def to_json(self) -> dict:
        return {"palette_size": self.palette_size, "colors": list(self.colors)}


def parse_hypergraph(text: str | bytes) -> Hypergraph:
    """Parse the edge-list format, reporting errors with 1-based line numbers."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    header: tuple[int, int, int] | None = None
    edges: list[Edge] = []
    seen: dict[Edge, int] = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if header is None:
            if len(parts) != 3:
                raise MalformedHeader(f"expected 'r n m', got {line!r}", lineno)
            try:
                r, n, m = (int(x) for x in parts)
            except ValueError:
                raise MalformedHeader(f"non-integer field in {line!r}", lineno) from None
            if r < 1 or n < 0 or m < 0:
                raise MalformedHeader(f"invalid values in {line!r}", lineno)
            header = (r, n, m)
            continue
        r, n, _ = header
        try:
            ids = [int(x) for x in parts]
        except ValueError:
            raise HypergraphFormatError(f"non-integer vertex id in {line!r}", lineno) from None
        e = _check_edge(ids, r, n, lineno)
        if e in seen:
            raise DuplicateEdge(f"edge {e} repeats line {seen[e]}", lineno)
        seen[e] = lineno
        edges.append(e)
    if header is None:
        raise MalformedHeader("missing header", 1)
    r, n, m = header
    if len(edges) != m:
        raise EdgeCountMismatch(f"header declares {m} edges, found {len(edges)}", None)
    return Hypergraph(r, n, tuple(edges))


def serialize_hypergraph(G: Hypergraph) -> str:
    lines = [f"{G.r} {G.n} {G.m}"]
    lines.extend(" ".join(map(str, e)) for e in G.edges)
    return "\n".join(lines) + "\n"


def read_hypergraph(path) -> Hypergraph:
    with open(path, "rb") as fh:
        return parse_hypergraph(fh.read())


def write_hypergraph(G: Hypergraph, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(serialize_hypergraph(G))


def _as_vertex_set(G: Hypergraph, S: Iterable[int]) -> tuple[int, ...]:
    s = tuple(sorted(set(int(v) for v in S)))
    if s and (s[0] < 0 or s[-1] >= G.n):
        raise VertexOutOfRange(f"vertex set {s} not within 0..{G.n - 1}")
    return s


def induced_subhypergraph(G: Hypergraph, S: Iterable[int]) -> tuple[Hypergraph, tuple[int, ...]]:
    """Edges of G inside S, relabeled densely.

    Returns the subhypergraph and ``vmap`` with ``vmap[new_id] = old_id``.
    """
    vmap = _as_vertex_set(G, S)
    index = {v: i for i, v in enumerate(vmap)}
    inside = set(vmap)
    edges = tuple(tuple(index[v] for v in e) for e in G.edges if all(v in inside for v in e))
    return Hypergraph(G.r, len(vmap), edges), vmap


def neighborhood(G: Hypergraph, S: Iterable[int]) -> tuple[int, ...]:
    """``{v not in S : S + v is an edge}`` for an (r-1)-set S."""
    s = _as_vertex_set(G, S)
    if len(s) != G.r - 1:
        raise HypergraphError(f"neighborhood needs an (r-1)-set, got size {len(s)} with r = {G.r}")
    inside = set(s)
    out = set()
    for e in G.edges:
        rest = [v for v in e if v not in inside]
        if len(rest) == 1:
            out.add(rest[0])
    return tuple(sorted(out))


def codegree_table(G: Hypergraph) -> dict[Edge, tuple[int, ...]]:
    """Map every (r-1)-set with nonempty neighborhood to that neighborhood."""
    table: dict[Edge, list[int]] = {}
    for e in G.edges:
        for i in range(G.r):
            table.setdefault(e[:i] + e[i + 1:], []).append(e[i])
    return {k: tuple(sorted(v)) for k, v in table.items()}


def complete_hypergraph(n: int, r: int) -> Hypergraph:
    return Hypergraph(r, n, tuple(combinations(range(n), r)))


def empty_hypergraph(n: int, r: int) -> Hypergraph:
    return Hypergraph(r, n, ())


FANO_LINES = ((0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5))


def fano_plane() -> Hypergraph:
    return Hypergraph(3, 7, FANO_LINES)
