"""Constructions, invariants and coloring procedures for H-free uniform hypergraphs."""

from .hypercore import Coloring, Hypergraph, parse_hypergraph, serialize_hypergraph

__version__ = "0.1.0"

__all__ = ["Coloring", "Hypergraph", "parse_hypergraph", "serialize_hypergraph", "__version__"]
