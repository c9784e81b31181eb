"""Hot inner loops, compiled with numba when available.

Set ``HFREE_BACKEND=numpy`` to force the pure-numpy path (``numba`` is the
default whenever it imports). Both backends return identical results; the
test suite runs every kernel under each.

Kernels
-------
density_sweep(vmasks, r) -> (num, den, subset)
    Max of (e'-1)/(v'-r) over edge subsets with >= 2 edges. Ties go to the
    fewest edges, then the lexicographically first index tuple.
exhaustive_alpha(masks, n) -> (alpha, witness_mask)
    Largest vertex subset containing no edge mask; smallest mask on ties.
exhaustive_chromatic(masks, n) -> chi
    Minimum number of independent sets covering all n vertices.
monochromatic_mask(edges, colors) -> bool[m]
unrank_colex(ranks, n, r, table) -> int64[k, r]
    r-subsets of range(n) with the given colex ranks.
"""

from __future__ import annotations

import os
from math import comb

import numpy as np

from . import _numpy

_NAMES = ("density_sweep", "exhaustive_alpha", "exhaustive_chromatic", "monochromatic_mask", "unrank_colex")

try:
    from . import _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

_BACKENDS = {"numpy": _numpy}
if _numba is not None:
    _BACKENDS["numba"] = _numba


def available_backends() -> tuple[str, ...]:
    return tuple(_BACKENDS)


def _initial_backend() -> str:
    want = os.environ.get("HFREE_BACKEND", "").strip().lower()
    if want:
        if want not in ("numpy", "numba"):
            raise ValueError(f"HFREE_BACKEND must be 'numpy' or 'numba', got {want!r}")
        if want == "numba" and _numba is None:
            raise ImportError("HFREE_BACKEND=numba but numba is not importable")
        return want
    return "numba" if _numba is not None else "numpy"


_active = _initial_backend()


def backend() -> str:
    return _active


def set_backend(name: str) -> str:
    """Switch backends; returns the previous one."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown or unavailable backend {name!r}")
    prev, _active = _active, name
    return prev


def get(name: str, which: str | None = None):
    return getattr(_BACKENDS[which or _active], name)


def density_sweep(vmasks: np.ndarray, r: int) -> tuple[int, int, int]:
    num, den, sub = get("density_sweep")(np.ascontiguousarray(vmasks, dtype=np.int64), r)
    return int(num), int(den), int(sub)


def exhaustive_alpha(masks: np.ndarray, n: int) -> tuple[int, int]:
    a, w = get("exhaustive_alpha")(np.ascontiguousarray(masks, dtype=np.int64), n)
    return int(a), int(w)


def exhaustive_chromatic(masks: np.ndarray, n: int) -> int:
    return int(get("exhaustive_chromatic")(np.ascontiguousarray(masks, dtype=np.int64), n))


def monochromatic_mask(edges: np.ndarray, colors: np.ndarray) -> np.ndarray:
    edges = np.ascontiguousarray(edges, dtype=np.int64).reshape(len(edges), -1)
    return get("monochromatic_mask")(edges, np.ascontiguousarray(colors, dtype=np.int64))


def binomial_table(n: int, r: int) -> np.ndarray:
    if comb(n, r) >= 1 << 62:
        raise OverflowError(f"C({n}, {r}) does not fit the int64 rank space")
    table = np.zeros((r + 1, n + 1), dtype=np.int64)
    for i in range(r + 1):
        for c in range(n + 1):
            table[i, c] = comb(c, i)
    return table


def unrank_colex(ranks: np.ndarray, n: int, r: int) -> np.ndarray:
    ranks = np.ascontiguousarray(ranks, dtype=np.int64)
    if ranks.size == 0:
        return np.zeros((0, r), dtype=np.int64)
    return get("unrank_colex")(ranks, n, r, binomial_table(n, r))
