"""Time each kernel under the numba and numpy backends.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--seed 0]

The first numba call compiles; it is timed separately and excluded from
the steady-state numbers. Outputs are compared between backends too.
"""

from __future__ import annotations

import argparse
import time
from math import comb

import numpy as np

from hfree import kernels
from hfree.constructions import gen_Fr, sample_random_hypergraph
from hfree.hypercore import complete_hypergraph


def cases(seed: int):
    gen = np.random.default_rng(seed)
    F4 = gen_Fr(4)
    K = complete_hypergraph(7, 3)  # 35 edges is too many for a sweep; take 18
    sweep_masks = np.array([sum(1 << v for v in e) for e in K.edges[:18]], dtype=np.int64)
    G = sample_random_hypergraph(18, 3, 0.08, seed)
    chi_G = sample_random_hypergraph(11, 3, 0.25, seed)
    big = sample_random_hypergraph(200, 3, 0.02, seed)
    colors = gen.integers(0, 4, size=big.n)
    ranks = np.sort(gen.choice(comb(60, 4), size=200_000, replace=False)).astype(np.int64)
    F4_masks = np.array([sum(1 << v for v in e) for e in F4.edges], dtype=np.int64)
    return {
        "density_sweep(F4)": (kernels.density_sweep, (F4_masks, 4)),
        "density_sweep(18 edges)": (kernels.density_sweep, (sweep_masks, 3)),
        "exhaustive_alpha(n=18)": (kernels.exhaustive_alpha, (G.edge_mask_array(), G.n)),
        "exhaustive_chromatic(n=11)": (kernels.exhaustive_chromatic, (chi_G.edge_mask_array(), chi_G.n)),
        "monochromatic_mask(m=%d)" % big.m: (kernels.monochromatic_mask, (big.edge_array(), colors)),
        "unrank_colex(200k, C(60,4))": (kernels.unrank_colex, (ranks, 60, 4)),
    }


def _same(a, b) -> bool:
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    return a == b


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'kernel':34s} {'backend':7s} {'first (s)':>10s} {'best (s)':>10s}")
    for name, (fn, fargs) in cases(args.seed).items():
        outs = {}
        for b in backends:
            prev = kernels.set_backend(b)
            try:
                t0 = time.perf_counter()
                outs[b] = fn(*fargs)
                first = time.perf_counter() - t0
                best = float("inf")
                for _ in range(args.repeat):
                    t0 = time.perf_counter()
                    fn(*fargs)
                    best = min(best, time.perf_counter() - t0)
            finally:
                kernels.set_backend(prev)
            print(f"{name:34s} {b:7s} {first:10.4f} {best:10.4f}")
        vals = list(outs.values())
        if not all(_same(vals[0], v) for v in vals[1:]):
            raise SystemExit(f"backends disagree on {name}")


if __name__ == "__main__":
    main()
