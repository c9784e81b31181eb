"""Vectorized numpy kernels; the fallback when numba is disabled or missing."""

import numpy as np

_CHUNK = 1 << 20


def _popcount(a):
    return np.bitwise_count(a).astype(np.int64)


def _bit_reverse(subs, width):
    out = np.zeros_like(subs)
    for j in range(width):
        out |= ((subs >> j) & 1) << (width - 1 - j)
    return out


def density_sweep(vmasks, r):
    e = int(vmasks.shape[0])
    subs = np.arange(1, 1 << e, dtype=np.int64)
    pcs = _popcount(subs)
    keep = pcs >= 2
    subs, pcs = subs[keep], pcs[keep]
    if subs.size == 0:
        return -1, 1, -1
    union = np.zeros_like(subs)
    for j in range(e):
        union |= np.where((subs >> j) & 1 == 1, vmasks[j], 0)
    num = pcs - 1
    den = _popcount(union) - r
    # floats only locate the maximum; ties are then resolved in integers
    i0 = int(np.argmax(num / den))
    bn, bd = int(num[i0]), int(den[i0])
    tied = num * bd == bn * den
    tsubs, tpcs = subs[tied], pcs[tied]
    min_pc = tpcs.min()
    tsubs = tsubs[tpcs == min_pc]
    # lexicographically first index tuple == largest bit-reversed mask
    pick = tsubs[int(np.argmax(_bit_reverse(tsubs, e)))]
    sel = subs == pick
    return int(num[sel][0]), int(den[sel][0]), int(pick)


def _independent_table(masks, n):
    S = np.arange(1 << n, dtype=np.int64)
    dep = np.zeros(S.shape, dtype=bool)
    for m in masks:
        dep |= (S & m) == m
    return ~dep


def exhaustive_alpha(masks, n):
    indep = _independent_table(masks, n)
    S = np.arange(1 << n, dtype=np.int64)
    pcs = np.where(indep, _popcount(S), -1)
    best = int(pcs.max())
    return best, int(np.argmax(pcs == best))


def exhaustive_chromatic(masks, n):
    """Layered cover search over maximal independent sets."""
    if n == 0:
        return 0
    indep = _independent_table(masks, n)
    S = np.arange(1 << n, dtype=np.int64)
    maximal = indep.copy()
    for v in range(n):
        bit = np.int64(1) << v
        ext = S | bit
        maximal &= ((S & bit) != 0) | ~indep[ext]
    tops = S[maximal]
    full = (1 << n) - 1
    reach = S == 0
    for k in range(1, n + 1):
        nxt = np.zeros_like(reach)
        for T in tops:
            nxt |= reach[S & ~T]
        reach = nxt
        if reach[full]:
            return k
    raise AssertionError("n singleton classes always suffice")


def monochromatic_mask(edges, colors):
    if edges.shape[0] == 0:
        return np.zeros(0, dtype=bool)
    c = colors[edges]
    return (c == c[:, :1]).all(axis=1)


def unrank_colex(ranks, n, r, table):
    out = np.empty((ranks.shape[0], r), dtype=np.int64)
    N = ranks.copy()
    for i in range(r, 0, -1):
        c = np.searchsorted(table[i, : n + 1], N, side="right") - 1
        out[:, i - 1] = c
        N -= table[i, c]
    return out
