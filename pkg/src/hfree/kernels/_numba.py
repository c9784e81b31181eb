"""numba-compiled kernels. Same signatures and results as ``_numpy``."""

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@njit(cache=True)
def density_sweep(vmasks, r):
    e = vmasks.shape[0]
    best_num = -1
    best_den = 1
    best_sub = -1
    best_pc = 0
    for sub in range(1, 1 << e):
        pc = _popcount(sub)
        if pc < 2:
            continue
        union = 0
        s = sub
        j = 0
        while s:
            if s & 1:
                union |= vmasks[j]
            s >>= 1
            j += 1
        num = pc - 1
        den = _popcount(union) - r
        if best_sub < 0:
            better = True
        else:
            lhs = num * best_den
            rhs = best_num * den
            if lhs != rhs:
                better = lhs > rhs
            elif pc != best_pc:
                better = pc < best_pc
            else:
                diff = sub ^ best_sub
                better = (sub & (diff & -diff)) != 0
        if better:
            best_num = num
            best_den = den
            best_sub = sub
            best_pc = pc
    return best_num, best_den, best_sub


@njit(cache=True)
def _independent_table(masks, n):
    size = 1 << n
    indep = np.ones(size, dtype=np.bool_)
    m = masks.shape[0]
    for S in range(size):
        for i in range(m):
            if S & masks[i] == masks[i]:
                indep[S] = False
                break
    return indep


@njit(cache=True)
def exhaustive_alpha(masks, n):
    indep = _independent_table(masks, n)
    best = -1
    witness = 0
    for S in range(1 << n):
        if indep[S]:
            pc = _popcount(S)
            if pc > best:
                best = pc
                witness = S
    return best, witness


@njit(cache=True)
def exhaustive_chromatic(masks, n):
    if n == 0:
        return 0
    indep = _independent_table(masks, n)
    size = 1 << n
    big = n + 1
    f = np.full(size, big, dtype=np.int64)
    f[0] = 0
    for S in range(1, size):
        low = S & -S
        rest = S ^ low
        # submasks T of S that contain the lowest vertex of S
        sub = rest
        while True:
            T = sub | low
            if indep[T]:
                cand = f[S ^ T] + 1
                if cand < f[S]:
                    f[S] = cand
            if sub == 0:
                break
            sub = (sub - 1) & rest
    return f[size - 1]


@njit(cache=True)
def monochromatic_mask(edges, colors):
    m = edges.shape[0]
    r = edges.shape[1]
    out = np.zeros(m, dtype=np.bool_)
    for i in range(m):
        c = colors[edges[i, 0]]
        mono = True
        for j in range(1, r):
            if colors[edges[i, j]] != c:
                mono = False
                break
        out[i] = mono
    return out


@njit(cache=True)
def unrank_colex(ranks, n, r, table):
    # table[i, c] = C(c, i) for i in 0..r, c in 0..n
    k = ranks.shape[0]
    out = np.empty((k, r), dtype=np.int64)
    for idx in range(k):
        N = ranks[idx]
        hi = n
        for i in range(r, 0, -1):
            c = i - 1
            lo_c = c
            # largest c < hi with C(c, i) <= N
            a = lo_c
            b = hi - 1
            while a < b:
                mid = (a + b + 1) // 2
                if table[i, mid] <= N:
                    a = mid
                else:
                    b = mid - 1
            out[idx, i - 1] = a
            N -= table[i, a]
            hi = a
    return out
