"""Compiled parallel list Viterbi kernels for feedforward tail-biting trellises.

Path metrics are correlations ``sum (1 - 2c) * llr`` (larger is more likely).
Every state keeps its ``L`` best paths, ordered by metric and, on ties, by
predecessor state then predecessor rank.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def stage_metrics(llr, T, pats, starts):
    """Branch correlations ``bm[t, s, b]`` for every stage.

    Output columns are split into groups of at most six; ``pats[s, b, g]`` is
    the branch's bit pattern within group ``g`` (bit ``i`` = column
    ``starts[g] + i``), so each branch costs one table lookup per group.
    """
    S = pats.shape[0]
    G = pats.shape[2]
    n_out = starts[G]
    bm = np.empty((T, S, 2))
    tab = np.empty(64)
    for t in range(T):
        off = t * n_out
        for s in range(S):
            bm[t, s, 0] = 0.0
            bm[t, s, 1] = 0.0
        for g in range(G):
            j0 = starts[g]
            w = starts[g + 1] - j0
            acc = 0.0
            for i in range(w):
                acc += llr[off + j0 + i]
            tab[0] = acc
            for p in range(1, 1 << w):
                low = p & -p
                i = 0
                while (1 << i) != low:
                    i += 1
                tab[p] = tab[p ^ low] - 2.0 * llr[off + j0 + i]
            for s in range(S):
                bm[t, s, 0] += tab[pats[s, 0, g]]
                bm[t, s, 1] += tab[pats[s, 1, g]]
    return bm


@njit(cache=True)
def viterbi_pass(bm, prev, memory, init):
    """One add-compare-select pass; returns final state metrics (max 0)."""
    T, S = bm.shape[0], bm.shape[1]
    met = init.copy()
    new = np.empty(S)
    for t in range(T):
        for ns in range(S):
            b = ns >> (memory - 1)
            p0 = prev[ns, 0]
            p1 = prev[ns, 1]
            m0 = met[p0] + bm[t, p0, b]
            m1 = met[p1] + bm[t, p1, b]
            new[ns] = m0 if m0 >= m1 else m1
        mx = new.max()
        for s in range(S):
            met[s] = new[s] - mx
    return met


@njit(cache=True)
def list_viterbi(bm, prev, memory, init, L):
    """Parallel LVA from every start state weighted by ``init``.

    Returns ``(met, cnt, start, back, offset)`` where ``met[e, r] + offset``
    is the (init-weighted) metric of the rank-``r`` path ending in ``e`` and
    ``back[t, s, r] = 2 * pred_rank + pred_which``.
    """
    T, S = bm.shape[0], bm.shape[1]
    met = np.full((S, L), -np.inf)
    cnt = np.zeros(S, dtype=np.int64)
    start = np.zeros((S, L), dtype=np.int64)
    nmet = np.full((S, L), -np.inf)
    ncnt = np.zeros(S, dtype=np.int64)
    nstart = np.zeros((S, L), dtype=np.int64)
    back = np.zeros((T, S, L), dtype=np.int32)
    for s in range(S):
        met[s, 0] = init[s]
        cnt[s] = 1
        start[s, 0] = s
    offset = 0.0
    for t in range(T):
        for ns in range(S):
            b = ns >> (memory - 1)
            p0 = prev[ns, 0]
            p1 = prev[ns, 1]
            c0 = cnt[p0]
            c1 = cnt[p1]
            b0 = bm[t, p0, b]
            b1 = bm[t, p1, b]
            i0 = 0
            i1 = 0
            r = 0
            while r < L and (i0 < c0 or i1 < c1):
                if i1 >= c1:
                    take0 = True
                elif i0 >= c0:
                    take0 = False
                else:
                    take0 = met[p0, i0] + b0 >= met[p1, i1] + b1
                if take0:
                    nmet[ns, r] = met[p0, i0] + b0
                    nstart[ns, r] = start[p0, i0]
                    back[t, ns, r] = 2 * i0
                    i0 += 1
                else:
                    nmet[ns, r] = met[p1, i1] + b1
                    nstart[ns, r] = start[p1, i1]
                    back[t, ns, r] = 2 * i1 + 1
                    i1 += 1
                r += 1
            ncnt[ns] = r
        mx = -np.inf
        for s in range(S):
            if ncnt[s] > 0 and nmet[s, 0] > mx:
                mx = nmet[s, 0]
        offset += mx
        for s in range(S):
            cnt[s] = ncnt[s]
            for r in range(ncnt[s]):
                met[s, r] = nmet[s, r] - mx
                start[s, r] = nstart[s, r]
    return met, cnt, start, back, offset


@njit(cache=True)
def traceback(back, prev, memory, end_state, rank, out):
    T = back.shape[0]
    s = end_state
    r = rank
    for t in range(T - 1, -1, -1):
        code = back[t, s, r]
        out[t] = s >> (memory - 1)
        s = prev[s, code & 1]
        r = code >> 1
    return s


@njit(cache=True)
def divisible(bits, gval, width):
    """MSB-first polynomial division of a bit row by ``gval``."""
    rem = np.int64(0)
    top = np.int64(1) << width
    for i in range(bits.size):
        rem = (rem << 1) | bits[i]
        if rem & top:
            rem ^= gval
    return rem == 0


@njit(cache=True)
def ranked_entries(met, cnt, start, offset, init):
    """Merge all per-state lists, sorted by unweighted correlation.

    Returns ``(corr, end, rank, start)`` arrays in list order.
    """
    S = met.shape[0]
    M = 0
    for s in range(S):
        M += cnt[s]
    corr = np.empty(M)
    end = np.empty(M, dtype=np.int64)
    rank = np.empty(M, dtype=np.int64)
    st = np.empty(M, dtype=np.int64)
    i = 0
    for s in range(S):
        for r in range(cnt[s]):
            corr[i] = met[s, r] + offset - init[start[s, r]]
            end[i] = s
            rank[i] = r
            st[i] = start[s, r]
            i += 1
    order = np.argsort(-corr, kind="mergesort")
    return corr[order], end[order], rank[order], st[order]


@njit(cache=True)
def select_first(corr, end, rank, st, back, prev, memory, gval, width, tb_required, out):
    """Index of the first entry passing tail-biting and CRC checks, or -1.

    ``gval < 0`` disables the CRC check. ``out`` receives the entry's data bits.
    """
    for i in range(corr.size):
        if tb_required and st[i] != end[i]:
            continue
        traceback(back, prev, memory, end[i], rank[i], out)
        if gval < 0 or divisible(out, gval, width):
            return i
    return -1


@njit(cache=True)
def unseen_bound(met, cnt, offset, init, L):
    """Largest correlation any tail-biting path missing from the lists can have."""
    S = met.shape[0]
    bound = -np.inf
    for e in range(S):
        if cnt[e] == L:
            v = met[e, L - 1] + offset - init[e]
            if v > bound:
                bound = v
    return bound
