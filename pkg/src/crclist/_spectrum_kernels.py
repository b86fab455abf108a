"""Compiled kernels behind :mod:`crclist.spectrum`."""

import numpy as np
from numba import njit

from ._intrinsics import cttz64, popcount64


@njit(cache=True)
def gray_walk(G, start, stop, hist, collect_max_w, found, n_found):
    """Histogram codeword weights for Gray-ordered messages ``start..stop-1``.

    Message index ``i`` selects rows by the bits of ``i ^ (i >> 1)``; each
    step XORs one row into the running codeword. Messages whose weight is at
    most ``collect_max_w`` are appended to ``found`` while room remains;
    returns the number that would have been stored.
    """
    k, W = G.shape
    cw = np.zeros(W, dtype=np.uint64)
    g = start ^ (start >> 1)
    for r in range(k):
        if (g >> r) & 1:
            for w in range(W):
                cw[w] ^= G[r, w]
    wt = 0
    for w in range(W):
        wt += popcount64(cw[w])
    hist[wt] += 1
    if wt <= collect_max_w:
        if n_found < found.size:
            found[n_found] = g
        n_found += 1
    i = start + 1
    while i < stop:
        b = cttz64(np.uint64(i))
        wt = 0
        for w in range(W):
            cw[w] ^= G[b, w]
            wt += popcount64(cw[w])
        hist[wt] += 1
        if wt <= collect_max_w:
            if n_found < found.size:
                found[n_found] = i ^ (i >> 1)
            n_found += 1
        i += 1
    return n_found


@njit(cache=True)
def tb_bounded_search(nxt, bw, memory, W, hist, msgs, wts, n_found):
    """Enumerate every tail-biting path of total weight <= ``W``.

    ``bw[t, s, b]`` is the (punctured) branch weight at stage ``t``. Paths are
    grouped by start state; a backward pass gives the least weight still
    needed to return to that state, which prunes the depth-first search.
    Messages are packed with bit 0 (first input) as the most significant bit.
    """
    T, S = bw.shape[0], bw.shape[1]
    big = 1 << 30
    togo = np.empty((T + 1, S), dtype=np.int64)
    st_state = np.empty(T + 1, dtype=np.int64)
    st_w = np.empty(T + 1, dtype=np.int64)
    st_next = np.empty(T + 1, dtype=np.int64)
    st_msg = np.empty(T + 1, dtype=np.int64)
    for s0 in range(S):
        for s in range(S):
            togo[T, s] = big
        togo[T, s0] = 0
        for t in range(T - 1, -1, -1):
            for s in range(S):
                a = bw[t, s, 0] + togo[t + 1, nxt[s, 0]]
                c = bw[t, s, 1] + togo[t + 1, nxt[s, 1]]
                togo[t, s] = a if a < c else c
        if togo[0, s0] > W:
            continue
        depth = 0
        st_state[0] = s0
        st_w[0] = 0
        st_next[0] = 0
        st_msg[0] = 0
        while depth >= 0:
            if depth == T:
                w = st_w[T]
                hist[w] += 1
                if n_found < msgs.size:
                    msgs[n_found] = st_msg[T]
                    wts[n_found] = w
                n_found += 1
                depth -= 1
                continue
            b = st_next[depth]
            if b == 2:
                depth -= 1
                continue
            st_next[depth] = b + 1
            s = st_state[depth]
            ns = nxt[s, b]
            nw = st_w[depth] + bw[depth, s, b]
            if nw + togo[depth + 1, ns] <= W:
                st_state[depth + 1] = ns
                st_w[depth + 1] = nw
                st_next[depth + 1] = 0
                st_msg[depth + 1] = (st_msg[depth] << 1) | b
                depth += 1
    return n_found


@njit(cache=True)
def popcount_rows(P):
    out = np.zeros(P.shape[0], dtype=np.int64)
    for i in range(P.shape[0]):
        acc = 0
        for w in range(P.shape[1]):
            acc += popcount64(P[i, w])
        out[i] = acc
    return out
