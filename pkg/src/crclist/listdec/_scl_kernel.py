"""Compiled LLR-domain successive-cancellation list decoder.

Intermediate LLR ("alpha") and left partial-sum ("beta") vectors live in
per-level slot pools. Paths share slots after a split and take a private slot
only when they overwrite a level, so a split costs O(levels) bookkeeping
instead of a full copy.
"""

import numpy as np
from numba import njit

from .._intrinsics import cttz64


@njit(cache=True, inline="always")
def _minsum(a, b):
    m = min(abs(a), abs(b))
    return m if (a >= 0) == (b >= 0) else -m


@njit(cache=True, inline="always")
def _penalty(llr, bit):
    if bit == 0:
        return -llr if llr < 0 else 0.0
    return llr if llr > 0 else 0.0


@njit(cache=True)
def _own_slot(slots, refs, free, nfree, s, path):
    """Give ``path`` a private slot at level ``s``; returns the new free count."""
    cur = slots[s, path]
    if refs[s, cur] == 1:
        return nfree
    refs[s, cur] -= 1
    nfree[s] -= 1
    new = free[s, nfree[s]]
    slots[s, path] = new
    refs[s, new] = 1
    return nfree


@njit(cache=True)
def _rebuild_refs(slots, refs, free, nfree, n_levels, n_paths, pool):
    for s in range(n_levels):
        for j in range(pool):
            refs[s, j] = 0
        for p in range(n_paths):
            refs[s, slots[s, p]] += 1
        nfree[s] = 0
        for j in range(pool - 1, -1, -1):
            if refs[s, j] == 0:
                free[s, nfree[s]] = j
                nfree[s] += 1


@njit(cache=True)
def scl_kernel(ch, frozen, L):
    """Decode channel LLRs ``ch`` (positive favours 0).

    Returns ``(data, pm)``: data bits of each surviving path in ascending
    channel order and its accumulated min-sum penalty (lower is more likely),
    sorted by penalty with ties broken by path index.
    """
    N = ch.size
    n = 0
    while (1 << n) < N:
        n += 1
    K = 0
    for i in range(N):
        if not frozen[i]:
            K += 1
    pool = L
    levels = max(n, 1)
    alpha = np.zeros((pool, 2 * N), dtype=np.float64)
    beta = np.zeros((pool, 2 * N), dtype=np.uint8)
    a_slots = np.zeros((levels, pool), dtype=np.int64)
    b_slots = np.zeros((levels, pool), dtype=np.int64)
    a_refs = np.zeros((levels, pool), dtype=np.int64)
    b_refs = np.zeros((levels, pool), dtype=np.int64)
    a_free = np.zeros((levels, pool), dtype=np.int64)
    b_free = np.zeros((levels, pool), dtype=np.int64)
    a_nfree = np.zeros(levels, dtype=np.int64)
    b_nfree = np.zeros(levels, dtype=np.int64)
    _rebuild_refs(a_slots, a_refs, a_free, a_nfree, levels, 1, pool)
    _rebuild_refs(b_slots, b_refs, b_free, b_nfree, levels, 1, pool)

    pm = np.zeros(pool, dtype=np.float64)
    data = np.zeros((pool, max(K, 1)), dtype=np.uint8)
    scratch = np.zeros(N, dtype=np.uint8)
    tmp = np.zeros(N, dtype=np.uint8)
    leaf = np.zeros(pool, dtype=np.float64)

    cand_pm = np.zeros(2 * pool, dtype=np.float64)
    new_pm = np.zeros(pool, dtype=np.float64)
    new_data = np.zeros((pool, max(K, 1)), dtype=np.uint8)
    new_a = np.zeros((levels, pool), dtype=np.int64)
    new_b = np.zeros((levels, pool), dtype=np.int64)
    bits = np.zeros(pool, dtype=np.uint8)
    new_bits = np.zeros(pool, dtype=np.uint8)

    n_paths = 1
    k_idx = 0
    for phi in range(N):
        # descend to the leaf of phase phi for every path
        if N == 1:
            for p in range(n_paths):
                leaf[p] = ch[0]
        else:
            if phi == 0:
                top = n
            else:
                top = int(cttz64(np.uint64(phi))) + 1
            for p in range(n_paths):
                for s in range(top - 1, -1, -1):
                    a_nfree = _own_slot(a_slots, a_refs, a_free, a_nfree, s, p)
                    dst = a_slots[s, p]
                    h = 1 << s
                    right = s == top - 1 and phi != 0
                    if s + 1 == n:
                        for i in range(h):
                            x = ch[i]
                            y = ch[i + h]
                            if right:
                                bsrc = b_slots[s, p]
                                alpha[dst, h + i] = y - x if beta[bsrc, h + i] else y + x
                            else:
                                alpha[dst, h + i] = _minsum(x, y)
                    else:
                        src = a_slots[s + 1, p]
                        base = 2 * h
                        for i in range(h):
                            x = alpha[src, base + i]
                            y = alpha[src, base + i + h]
                            if right:
                                bsrc = b_slots[s, p]
                                alpha[dst, h + i] = y - x if beta[bsrc, h + i] else y + x
                            else:
                                alpha[dst, h + i] = _minsum(x, y)
                leaf[p] = alpha[a_slots[0, p], 1]

        if frozen[phi]:
            for p in range(n_paths):
                pm[p] += _penalty(leaf[p], 0)
                bits[p] = 0
        else:
            n_cand = 2 * n_paths
            for p in range(n_paths):
                cand_pm[2 * p] = pm[p] + _penalty(leaf[p], 0)
                cand_pm[2 * p + 1] = pm[p] + _penalty(leaf[p], 1)
            if n_cand <= L:
                keep = np.arange(n_cand)
            else:
                order = np.argsort(cand_pm[:n_cand], kind="mergesort")
                keep = np.sort(order[:L])
            n_new = keep.size
            for q in range(n_new):
                c = keep[q]
                parent = c >> 1
                b = c & 1
                new_pm[q] = cand_pm[c]
                new_bits[q] = b
                for j in range(k_idx):
                    new_data[q, j] = data[parent, j]
                new_data[q, k_idx] = b
                for s in range(levels):
                    new_a[s, q] = a_slots[s, parent]
                    new_b[s, q] = b_slots[s, parent]
            n_paths = n_new
            for q in range(n_paths):
                pm[q] = new_pm[q]
                bits[q] = new_bits[q]
                for j in range(k_idx + 1):
                    data[q, j] = new_data[q, j]
                for s in range(levels):
                    a_slots[s, q] = new_a[s, q]
                    b_slots[s, q] = new_b[s, q]
            _rebuild_refs(a_slots, a_refs, a_free, a_nfree, levels, n_paths, pool)
            _rebuild_refs(b_slots, b_refs, b_free, b_nfree, levels, n_paths, pool)
            k_idx += 1

        # fold the decided bit back into the stored left partial sums
        if N > 1:
            for p in range(n_paths):
                scratch[0] = bits[p]
                size = 1
                s = 0
                j = phi
                while (j & 1) and s < n:
                    src = b_slots[s, p]
                    for i in range(size):
                        tmp[i] = beta[src, size + i] ^ scratch[i]
                        tmp[size + i] = scratch[i]
                    size *= 2
                    for i in range(size):
                        scratch[i] = tmp[i]
                    s += 1
                    j >>= 1
                if s < n:
                    b_nfree = _own_slot(b_slots, b_refs, b_free, b_nfree, s, p)
                    dst = b_slots[s, p]
                    for i in range(size):
                        beta[dst, size + i] = scratch[i]

    order = np.argsort(pm[:n_paths], kind="mergesort")
    out_data = np.zeros((n_paths, K), dtype=np.uint8)
    out_pm = np.zeros(n_paths, dtype=np.float64)
    for r in range(n_paths):
        p = order[r]
        out_pm[r] = pm[p]
        for j in range(K):
            out_data[r, j] = data[p, j]
    return out_data, out_pm
