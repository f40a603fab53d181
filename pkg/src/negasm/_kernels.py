"""Hot loops for cut search over integer-scaled bond graphs.

Two interchangeable back ends compute the same results:

* numba ``@njit`` branch-and-bound (default when numba imports),
* a pure numpy / python path, selected with ``NEGASM_DISABLE_NUMBA=1``.

Weights are int64 after scaling every finite strength by a common denominator,
so both paths are exact. Graphs above 62 nodes always take the python
branch-and-bound, whose masks are unbounded ints. Node ``order[0]`` is pinned to side 0, so each
unordered bipartition is visited once. A bipartition is returned as a bitmask
of the nodes on side 1.
"""
from __future__ import annotations

import os

import numpy as np

BIG = np.int64(1) << np.int64(60)
NUMBA_MAX_NODES = 62  # bitmasks are int64; larger graphs take the python path

USE_NUMBA = os.environ.get("NEGASM_DISABLE_NUMBA", "").strip() not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


def negative_tail(adj: np.ndarray, order: np.ndarray) -> np.ndarray:
    """``tail[d]`` = sum of negative edges touching a node of rank >= d."""
    k = order.shape[0]
    rank = np.empty(k, dtype=np.int64)
    rank[order] = np.arange(k)
    tail = np.zeros(k + 1, dtype=np.int64)
    iu, ju = np.nonzero(np.triu(adj, 1) < 0)
    for i, j in zip(iu, ju):
        r = max(rank[i], rank[j])
        tail[: r + 1] += adj[i, j]
    return tail


def _bb_python(adj, order, tail, thr, want_all, cap):
    k = len(order)
    a = adj.tolist()
    order = [int(v) for v in order]
    tail = [int(t) for t in tail]
    side = [0] * k
    best = int(thr) if want_all else int(BIG)
    found: list[tuple[int, int]] = []

    def rec(d, w, ones):
        nonlocal best
        if d == k:
            if ones == 0:
                return
            if want_all:
                if w < thr:
                    mask = 0
                    for v in range(k):
                        if side[v]:
                            mask |= 1 << v
                    found.append((mask, w))
            elif w < best:
                best = w
            return
        v = order[d]
        row = a[v]
        for c in (0, 1):
            delta = 0
            for e in range(d):
                u = order[e]
                if side[u] != c:
                    delta += row[u]
            nw = w + delta
            bound = thr if want_all else best
            if nw + tail[d + 1] < bound:
                side[v] = c
                rec(d + 1, nw, ones + c)
        side[v] = 0

    rec(1, 0, 0)
    if want_all:
        return found
    return best


def _exhaustive_numpy(adj, thr, want_all):
    """Vectorized enumeration of all 2^(k-1) bipartitions (node 0 on side 0)."""
    k = adj.shape[0]
    n = 1 << (k - 1)
    masks = np.arange(1, n, dtype=np.int64) << 1
    bits = ((masks[:, None] >> np.arange(k, dtype=np.int64)[None, :]) & 1).astype(np.int8)
    iu, ju = np.nonzero(np.triu(adj, 1))
    w = np.zeros(masks.shape[0], dtype=np.int64)
    for i, j in zip(iu, ju):
        w += adj[i, j] * (bits[:, i] ^ bits[:, j])
    if want_all:
        keep = w < thr
        return list(zip(masks[keep].tolist(), w[keep].tolist()))
    if w.size == 0:
        return int(BIG)
    return int(w.min())


if USE_NUMBA:

    @njit(cache=True)
    def _bb_numba(adj, order, tail, thr, want_all, out_mask, out_w):
        k = order.shape[0]
        side = np.zeros(k, dtype=np.int64)
        choice = np.full(k + 1, -1, dtype=np.int64)
        W = np.zeros(k + 1, dtype=np.int64)
        ones = np.zeros(k + 1, dtype=np.int64)
        best = thr if want_all else BIG
        count = 0
        d = 1
        while d >= 1:
            if d == k:
                if ones[k] > 0:
                    w = W[k]
                    if want_all:
                        if w < thr:
                            if count < out_mask.shape[0]:
                                m = np.int64(0)
                                for v in range(k):
                                    if side[v] == 1:
                                        m |= np.int64(1) << np.int64(v)
                                out_mask[count] = m
                                out_w[count] = w
                            count += 1
                    elif w < best:
                        best = w
                d -= 1
                continue
            c = choice[d] + 1
            if c > 1:
                choice[d] = -1
                side[order[d]] = 0
                d -= 1
                continue
            choice[d] = c
            v = order[d]
            side[v] = c
            delta = np.int64(0)
            for e in range(d):
                u = order[e]
                if side[u] != c:
                    delta += adj[u, v]
            nw = W[d] + delta
            bound = thr if want_all else best
            if nw + tail[d + 1] < bound:
                W[d + 1] = nw
                ones[d + 1] = ones[d] + c
                d += 1
                choice[d] = -1
        if want_all:
            return count
        return best


def min_cut_int(adj: np.ndarray, order: np.ndarray) -> int:
    """Minimum cut weight over all bipartitions; ``BIG`` when ``k == 1``."""
    k = adj.shape[0]
    if k < 2:
        return int(BIG)
    tail = negative_tail(adj, order)
    if USE_NUMBA and k <= NUMBA_MAX_NODES:
        dummy_m = np.zeros(0, dtype=np.int64)
        return int(_bb_numba(adj, order, tail, np.int64(BIG), False, dummy_m, dummy_m))
    if k <= 16:
        return _exhaustive_numpy(adj, int(BIG), False)
    return _bb_python(adj, order, tail, int(BIG), False, 0)


def cuts_below_int(adj: np.ndarray, order: np.ndarray, thr: int) -> list[tuple[int, int]]:
    """All (mask, weight) bipartitions with weight strictly below ``thr``."""
    k = adj.shape[0]
    if k < 2:
        return []
    tail = negative_tail(adj, order)
    if USE_NUMBA and k <= NUMBA_MAX_NODES:
        cap = 64
        while True:
            out_m = np.zeros(cap, dtype=np.int64)
            out_w = np.zeros(cap, dtype=np.int64)
            n = _bb_numba(adj, order, tail, np.int64(thr), True, out_m, out_w)
            if n <= cap:
                return list(zip(out_m[:n].tolist(), out_w[:n].tolist()))
            cap = int(n)
    if k <= 16:
        return _exhaustive_numpy(adj, thr, True)
    return _bb_python(adj, order, tail, thr, True, 0)
