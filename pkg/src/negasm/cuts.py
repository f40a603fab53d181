"""Bond graphs, stability, breaks and combinations at threshold 1."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

from . import _kernels
from .model import INF, OFFSETS, OPPOSITE, Assembly, Coord, Strength, bond_strength, is_connected

ONE = Fraction(1)
DEFAULT_MAX_CUT_NODES = 160


class SizeLimitExceeded(ValueError):
    pass


def max_cut_nodes() -> int:
    return int(os.environ.get("NEGASM_MAX_CUT_TILES", DEFAULT_MAX_CUT_NODES))


@dataclass(frozen=True)
class BondGraph:
    vertices: tuple[Coord, ...]
    edges: dict[tuple[Coord, Coord], Strength]

    def weight(self, a: Coord, b: Coord) -> Strength:
        key = (a, b) if a < b else (b, a)
        return self.edges.get(key, Fraction(0))


@dataclass(frozen=True)
class Cut:
    side_a: frozenset
    side_b: frozenset
    weight: Strength


def bond_graph(a: Assembly) -> BondGraph:
    m = a.mapping
    edges = {}
    for (x, y), t in a.cells:
        for face in ("e", "n"):
            dx, dy = OFFSETS[face]
            c = (x + dx, y + dy)
            other = m.get(c)
            if other is None:
                continue
            s = bond_strength(t, face, other)
            if s is INF or s != 0:
                edges[((x, y), c)] = s
    return BondGraph(tuple(m), edges)


def cut_weight(g: BondGraph, side: set) -> Strength:
    total: Strength = Fraction(0)
    for (u, v), w in g.edges.items():
        if (u in side) != (v in side):
            if w is INF:
                return INF
            total += w
    return total


class _Contracted:
    """Bond graph with infinite edges contracted and weights scaled to int64.

    With ``merge_below`` set, nodes that no cut lighter than that value can
    separate are merged as well (see :func:`_merge_unseparable`).
    """

    def __init__(self, a: Assembly, merge_below: Fraction | None = None):
        g = bond_graph(a)
        verts = list(g.vertices)
        parent = {v: v for v in verts}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for (u, v), w in g.edges.items():
            if w is INF:
                ru, rv = find(u), find(v)
                if ru != rv:
                    parent[max(ru, rv)] = min(ru, rv)
        roots = sorted({find(v) for v in verts})
        idx = {r: i for i, r in enumerate(roots)}
        label = np.asarray([idx[find(v)] for v in verts], dtype=np.int64)
        k = len(roots)
        finite = [(idx[find(u)], idx[find(v)], w) for (u, v), w in g.edges.items() if w is not INF]
        den = 1
        for _, _, w in finite:
            den = den * w.denominator // math.gcd(den, w.denominator)
        self.den = den
        adj = np.zeros((k, k), dtype=np.int64)
        for i, j, w in finite:
            if i == j:
                continue
            iw = int(w * den)
            adj[i, j] += iw
            adj[j, i] += iw
        if merge_below is not None and k > 1:
            need = merge_below * den
            adj, relabel = _merge_unseparable(adj, math.ceil(need))
            label = relabel[label]
            k = adj.shape[0]
        self.groups: list[list[Coord]] = [[] for _ in range(k)]
        for v, lab in zip(verts, label.tolist()):
            self.groups[lab].append(v)
        self.adj = adj
        self.k = k
        self.order = _search_order(adj)

    def side_of(self, mask: int) -> tuple[frozenset, frozenset]:
        a, b = [], []
        for i, grp in enumerate(self.groups):
            (b if (mask >> i) & 1 else a).extend(grp)
        return frozenset(a), frozenset(b)


def _merge_unseparable(adj: np.ndarray, thr: int) -> tuple[np.ndarray, np.ndarray]:
    """Merge node pairs that every cut below ``thr`` must keep together.

    A cut separating u and v weighs at least (positive u-v flow) + (sum of all
    negative edges). The flow is bounded below by the direct edge plus one
    two-hop path through each common neighbour, which are edge-disjoint.
    Returns the reduced matrix and the old-to-new node relabeling.
    """
    k = adj.shape[0]
    relabel = np.arange(k, dtype=np.int64)
    while adj.shape[0] > 1:
        n = adj.shape[0]
        neg = int(adj[adj < 0].sum()) // 2
        pos = np.maximum(adj, 0)
        lb = pos + np.minimum(pos[:, :, None], pos[None, :, :]).sum(axis=1)
        hit = np.argwhere(np.triu(lb + neg >= thr, 1) & (pos > 0))
        if hit.size == 0:
            break
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in hit.tolist():
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
        roots = sorted({find(i) for i in range(n)})
        new = {r: t for t, r in enumerate(roots)}
        step = np.asarray([new[find(i)] for i in range(n)], dtype=np.int64)
        m = len(roots)
        red = np.zeros((m, m), dtype=np.int64)
        np.add.at(red, (step[:, None], step[None, :]), adj)
        np.fill_diagonal(red, 0)
        adj = red
        relabel = step[relabel]
    return adj, relabel


def _search_order(adj: np.ndarray) -> np.ndarray:
    """Endpoints of negative edges first, then breadth-first by edge weight.

    Deciding negative edges early tightens the branch-and-bound tail bound.
    """
    k = adj.shape[0]
    if k == 0:
        return np.zeros(0, dtype=np.int64)
    seen = [False] * k
    order = []
    neg = sorted({int(i) for i in np.nonzero((adj < 0).any(axis=1))[0]})
    deg = (adj != 0).sum(axis=1)
    queue = []
    for i in neg:
        seen[i] = True
        queue.append(i)
    while len(order) < k:
        if not queue:
            start = max((i for i in range(k) if not seen[i]), key=lambda i: (deg[i], -i))
            seen[start] = True
            queue = [start]
        while queue:
            v = queue.pop(0)
            order.append(v)
            nbrs = sorted((int(i) for i in np.nonzero(adj[v])[0] if not seen[i]), key=lambda i: -abs(adj[v, i]))
            for i in nbrs:
                seen[i] = True
                queue.append(i)
    return np.asarray(order, dtype=np.int64)


def _contract(a: Assembly, merge_below: Fraction | None = None) -> _Contracted:
    c = _Contracted(a, merge_below)
    if c.k > max_cut_nodes():
        raise SizeLimitExceeded(f"cut search over {c.k} nodes exceeds bound {max_cut_nodes()}")
    return c


def min_cut_weight(a: Assembly) -> Strength:
    """Exact minimum cut over all bipartitions; ``INF`` when no finite cut exists."""
    c = _contract(a)
    if c.k < 2:
        return INF
    best = _kernels.min_cut_int(c.adj, c.order)
    return Fraction(best, c.den)


def is_stable(a: Assembly) -> bool:
    if len(a) == 1:
        return True
    if not is_connected(x for x, _ in a.cells):
        return False
    c = _contract(a, ONE)
    if c.k < 2:
        return True
    return Fraction(_kernels.min_cut_int(c.adj, c.order), c.den) >= ONE


def enumerate_cuts_below(a: Assembly, threshold: Fraction = ONE) -> list[Cut]:
    c = _contract(a, threshold)
    thr = threshold * c.den
    # keep comparisons exact: w < thr  <=>  w < ceil(thr) for integer w
    thr_int = math.ceil(thr)
    cuts = []
    for mask, w in _kernels.cuts_below_int(c.adj, c.order, thr_int):
        sa, sb = c.side_of(mask)
        cuts.append(Cut(sa, sb, Fraction(w, c.den)))
    cuts.sort(key=lambda cut: (cut.weight, sorted(cut.side_b)))
    return cuts


def enumerate_breaks(a: Assembly) -> list[tuple[Assembly, Assembly, Cut]]:
    """Every bipartition of weight < 1, as a pair of canonical pieces."""
    out = []
    for cut in enumerate_cuts_below(a, ONE):
        out.append((a.subset(cut.side_a), a.subset(cut.side_b), cut))
    return out


@lru_cache(maxsize=1 << 16)
def _exposed(a: Assembly) -> tuple[tuple[Coord, str, object], ...]:
    """Glues whose facing cell is empty, as ``(coord, face, glue)``."""
    m = a.mapping
    out = []
    for (x, y), t in a.cells:
        for face, g in t.glues():
            dx, dy = OFFSETS[face]
            if (x + dx, y + dy) not in m:
                out.append(((x, y), face, g))
    return tuple(out)


@lru_cache(maxsize=1 << 16)
def _glue_sites(a: Assembly) -> dict[str, list[tuple[Coord, str]]]:
    sites: dict[str, list[tuple[Coord, str]]] = {}
    for c, face, g in _exposed(a):
        if g.strength is INF or g.strength > 0:
            sites.setdefault(g.id, []).append((c, face))
    return sites


@lru_cache(maxsize=1 << 16)
def _facing(a: Assembly) -> dict[tuple[int, int, str], object]:
    """Exposed glues keyed by (empty position, face a newcomer there would touch)."""
    out = {}
    for (x, y), face, g in _exposed(a):
        dx, dy = OFFSETS[face]
        out[(x + dx, y + dy, OPPOSITE[face])] = g
    return out


@lru_cache(maxsize=1 << 16)
def _probes(a: Assembly) -> tuple[tuple[int, int, str, object], ...]:
    return tuple((x, y, face, g) for (x, y), face, g in _exposed(a))


def candidate_offsets(a: Assembly, b: Assembly) -> Iterator[tuple[int, int]]:
    """Translations of ``b`` that align at least one exposed positive glue pair."""
    sa = _glue_sites(a)
    sb = _glue_sites(b)
    seen = set()
    for gid in sorted(sa.keys() & sb.keys()):
        for (ax, ay), face in sa[gid]:
            dx, dy = OFFSETS[face]
            tx, ty = ax + dx, ay + dy
            for (bx, by), bface in sb[gid]:
                if bface != OPPOSITE[face]:
                    continue
                off = (tx - bx, ty - by)
                if off not in seen:
                    seen.add(off)
                    yield off


def crossing_strength(a: Assembly, b: Assembly, off: tuple[int, int]) -> Strength | None:
    """Total bond strength between ``a`` and ``b`` shifted by ``off``; None on overlap."""
    ma = a.mapping
    ox, oy = off
    for (x, y), _ in b.cells:
        if (x + ox, y + oy) in ma:
            return None
    total: Strength | None = None
    fa = _facing(a)
    for x, y, face, g in _probes(b):
        h = fa.get((x + ox, y + oy, face))
        if h is not None and h.id == g.id:
            s = g.strength
            if h.strength is not s and h.strength != s:
                raise ValueError(f"glue {g.id!r} used with two strengths")
            if total is None:
                total = s
            else:
                total = INF if (s is INF or total is INF) else total + s
    return Fraction(0) if total is None else total


def enumerate_combinations(a: Assembly, b: Assembly) -> list[tuple[Assembly, Cut]]:
    """Every non-overlapping union of ``a`` and a translate of ``b`` binding with strength >= 1."""
    out = []
    seen = set()
    for off in candidate_offsets(a, b):
        w = crossing_strength(a, b, off)
        # w < 1, without the generic Fraction comparison
        if w is None or (w is not INF and w.numerator < w.denominator):
            continue
        cells = dict(a.cells)
        side_b = []
        for (x, y), t in b.cells:
            p = (x + off[0], y + off[1])
            cells[p] = t
            side_b.append(p)
        # canonical shift so cut sides refer to the result's coordinates
        mx = min(x for x, _ in cells)
        my = min(y for _, y in cells)
        c = Assembly(cells)
        if c in seen:
            continue
        seen.add(c)
        sb = frozenset((x - mx, y - my) for x, y in side_b)
        sa = frozenset(p for p, _ in c.cells) - sb
        out.append((c, Cut(sa, sb, w)))
    return out
