"""Brute-force references the fast code is checked against."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction

from negasm.model import INF, OFFSETS, Assembly, Glue, Tile, bond_strength, is_connected

# the strength grid used by the random tests: -1, -7/8, ..., 9/8
STRENGTHS = [Fraction(k, 8) for k in range(-8, 10)]


def random_assembly(rng: random.Random, n: int, *, n_ids: int = 4, p_glue: float = 0.7,
                    p_inf: float = 0.1) -> Assembly:
    """Connected polyomino of ``n`` tiles; each glue id gets one strength."""
    cells = {(0, 0)}
    while len(cells) < n:
        x, y = rng.choice(sorted(cells))
        dx, dy = rng.choice(list(OFFSETS.values()))
        cells.add((x + dx, y + dy))
    ids = [f"g{i}" for i in range(n_ids)]
    strength = {g: INF if rng.random() < p_inf else rng.choice(STRENGTHS) for g in ids}
    tiles = {}
    for i, c in enumerate(sorted(cells)):
        glues = {}
        for face in "nesw":
            if rng.random() < p_glue:
                g = rng.choice(ids)
                glues[face] = Glue(g, strength[g])
        tiles[c] = Tile(name=f"t{i}", **glues)
    return Assembly(tiles)


def split(rng: random.Random, a: Assembly) -> tuple[Assembly, Assembly] | None:
    """Two connected halves of ``a``, or None if the random cut disconnects one."""
    coords = [c for c, _ in a.cells]
    if len(coords) < 2:
        return None
    side = set(rng.sample(coords, rng.randint(1, len(coords) - 1)))
    rest = set(coords) - side
    if not (is_connected(side) and is_connected(rest)):
        return None
    return a.subset(side), a.subset(rest)


def naive_weight(a: Assembly, side: set) -> Fraction | object:
    m = a.mapping
    total = Fraction(0)
    for (x, y), t in a.cells:
        for face in ("e", "n"):
            dx, dy = OFFSETS[face]
            c = (x + dx, y + dy)
            if c in m and (((x, y) in side) != (c in side)):
                s = bond_strength(t, face, m[c])
                if s is INF:
                    return INF
                total += s
    return total


def naive_cuts_below(a: Assembly, threshold=Fraction(1)) -> set[tuple[frozenset, Fraction]]:
    """All bipartitions below ``threshold``; the side without the first coordinate is reported."""
    coords = [c for c, _ in a.cells]
    out = set()
    for r in range(1, len(coords)):
        for side in itertools.combinations(coords[1:], r):
            w = naive_weight(a, set(side))
            if w is not INF and w < threshold:
                out.add((frozenset(side), w))
    return out


def naive_min_cut(a: Assembly):
    coords = [c for c, _ in a.cells]
    best = INF
    for r in range(1, len(coords)):
        for side in itertools.combinations(coords[1:], r):
            w = naive_weight(a, set(side))
            if w is not INF and (best is INF or w < best):
                best = w
    return best


def naive_stable(a: Assembly) -> bool:
    if len(a) == 1:
        return True
    if not is_connected(c for c, _ in a.cells):
        return False
    return not naive_cuts_below(a)


def naive_combinations(a: Assembly, b: Assembly) -> set[Assembly]:
    """Every translate of ``b`` next to ``a`` without overlap binding with strength >= 1."""
    ax = [x for (x, _), _ in a.cells]
    ay = [y for (_, y), _ in a.cells]
    bx = [x for (x, _), _ in b.cells]
    by = [y for (_, y), _ in b.cells]
    ma = a.mapping
    out = set()
    for dx in range(min(ax) - max(bx) - 1, max(ax) - min(bx) + 2):
        for dy in range(min(ay) - max(by) - 1, max(ay) - min(by) + 2):
            moved = {(x + dx, y + dy): t for (x, y), t in b.cells}
            if moved.keys() & ma.keys():
                continue
            total = Fraction(0)
            for (x, y), t in moved.items():
                for face, (ox, oy) in OFFSETS.items():
                    other = ma.get((x + ox, y + oy))
                    if other is None:
                        continue
                    s = bond_strength(t, face, other)
                    total = INF if (s is INF or total is INF) else total + s
            if total is INF or total >= 1:
                out.add(Assembly({**ma, **moved}))
    return out
