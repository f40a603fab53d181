"""Tiles, glues and translation-canonical assemblies.

All strengths are exact: :class:`fractions.Fraction` or the singleton :data:`INF`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

# Face order used everywhere: north, east, south, west.
FACES = ("n", "e", "s", "w")
OFFSETS = {"n": (0, 1), "e": (1, 0), "s": (0, -1), "w": (-1, 0)}
OPPOSITE = {"n": "s", "e": "w", "s": "n", "w": "e"}


class _Infinite:
    """Strength larger than every rational. Addition saturates."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __str__(self) -> str:
        return "inf"

    def __reduce__(self):
        return (_Infinite, ())

    def __hash__(self) -> int:
        return hash("negasm.INF")

    def __eq__(self, other) -> bool:
        return other is self

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return other is self

    def __gt__(self, other) -> bool:
        return other is not self

    def __ge__(self, other) -> bool:
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __neg__(self):
        raise ArithmeticError("negative infinite strength is not part of the model")


INF = _Infinite()
Strength = Union[Fraction, _Infinite]


def parse_strength(value) -> Strength:
    """Accept ``"p/q"``, ``"inf"``, ints or Fractions. Floats are rejected."""
    if value is INF:
        return INF
    if isinstance(value, float):
        raise TypeError("floating point strengths are not allowed")
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinite", "∞"):
        return INF
    return Fraction(value)


def format_strength(s: Strength) -> str:
    if s is INF:
        return "inf"
    s = Fraction(s)
    return f"{s.numerator}/{s.denominator}"


def add_strength(a: Strength, b: Strength) -> Strength:
    if a is INF or b is INF:
        return INF
    return a + b


@dataclass(frozen=True, order=True)
class Glue:
    id: str
    strength: Strength

    def __post_init__(self):
        object.__setattr__(self, "strength", parse_strength(self.strength))


@dataclass(frozen=True)
class Tile:
    """A unit square: one optional glue per face plus an optional label."""

    n: Glue | None = None
    e: Glue | None = None
    s: Glue | None = None
    w: Glue | None = None
    label: str | None = None
    name: str | None = None

    def glue(self, face: str) -> Glue | None:
        return getattr(self, face)

    def glues(self) -> Iterator[tuple[str, Glue]]:
        for f in FACES:
            g = getattr(self, f)
            if g is not None:
                yield f, g

    def sort_key(self) -> tuple:
        return (
            self.name or "",
            self.label or "",
            tuple(("", "") if g is None else (g.id, format_strength(g.strength)) for g in (self.n, self.e, self.s, self.w)),
        )


def bond_strength(t1: Tile, face: str, t2: Tile) -> Strength:
    """Strength between ``t1`` and ``t2`` where ``t2`` sits on ``face`` of ``t1``.

    Only identical glue types interact; mismatched glues contribute zero.
    """
    g1 = t1.glue(face)
    g2 = t2.glue(OPPOSITE[face])
    if g1 is None or g2 is None or g1.id != g2.id:
        return Fraction(0)
    if g1.strength != g2.strength:
        raise ValueError(f"glue {g1.id!r} used with two strengths")
    return g1.strength


Coord = tuple[int, int]


class Assembly:
    """Immutable set of tiles at distinct integer coordinates.

    Instances built through :meth:`from_placements` are canonical: translated so
    the minimum x and minimum y are both zero.
    """

    __slots__ = ("_cells", "_hash", "_index")

    def __init__(self, cells: Mapping[Coord, Tile] | Iterable[tuple[Coord, Tile]], *, canonical: bool = True):
        items = list(cells.items()) if isinstance(cells, Mapping) else list(cells)
        if not items:
            raise ValueError("an assembly needs at least one tile")
        coords = [c for c, _ in items]
        if len(set(coords)) != len(coords):
            raise ValueError("two tiles share a coordinate")
        if canonical:
            mx = min(x for x, _ in coords)
            my = min(y for _, y in coords)
            items = [((x - mx, y - my), t) for (x, y), t in items]
        items.sort(key=lambda it: it[0])
        self._cells: tuple[tuple[Coord, Tile], ...] = tuple(items)
        self._hash = hash(self._cells)
        self._index = None

    @classmethod
    def single(cls, tile: Tile) -> "Assembly":
        return cls([((0, 0), tile)])

    @property
    def cells(self) -> tuple[tuple[Coord, Tile], ...]:
        return self._cells

    @property
    def mapping(self) -> dict[Coord, Tile]:
        if self._index is None:
            self._index = dict(self._cells)
        return self._index

    @property
    def canonical(self) -> bool:
        return min(x for (x, _), _ in self._cells) == 0 and min(y for (_, y), _ in self._cells) == 0

    def __len__(self) -> int:
        return len(self._cells)

    def __iter__(self):
        return iter(self._cells)

    def __contains__(self, coord) -> bool:
        return coord in self.mapping

    def __getitem__(self, coord: Coord) -> Tile:
        return self.mapping[coord]

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return isinstance(other, Assembly) and self._hash == other._hash and self._cells == other._cells

    def __repr__(self) -> str:
        names = ",".join(f"{t.name or '?'}@{x},{y}" for (x, y), t in self._cells)
        return f"Assembly({names})"

    def translated(self, dx: int, dy: int) -> "Assembly":
        return Assembly([((x + dx, y + dy), t) for (x, y), t in self._cells], canonical=False)

    def subset(self, coords: Iterable[Coord]) -> "Assembly":
        m = self.mapping
        return Assembly([(c, m[c]) for c in coords])

    def labels(self) -> set[str]:
        return {t.label for _, t in self._cells if t.label is not None}

    def has_label(self, label: str) -> bool:
        return any(t.label == label for _, t in self._cells)

    def sort_key(self) -> tuple:
        return tuple((c, t.sort_key()) for c, t in self._cells)

    def bbox(self) -> tuple[int, int, int, int]:
        xs = [x for (x, _), _ in self._cells]
        ys = [y for (_, y), _ in self._cells]
        return min(xs), min(ys), max(xs), max(ys)


def canonicalize(a: Assembly) -> Assembly:
    if a.canonical:
        return a
    return Assembly(a.cells)


def union(a: Assembly, b: Assembly, dx: int = 0, dy: int = 0) -> Assembly:
    """Union of ``a`` with ``b`` translated by (dx, dy), canonicalized."""
    cells = dict(a.cells)
    for (x, y), t in b.cells:
        c = (x + dx, y + dy)
        if c in cells:
            raise ValueError(f"overlap at {c}")
        cells[c] = t
    return Assembly(cells)


def is_connected(coords: Iterable[Coord]) -> bool:
    """Edge-connectivity of a set of grid cells."""
    coords = set(coords)
    if not coords:
        return False
    start = next(iter(coords))
    seen = {start}
    stack = [start]
    while stack:
        x, y = stack.pop()
        for dx, dy in OFFSETS.values():
            c = (x + dx, y + dy)
            if c in coords and c not in seen:
                seen.add(c)
                stack.append(c)
    return len(seen) == len(coords)
