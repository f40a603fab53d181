"""Compile a directed graph into an assembly set that walks it.

Layout (x to the right, y up; the cell assembly sits at the origin)::

    y=2  P2  T0  TL  TR  T3  T4      gadget tiles T*, edge (u, v)
    y=1  P1  D   L   R   A   Z       vertex slot + helpers
    y=0  P0  B1  B2  B3  B4  B5      cell backbone, label ``cell``

``L``/``R`` are the vertex pair, ``D`` the vertex detachment tile, ``A`` the
vertex attached tile and ``Z`` the edge detachment tile. Strengths are in
eighths; see :data:`STRENGTHS`. The per-transition event order is the one in
:func:`transition_stages`.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .dynamics import AssemblySystem, Bounds
from .model import INF, Assembly, Glue, Tile

FOCUS = "cell"

# Glue strengths in eighths.
STRENGTHS = {
    "g": 6,       # gadget T0 to pillar
    "grip": 4,    # detachment tile D to pillar
    "n5": -5,     # edge detachment tile Z to backbone
    "c": 7,       # left vertex tile to backbone
    "d": 5,       # right vertex tile to backbone
    "prime": -3,  # D to left vertex tile (same vertex only)
    "a": 3,       # left-right vertex bond
    "dot": 1,     # gadget to target's left tile
    "star": 2,    # gadget to source's right tile
    "plus": 1,    # right tile to attached tile A
    "att": 7,     # A to gadget
    "dg": 7,      # D to gadget
    "y": 2,       # A to Z
    "z": 12,      # Z to gadget
}

# Slot coordinates relative to the cell.
POS = {
    "P0": (0, 0), "P1": (0, 1), "P2": (0, 2),
    "B1": (1, 0), "B2": (2, 0), "B3": (3, 0), "B4": (4, 0), "B5": (5, 0),
    "D": (1, 1), "L": (2, 1), "R": (3, 1), "A": (4, 1), "Z": (5, 1),
    "T0": (1, 2), "TL": (2, 2), "TR": (3, 2), "T3": (4, 2), "T4": (5, 2),
}
CELL_SLOTS = ("P0", "P1", "P2", "B1", "B2", "B3", "B4", "B5")
GADGET_SLOTS = ("T0", "TL", "TR", "T3", "T4")


class GraphSpecError(ValueError):
    pass


class EmptyGraph(GraphSpecError):
    pass


class StartMissing(GraphSpecError):
    pass


class EdgeMissing(GraphSpecError):
    pass


class UnsupportedEdge(GraphSpecError):
    pass


@dataclass(frozen=True)
class DirectedGraphSpec:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    start: str

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(str(v) for v in self.vertices))
        object.__setattr__(self, "edges", tuple((str(u), str(v)) for u, v in self.edges))
        object.__setattr__(self, "start", str(self.start))
        if not self.vertices:
            raise EmptyGraph("graph has no vertices")
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphSpecError("duplicate vertex names")
        vs = set(self.vertices)
        if self.start not in vs:
            raise StartMissing(f"start vertex {self.start!r} is not a vertex")
        for u, v in self.edges:
            if u not in vs or v not in vs:
                raise GraphSpecError(f"edge ({u!r}, {v!r}) references an unknown vertex")
        if len(set(self.edges)) != len(self.edges):
            raise GraphSpecError("duplicate edges")
        for v in self.vertices:
            if not re.fullmatch(r"[A-Za-z0-9_.+-]+", v):
                raise GraphSpecError(f"vertex name {v!r} must match [A-Za-z0-9_.+-]+")

    def out(self, u: str) -> list[str]:
        return [b for a, b in self.edges if a == u]

    def to_dict(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.edges], "start": self.start}

    @classmethod
    def from_dict(cls, d: dict) -> "DirectedGraphSpec":
        try:
            return cls(tuple(d["vertices"]), tuple(tuple(e) for e in d.get("edges", [])), d["start"])
        except KeyError as exc:
            raise GraphSpecError(f"missing field {exc.args[0]!r}") from None

    @classmethod
    def parse_text(cls, text: str) -> "DirectedGraphSpec":
        """One edge per line as ``u -> v``; ``start: s`` and bare vertex lines allowed.

        Without a ``start`` line the first vertex mentioned is the start.
        """
        vertices: list[str] = []
        edges: list[tuple[str, str]] = []
        start = None

        def see(v):
            if v not in vertices:
                vertices.append(v)

        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            m = re.fullmatch(r"start\s*:\s*(\S+)", line)
            if m:
                start = m.group(1)
                continue
            m = re.fullmatch(r"(\S+)\s*->\s*(\S+)", line)
            if m:
                see(m.group(1))
                see(m.group(2))
                edges.append((m.group(1), m.group(2)))
                continue
            if re.fullmatch(r"\S+", line):
                see(line)
                continue
            raise GraphSpecError(f"line {n}: cannot parse {raw!r}")
        if not vertices:
            raise EmptyGraph("graph has no vertices")
        return cls(tuple(vertices), tuple(edges), start if start is not None else vertices[0])

    @classmethod
    def load(cls, path) -> "DirectedGraphSpec":
        text = Path(path).read_text()
        if text.lstrip().startswith("{"):
            return cls.from_dict(json.loads(text))
        return cls.parse_text(text)


def quaternary_oscillator() -> DirectedGraphSpec:
    return DirectedGraphSpec(("0", "1", "2", "3"), (("0", "1"), ("1", "2"), ("2", "3"), ("3", "0")), "0")


# --- tiles -----------------------------------------------------------------------------

def _g(gid: str, kind: str) -> Glue:
    return Glue(gid, Fraction(STRENGTHS[kind], 8))


def _inf(gid: str) -> Glue:
    return Glue(gid, INF)


def cell_tiles() -> dict[str, Tile]:
    t = {
        "P0": Tile(n=_inf("cell#p01"), e=_inf("cell#b01")),
        "P1": Tile(s=_inf("cell#p01"), n=_inf("cell#p12"), e=_g("grip", "grip")),
        "P2": Tile(s=_inf("cell#p12"), e=_g("g", "g")),
        "B1": Tile(w=_inf("cell#b01"), e=_inf("cell#b12")),
        "B2": Tile(w=_inf("cell#b12"), e=_inf("cell#b23"), n=_g("c", "c")),
        "B3": Tile(w=_inf("cell#b23"), e=_inf("cell#b34"), n=_g("d", "d")),
        "B4": Tile(w=_inf("cell#b34"), e=_inf("cell#b45")),
        "B5": Tile(w=_inf("cell#b45"), n=_g("n5", "n5")),
    }
    return {k: Tile(v.n, v.e, v.s, v.w, label=FOCUS, name=f"cell:{k}") for k, v in t.items()}


def _vid(v: str, kind: str) -> str:
    return f"v:{v}:{kind}"


def vertex_tiles(v: str) -> dict[str, Tile]:
    """The four tiles representing vertex ``v``: pair L/R, detachment D, attached A."""
    return {
        "L": Tile(s=_g("c", "c"), e=_g(_vid(v, "a"), "a"), w=_g(_vid(v, "prime"), "prime"), n=_g(_vid(v, "dot"), "dot"),
                  name=f"L[{v}]"),
        "R": Tile(s=_g("d", "d"), w=_g(_vid(v, "a"), "a"), n=_g(_vid(v, "star"), "star"),
                  e=_g(_vid(v, "plus"), "plus"), name=f"R[{v}]"),
        "D": Tile(w=_g("grip", "grip"), e=_g(_vid(v, "prime"), "prime"), n=_g(_vid(v, "dg"), "dg"), name=f"D[{v}]"),
        "A": Tile(w=_g(_vid(v, "plus"), "plus"), n=_g(_vid(v, "att"), "att"), e=_g(_vid(v, "y"), "y"),
                  name=f"A[{v}]"),
    }


def _eid(u: str, v: str) -> str:
    return f"e:{u}>{v}"


def gadget_tiles(u: str, v: str) -> dict[str, Tile]:
    """Edge gadget for (u, v) plus its edge detachment tile ``Z``."""
    e = _eid(u, v)
    i = [_inf(f"{e}#{k}") for k in range(4)]
    return {
        "T0": Tile(w=_g("g", "g"), s=_g(_vid(u, "dg"), "dg"), e=i[0], name=f"G[{u}>{v}]0"),
        "TL": Tile(w=i[0], e=i[1], s=_g(_vid(v, "dot"), "dot"), name=f"G[{u}>{v}]1"),
        "TR": Tile(w=i[1], e=i[2], s=_g(_vid(u, "star"), "star"), name=f"G[{u}>{v}]2"),
        "T3": Tile(w=i[2], e=i[3], s=_g(_vid(v, "att"), "att"), name=f"G[{u}>{v}]3"),
        "T4": Tile(w=i[3], s=_g(f"{e}:z", "z"), name=f"G[{u}>{v}]4"),
        "Z": Tile(w=_g(_vid(v, "y"), "y"), s=_g("n5", "n5"), n=_g(f"{e}:z", "z"), name=f"Z[{u}>{v}]"),
    }


def _place(parts: dict[str, Tile]) -> Assembly:
    return Assembly([(POS[k], t) for k, t in parts.items()])


def cell_with(v: str) -> Assembly:
    vt = vertex_tiles(v)
    return _place({**cell_tiles(), "L": vt["L"], "R": vt["R"]})


def gadget_assembly(u: str, v: str) -> Assembly:
    gt = gadget_tiles(u, v)
    return _place({k: gt[k] for k in GADGET_SLOTS})


# --- compilation -----------------------------------------------------------------------

@dataclass
class GraphCompilation:
    graph: DirectedGraphSpec
    system: AssemblySystem
    counts: dict = field(default_factory=dict)


def compile_graph(g: DirectedGraphSpec, bounds: Bounds | None = None) -> AssemblySystem:
    """Initial set: the cell holding the start vertex, every vertex's four singleton
    tiles, and per edge a gadget plus its edge detachment tile."""
    for u, v in g.edges:
        if u == v:
            raise UnsupportedEdge(f"self-loop ({u}, {v}) is not supported")
    initial = [cell_with(g.start)]
    for v in g.vertices:
        initial += [Assembly.single(t) for t in vertex_tiles(v).values()]
    for u, v in g.edges:
        gt = gadget_tiles(u, v)
        initial.append(gadget_assembly(u, v))
        initial.append(Assembly.single(gt["Z"]))
    meta = {"kind": "graph", "graph": g.to_dict(),
            "counts": {"cell": 1, "vertex_sets": len(g.vertices), "vertex_tiles": 4 * len(g.vertices),
                       "edge_gadgets": len(g.edges), "edge_detach_tiles": len(g.edges),
                       "assemblies": len(initial)}}
    return AssemblySystem(initial, bounds or Bounds(), focus_label=FOCUS, meta=meta)


def status_map(a: Assembly):
    """Vertex held by the cell, or None unless ``a`` is exactly cell + one complete pair."""
    if len(a) != len(CELL_SLOTS) + 2:
        return None
    m = a.mapping
    for k in CELL_SLOTS:
        t = m.get(POS[k])
        if t is None or t.name != f"cell:{k}":
            return None
    lt, rt = m.get(POS["L"]), m.get(POS["R"])
    if lt is None or rt is None or not (lt.name or "").startswith("L[") or not (rt.name or "").startswith("R["):
        return None
    v = lt.name[2:-1]
    if rt.name != f"R[{v}]":
        return None
    return v


# --- stage templates -------------------------------------------------------------------

STAGE_NAMES = (
    "cell holds u",
    "gadget attached",
    "detachment tile attached",
    "left u tile detached",
    "right u tile detached",
    "left v tile attached",
    "right v tile attached",
    "attached tile placed",
    "edge detachment tile placed",
    "cell holds v",
)
VERTEX_REMOVAL_STAGE = 3
GADGET_REMOVAL_STAGE = 9
FUEL_PER_TRANSITION = 10


def transition_stages(u: str, v: str, g: DirectedGraphSpec | None = None) -> list[Assembly]:
    """Canonical stage assemblies (1-based in :data:`STAGE_NAMES`) of the u -> v transition."""
    if g is not None and (u, v) not in g.edges:
        raise EdgeMissing(f"edge ({u}, {v}) not in graph")
    if u == v:
        raise UnsupportedEdge("self-loops are not supported")
    cell = cell_tiles()
    vu, vv = vertex_tiles(u), vertex_tiles(v)
    gt = gadget_tiles(u, v)
    gad = {k: gt[k] for k in GADGET_SLOTS}
    s = []
    cur = {**cell, "L": vu["L"], "R": vu["R"]}
    s.append(dict(cur))
    cur.update(gad)
    s.append(dict(cur))
    cur["D"] = vu["D"]
    s.append(dict(cur))
    del cur["L"]
    s.append(dict(cur))
    del cur["R"]
    s.append(dict(cur))
    cur["L"] = vv["L"]
    s.append(dict(cur))
    cur["R"] = vv["R"]
    s.append(dict(cur))
    cur["A"] = vv["A"]
    s.append(dict(cur))
    cur["Z"] = gt["Z"]
    s.append(dict(cur))
    s.append({**cell, "L": vv["L"], "R": vv["R"]})
    return [_place(p) for p in s]


def junk_side(stage: Assembly) -> frozenset:
    """Coordinates of the non-cell-side tiles (gadget, D, A, Z) in a stage assembly."""
    names = ("T0", "TL", "TR", "T3", "T4", "D", "A", "Z")
    return frozenset(POS[k] for k in names if POS[k] in stage)


def gadget_coords() -> frozenset:
    return frozenset(POS[k] for k in GADGET_SLOTS)


def cell_coords() -> frozenset:
    return frozenset(POS[k] for k in CELL_SLOTS)
