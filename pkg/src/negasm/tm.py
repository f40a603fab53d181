"""Turing machines: reference semantics and compilation to a negative-glue tile system.

A status is ``(state, tape, head)`` plus ``origin``, the index in ``tape`` of the
first cell of the input tape.  Input cells are never removed; cells added by
extension are removed again once they are blank, at an edge, and at least two
cells away from the head.  The same rule drives the reduction gadgets of the compiled
system, so reference runs and projected assembly runs agree cell for cell.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from .dynamics import BREAK, AssemblySystem, BoundExhausted, Bounds, FocusedSequence, TraceEvent, run
from .model import INF, Assembly, Glue, Tile

FOCUS = "tape"
EXT_LABEL = "ext"
LEFT, RIGHT = "L", "R"


class TMError(ValueError):
    pass


class ParseError(TMError):
    pass


class UnknownSymbol(TMError):
    pass


class MultipleHeads(TMError):
    pass


class NondeterministicMachine(TMError):
    pass


# --- machine description -----------------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    state: str
    read: str
    write: str
    move: str
    next: str

    def to_list(self) -> list:
        return [self.state, self.read, self.write, self.move, self.next]


@dataclass(frozen=True)
class TMSpec:
    states: tuple[str, ...]
    tape_alphabet: tuple[str, ...]
    blank: str
    input_alphabet: tuple[str, ...]
    rules: tuple[Rule, ...]
    start: str
    finals: tuple[str, ...] = ()
    tape: tuple[str, ...] = ()
    head: int = 0

    def __post_init__(self):
        for name in ("states", "tape_alphabet", "input_alphabet", "finals", "tape"):
            object.__setattr__(self, name, tuple(str(x) for x in getattr(self, name)))
        object.__setattr__(self, "rules", tuple(r if isinstance(r, Rule) else Rule(*map(str, r))
                                                for r in self.rules))
        if not self.tape:
            object.__setattr__(self, "tape", (self.blank,))
        self.validate()

    def validate(self):
        q, g = set(self.states), set(self.tape_alphabet)
        if len(q) != len(self.states) or len(g) != len(self.tape_alphabet):
            raise ParseError("duplicate states or symbols")
        if self.blank not in g:
            raise UnknownSymbol(f"blank {self.blank!r} is not in the tape alphabet")
        if self.start not in q:
            raise ParseError(f"start state {self.start!r} is not a state")
        for s in self.input_alphabet:
            if s not in g:
                raise UnknownSymbol(f"input symbol {s!r} is not in the tape alphabet")
        for f in self.finals:
            if f not in q:
                raise ParseError(f"final state {f!r} is not a state")
        for s in self.tape:
            if s not in g:
                raise UnknownSymbol(f"tape symbol {s!r} is not in the tape alphabet")
            if s != self.blank and s not in self.input_alphabet:
                raise UnknownSymbol(f"tape symbol {s!r} is not an input symbol")
        if not 0 <= self.head < len(self.tape):
            raise ParseError(f"head {self.head} outside tape of length {len(self.tape)}")
        seen = {}
        for r in self.rules:
            if r.state not in q or r.next not in q:
                raise ParseError(f"rule {r.to_list()} uses an unknown state")
            if r.read not in g or r.write not in g:
                raise UnknownSymbol(f"rule {r.to_list()} uses an unknown symbol")
            if r.move not in (LEFT, RIGHT):
                raise ParseError(f"rule {r.to_list()} must move L or R")
            key = (r.state, r.read)
            if key in seen and seen[key] != r:
                raise NondeterministicMachine(f"two rules for state {r.state!r} reading {r.read!r}")
            seen[key] = r
        if len(set(self.rules)) != len(self.rules):
            raise ParseError("duplicate rules")

    @property
    def delta(self) -> dict[tuple[str, str], Rule]:
        return {(r.state, r.read): r for r in self.rules}

    def to_dict(self) -> dict:
        return {"states": list(self.states), "tape_alphabet": list(self.tape_alphabet),
                "blank": self.blank, "input_alphabet": list(self.input_alphabet),
                "rules": [r.to_list() for r in self.rules], "start": self.start,
                "finals": list(self.finals), "tape": list(self.tape), "head": self.head}

    @classmethod
    def from_dict(cls, d: dict) -> "TMSpec":
        try:
            tape = d.get("tape", [])
            if isinstance(tape, str):
                tape = list(tape)
            rules = []
            for r in d.get("rules", []):
                if len(r) != 5:
                    raise ParseError(f"rule {r!r} must have 5 entries")
                rules.append(Rule(*map(str, r)))
            return cls(tuple(d["states"]), tuple(d["tape_alphabet"]), str(d["blank"]),
                       tuple(d.get("input_alphabet", [])), tuple(rules), str(d["start"]),
                       tuple(d.get("finals", [])), tuple(tape), int(d.get("head", 0)))
        except KeyError as exc:
            raise ParseError(f"missing field {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            if isinstance(exc, TMError):
                raise
            raise ParseError(str(exc)) from None

    @classmethod
    def load(cls, path) -> "TMSpec":
        try:
            d = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
        if not isinstance(d, dict):
            raise ParseError("machine description must be a JSON object")
        return cls.from_dict(d)

    def with_tape(self, tape, head: int = 0) -> "TMSpec":
        return TMSpec(self.states, self.tape_alphabet, self.blank, self.input_alphabet, self.rules,
                      self.start, self.finals, tuple(tape), head)


@dataclass(frozen=True)
class Status:
    state: str
    tape: tuple[str, ...]
    head: int
    origin: int = 0

    def __post_init__(self):
        object.__setattr__(self, "tape", tuple(self.tape))
        if not 0 <= self.head < len(self.tape):
            raise ValueError(f"head {self.head} outside tape of length {len(self.tape)}")

    def __str__(self):
        cells = [f"[{s}]" if i == self.head else s for i, s in enumerate(self.tape)]
        return f"{self.state}: {' '.join(cells)}"

    def to_json(self) -> dict:
        return {"state": self.state, "tape": list(self.tape), "head": self.head, "origin": self.origin}

    @classmethod
    def from_json(cls, d: dict) -> "Status":
        return cls(d["state"], tuple(d["tape"]), int(d["head"]), int(d.get("origin", 0)))

    def key(self) -> str:
        """A name usable as a graph vertex."""
        body = ".".join(f"{'h' if i == self.head else ''}{_safe(s)}" for i, s in enumerate(self.tape))
        return f"{_safe(self.state)}-{self.origin}-{body}"


def _safe(s: str) -> str:
    return "".join(c if c.isalnum() or c == "_" else f"_{ord(c):x}" for c in s)


# --- example machines ------------------------------------------------------------------------

def unary_increment(n: int = 2) -> TMSpec:
    """Walk right over ``n`` ones, write one more and halt."""
    return TMSpec(("q0", "halt"), ("1", "b"), "b", ("1",),
                  (Rule("q0", "1", "1", RIGHT, "q0"), Rule("q0", "b", "1", LEFT, "halt")),
                  "q0", ("halt",), ("1",) * n, 0)


def bouncer(n: int = 2) -> TMSpec:
    """Runs forever over ``n`` ones: marks the blank past each end with ``x`` and
    erases it again, so the tape grows and shrinks on both sides."""
    rules = [("a", "1", "1", RIGHT, "a"), ("a", "b", "x", LEFT, "e"), ("e", "1", "1", RIGHT, "g"),
             ("g", "x", "b", LEFT, "h"), ("h", "1", "1", LEFT, "h"), ("h", "b", "x", RIGHT, "i"),
             ("i", "1", "1", LEFT, "j"), ("j", "x", "b", RIGHT, "a")]
    return TMSpec(("a", "e", "g", "h", "i", "j"), ("1", "x", "b"), "b", ("1",),
                  tuple(Rule(*r) for r in rules), "a", (), ("1",) * n, 0)


def copy_then_blank(n: int = 4) -> TMSpec:
    """Copies ``n`` ones past the right end as ``x`` marks, then erases the copy from
    the right and halts back on the input.  The tape grows by ``n`` cells and shrinks
    again."""
    rules = [("m", "1", "y", RIGHT, "go"), ("m", "x", "x", RIGHT, "gr"),
             ("go", "1", "1", RIGHT, "go"), ("go", "x", "x", RIGHT, "go"), ("go", "b", "x", LEFT, "back"),
             ("back", "x", "x", LEFT, "back"), ("back", "1", "1", LEFT, "back"), ("back", "y", "y", RIGHT, "m"),
             ("gr", "x", "x", RIGHT, "gr"), ("gr", "b", "b", LEFT, "er"),
             ("er", "x", "b", LEFT, "er"), ("er", "y", "1", LEFT, "un"),
             ("un", "y", "1", LEFT, "un"), ("un", "b", "b", RIGHT, "halt")]
    return TMSpec(("m", "go", "back", "gr", "er", "un", "halt"), ("1", "y", "x", "b"), "b", ("1",),
                  tuple(Rule(*r) for r in rules), "m", ("halt",), ("1",) * n, 0)


EXAMPLES = {"unary_increment": unary_increment, "bouncer": bouncer, "copy_then_blank": copy_then_blank}


# --- reference semantics -------------------------------------------------------------------

class Semantics:
    """Step function and tape normalization shared by the oracle and the decoder."""

    def __init__(self, m: TMSpec):
        self.m = m
        self.delta = m.delta
        self.n_input = len(m.tape)

    def rule(self, st: Status) -> Rule | None:
        return self.delta.get((st.state, st.tape[st.head]))

    def is_input(self, st: Status, k: int) -> bool:
        return st.origin <= k < st.origin + self.n_input

    def pending_extension(self, st: Status) -> str | None:
        r = self.rule(st)
        if r is None:
            return None
        if r.move == RIGHT and st.head == len(st.tape) - 1:
            return RIGHT
        if r.move == LEFT and st.head == 0:
            return LEFT
        return None

    def _clippable(self, st: Status, k: int) -> bool:
        # the reduction gadget needs a stateless neighbour, so the head must be two cells away
        return not self.is_input(st, k) and st.tape[k] == self.m.blank and abs(k - st.head) >= 2

    def strip(self, st: Status) -> Status:
        while len(st.tape) > 1:
            if self._clippable(st, len(st.tape) - 1):
                st = Status(st.state, st.tape[:-1], st.head, st.origin)
            elif self._clippable(st, 0):
                st = Status(st.state, st.tape[1:], st.head - 1, st.origin - 1)
            else:
                break
        return st

    def extend(self, st: Status) -> Status:
        side = self.pending_extension(st)
        b = self.m.blank
        if side == RIGHT:
            return Status(st.state, st.tape + (b,), st.head, st.origin)
        if side == LEFT:
            return Status(st.state, (b,) + st.tape, st.head + 1, st.origin + 1)
        return st

    def normalize(self, st: Status) -> Status:
        return self.extend(self.strip(st))

    def start(self) -> Status:
        return self.normalize(Status(self.m.start, self.m.tape, self.m.head, 0))

    def step(self, st: Status) -> Status | None:
        r = self.rule(st)
        if r is None:
            return None
        tape = list(st.tape)
        tape[st.head] = r.write
        head = st.head + (1 if r.move == RIGHT else -1)
        return self.normalize(Status(r.next, tuple(tape), head, st.origin))


def start_status(m: TMSpec) -> Status:
    return Semantics(m).start()


def reference_tm_run(m: TMSpec, steps: int) -> list[Status]:
    """Statuses visited by ``m`` in at most ``steps`` steps, starting with the start status."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    sem = Semantics(m)
    out = [sem.start()]
    for _ in range(steps):
        nxt = sem.step(out[-1])
        if nxt is None:
            break
        out.append(nxt)
    return out


@dataclass(frozen=True)
class ConfigurationGraph:
    """A bounded slice of the status graph.  Vertices are ``Status`` values."""
    vertices: tuple[Status, ...]
    edges: tuple[tuple[Status, Status], ...]
    start: Status
    complete: bool = True

    def out(self, u: Status) -> list[Status]:
        return [b for a, b in self.edges if a == u]

    def to_spec(self):
        from .graphwalk import DirectedGraphSpec
        return DirectedGraphSpec(tuple(v.key() for v in self.vertices),
                                 tuple((a.key(), b.key()) for a, b in self.edges), self.start.key())

    def to_dict(self) -> dict:
        return {"vertices": [v.to_json() for v in self.vertices],
                "edges": [[a.key(), b.key()] for a, b in self.edges],
                "start": self.start.key(), "complete": self.complete}


def configuration_graph(m: TMSpec, max_steps: int = 1000, max_tape: int = 10_000,
                        strict: bool = False) -> ConfigurationGraph:
    """Statuses reachable from the start within ``max_steps`` steps and ``max_tape`` cells."""
    sem = Semantics(m)
    s0 = sem.start()
    seen = {s0: 0}
    order = [s0]
    edges = []
    complete = True
    q = deque([s0])
    while q:
        u = q.popleft()
        v = sem.step(u)
        if v is None:
            continue
        if seen[u] >= max_steps or len(v.tape) > max_tape:
            complete = False
            continue
        edges.append((u, v))
        if v not in seen:
            seen[v] = seen[u] + 1
            order.append(v)
            q.append(v)
    g = ConfigurationGraph(tuple(order), tuple(edges), s0, complete)
    if strict and not complete:
        raise BoundExhausted("configuration graph bounds exhausted")
    return g


# --- tile geometry ---------------------------------------------------------------------------
#
# Cell k spans x = 7k .. 7k+6.  Rows, relative to the cell:
#
#   y=2  gadget row (transition, extension and reduction gadgets)
#   y=1  T   D   P   Q   A   Z   G      pair P/Q, detachment D and Z, attached A
#   y=0  F0  F1  F2  F3  F4  F5  F6     floor, INF inside a cell
#   y=-1                         Bl Br  bridge under each junction (Bl under F6, Br under the next F0)
#
# Neighbouring floors touch with ``lk`` and are held together by the bridge.
# Strengths are in sixteenths.  Extension cells carry ``fx`` on F4 and a positive
# edge glue where the reduction trigger sits: ``fR`` on F0 of right extension
# cells, ``fLx`` on F6 of left extension cells.  Every other cell has the negative
# ``fL``/``fG`` there.

STRENGTHS = {
    "lk": 7, "br": 13, "brx": 2, "bneg": -10,
    "fL": -11, "fG": -11, "fR": 12, "fLx": 12, "fD": 9, "c": 10, "d": 6, "fx": 2, "fZ": -9,
    "a": 10, "prime": -5, "dot": 6, "star": 9, "plus": 1,
    "dg": 12, "att": 15, "y": 3, "z": 22, "zr": 15,
}
UNIT = 16
W = 7
FLOOR_GLUE = {0: "fL", 1: "fD", 2: "c", 3: "d", 5: "fZ", 6: "fG"}
SLOT = {"D": 1, "P": 2, "Q": 3, "A": 4, "Z": 5}


@lru_cache(maxsize=None)
def _g(gid: str, kind: str) -> Glue:
    return Glue(gid, Fraction(STRENGTHS[kind], UNIT))


def _glue_kind(gid: str) -> str:
    return gid.rsplit(":", 1)[-1]


def _poly(cells: dict, prefix: str, names: dict | None = None, label: str | None = None) -> Assembly:
    """Polyomino from ``{(x, y): {face: glue id}}``; neighbours get INF bonds."""
    tiles = []
    for (x, y), faces in cells.items():
        g = {f: _g(gid, _glue_kind(gid)) for f, gid in faces.items()}
        for f, (dx, dy) in (("n", (0, 1)), ("e", (1, 0)), ("s", (0, -1)), ("w", (-1, 0))):
            nb = (x + dx, y + dy)
            if nb in cells:
                assert f not in g, (prefix, (x, y), f)
                lo = min((x, y), nb)
                g[f] = Glue(f"{prefix}#{lo[0]},{lo[1]}{'h' if dy == 0 else 'v'}", INF)
        name = (names or {}).get((x, y), f"{prefix}@{x},{y}")
        tiles.append(((x, y), Tile(g.get("n"), g.get("e"), g.get("s"), g.get("w"), label=label, name=name)))
    return Assembly(tiles, canonical=False)


class Compiler:
    """Tiles and assemblies for one machine."""

    def __init__(self, m: TMSpec):
        self.m = m
        self.sem = Semantics(m)
        self.q_index = {q: i for i, q in enumerate(m.states)}
        self.s_index = {s: i for i, s in enumerate(m.tape_alphabet)}
        self.pairs = [(q, s) for q in (None, *m.states) for s in m.tape_alphabet]
        self._by_vid = {self.vid(q, s): (q, s) for q, s in self.pairs}

    # names
    def vid(self, q, s) -> str:
        return f"{'n' if q is None else 'q%d' % self.q_index[q]}.s{self.s_index[s]}"

    def vg(self, q, s, kind: str) -> str:
        return f"v{self.vid(q, s)}:{kind}"

    def pair_of(self, vid: str):
        return self._by_vid.get(vid)

    # floors, pairs, bridges
    def floor_tiles(self, x0: int, ext: str | None) -> list:
        """Floor of a cell; ``ext`` is None for input cells, else the side it was added on."""
        out = []
        for j in range(W):
            n = FLOOR_GLUE.get(j)
            if j == 4 and ext:
                n = "fx"
            if j == 0 and ext == RIGHT:
                n = "fR"
            if j == W - 1 and ext == LEFT:
                n = "fLx"
            t = Tile(n=_g(f"tm:{n}", n) if n else None,
                     e=Glue(f"tm:fl{j}", INF) if j < W - 1 else _g("tm:lk", "lk"),
                     s=_g("tm:br", "br") if j in (0, W - 1) else None,
                     w=Glue(f"tm:fl{j - 1}", INF) if j > 0 else _g("tm:lk", "lk"),
                     label=EXT_LABEL if ext else FOCUS, name=f"F{j}")
            out.append(((x0 + j, 0), t))
        return out

    def symbol_state_tiles(self, q, s) -> dict[str, Tile]:
        """The five tiles of one symbol-state set."""
        v, g = self.vid(q, s), (lambda kind: _g(self.vg(q, s, kind), kind))
        return {
            "P": Tile(n=g("dot"), e=g("a"), s=_g("tm:c", "c"), w=g("prime"), name=f"P[{v}]"),
            "Q": Tile(n=g("star"), e=g("plus"), s=_g("tm:d", "d"), w=g("a"), name=f"Q[{v}]"),
            "D": Tile(n=g("dg"), e=g("prime"), s=_g("tm:fD", "fD"), name=f"D[{v}]"),
            "Z": Tile(n=g("z"), s=_g("tm:fZ", "fZ"), w=g("y"), name=f"Z[{v}]"),
            "A": Tile(n=g("att"), e=g("y"), w=g("plus"), name=f"A[{v}]"),
        }

    def pair_tiles(self, x0: int, q, s) -> list:
        t = self.symbol_state_tiles(q, s)
        return [((x0 + SLOT["P"], 1), t["P"]), ((x0 + SLOT["Q"], 1), t["Q"])]

    def bridge(self) -> Assembly:
        return _poly({(0, 0): {"n": "tm:br", "w": "tm:brx", "s": "tm:bneg"},
                      (1, 0): {"n": "tm:br", "e": "tm:brx", "s": "tm:bneg"}},
                     "tm:bridge", {(0, 0): "Bl", (1, 0): "Br"})

    def bridge_tiles(self, xj: int) -> list:
        """Bridge under the junction between the cell ending at ``xj`` and the next."""
        return [((xj + x, y - 1), t) for (x, y), t in self.bridge().cells]

    def tape_assembly(self, st: Status) -> Assembly:
        tiles = []
        for k, sym in enumerate(st.tape):
            x0 = W * k
            ext = None if self.sem.is_input(st, k) else (LEFT if k < st.origin else RIGHT)
            tiles += self.floor_tiles(x0, ext)
            tiles += self.pair_tiles(x0, st.state if k == st.head else None, sym)
            if k:
                tiles += self.bridge_tiles(x0 - 1)
        return Assembly(tiles, canonical=False)

    # gadgets; coordinates are relative to the head cell (or, for reduction, the
    # cell next to the clipped edge cell) at x = 0..6
    def rule_id(self, r: Rule) -> int:
        return self.m.rules.index(r)

    def transition_gadget(self, r: Rule, x: str) -> Assembly:
        """Gadget for rule ``r`` when the cell the head moves onto holds ``x``."""
        ox = W if r.move == RIGHT else -W
        halves = (((r.state, r.read), (None, r.write), 0), ((None, x), (r.next, x), ox))
        cells = {}
        for src, tgt, base in halves:
            for j in range(W):
                cells[(base + j, 2)] = {}
            cells[(base + SLOT["D"], 2)]["s"] = self.vg(*src, "dg")
            cells[(base + SLOT["P"], 2)]["s"] = self.vg(*tgt, "dot")
            cells[(base + SLOT["Q"], 2)]["s"] = self.vg(*src, "star")
            cells[(base + SLOT["A"], 2)]["s"] = self.vg(*tgt, "att")
            cells[(base + SLOT["Z"], 2)]["s"] = self.vg(*tgt, "z")
        tag = f"J[{self.rule_id(r)}/{self.s_index[x]}]"
        return _poly(cells, tag, {c: f"{tag}{c[0]}" for c in cells})

    def extension_gadget(self, q: str, s: str, side: str) -> Assembly:
        """Grows the tape by a blank cell beside a head cell holding ``(q, s)`` at the ``side`` edge."""
        b = self.m.blank
        cells: dict = {}
        if side == RIGHT:
            e0, hook, row = W, 2 * W, range(3, 2 * W)
            bneg_at = (e0, -2)
        else:
            e0, hook, row = -W, -W - 1, range(-W, 4)
            bneg_at = (-1, -2)
        for x in row:
            cells[(x, 2)] = {}
        for y in range(-2, 2):
            cells[(hook, y)] = {}
        for x in range(e0, e0 + W):
            cells[(x, -2)] = {}
        cells[(hook, 2)] = {}
        cells[(SLOT["Q"], 2)]["s"] = self.vg(q, s, "star")
        cells[(e0 + SLOT["Q"], 2)]["s"] = self.vg(None, b, "star")
        cells[(hook, 0)]["w" if side == RIGHT else "e"] = "tm:lk"
        cells[bneg_at]["n"] = "tm:bneg"
        tag = f"X{side}[{self.vid(q, s)}]"
        body = _poly(cells, tag, {c: f"{tag}{c[0]},{c[1]}" for c in cells})
        tiles = list(body.cells) + self.floor_tiles(e0, side) + self.pair_tiles(e0, None, b)
        return Assembly(tiles, canonical=False)

    def reduction_gadget(self, y: str, side: str) -> Assembly:
        """Clips a blank extension cell at the ``side`` edge beside a stateless cell holding ``y``."""
        b = self.m.blank
        cells: dict = {}
        if side == RIGHT:
            e0, hook, row, bottom = W, 2 * W, range(2, 2 * W), range(W + 1, 2 * W)
            brx_at, brx_face = (W + 1, -1), "w"
        else:
            e0, hook, row, bottom = -W, -W - 1, range(-W, 3), range(-W, -1)
            brx_at, brx_face = (-2, -1), "e"
        for x in row:
            cells[(x, 2)] = {}
        for yy in range(-1, 2):
            cells[(hook, yy)] = {}
        cells[(hook, 2)] = {}
        for x in bottom:
            cells[(x, -1)] = {}
        cells[(e0 + SLOT["A"], 1)] = {"s": "tm:fx"}
        cells[(SLOT["P"], 2)]["s"] = self.vg(None, y, "dot")
        cells[(e0 + SLOT["P"], 2)]["s"] = self.vg(None, b, "dot")
        cells[brx_at][brx_face] = "tm:brx"
        cells[(W - 1 if side == RIGHT else 0, 2)]["s"] = f"tm:zr{side}:zr"
        tag = f"Y{side}[{self.s_index[y]}]"
        return _poly(cells, tag, {c: f"{tag}{c[0]},{c[1]}" for c in cells})

    def reduction_trigger(self, side: str) -> Assembly:
        if side == RIGHT:
            cells = {(6, 1): {"s": "tm:fG", "n": f"tm:zr{side}:zr"}, (7, 1): {"s": "tm:fR"}}
        else:
            cells = {(-1, 1): {"s": "tm:fLx"}, (0, 1): {"s": "tm:fL", "n": f"tm:zr{side}:zr"}}
        tag = f"K{side}"
        return _poly(cells, tag, {c: f"{tag}{c[0]}" for c in cells})

    # the initial set
    def symbol_state_sets(self) -> dict:
        return {(q, s): self.symbol_state_tiles(q, s) for q, s in self.pairs}

    def transition_gadgets(self) -> list[Assembly]:
        return [self.transition_gadget(r, x) for r in self.m.rules for x in self.m.tape_alphabet]

    def extension_gadgets(self) -> list[Assembly]:
        out = []
        for r in self.m.rules:
            out.append(self.extension_gadget(r.state, r.read, r.move))
        return out

    def reduction_gadgets(self) -> list[Assembly]:
        return [self.reduction_gadget(y, side) for side in (LEFT, RIGHT) for y in self.m.tape_alphabet]

    def initial_tape(self) -> Assembly:
        return _canon(self.tape_assembly(Status(self.m.start, self.m.tape, self.m.head, 0)))

    # decoding
    def decode(self, a: Assembly):
        """Cells ``(state, symbol, is_input)`` left to right if ``a`` is a bare tape, else None.

        A bare tape is floors, bridges under every junction and one complete pair
        per cell, with nothing else attached.
        """
        mp = a.mapping
        starts = sorted(c for c, t in a.cells if t.name == "F0")
        if not starts:
            return None
        y0 = starts[0][1]
        n = len(starts)
        if len(a) != 9 * n + 2 * (n - 1):
            return None
        x0 = starts[0][0]
        cells = []
        for k, (x, y) in enumerate(starts):
            if y != y0 or x != x0 + W * k:
                return None
            label = mp[(x, y)].label
            for j in range(1, W):
                t = mp.get((x + j, y))
                if t is None or t.name != f"F{j}" or t.label != label:
                    return None
            p, q = mp.get((x + SLOT["P"], y + 1)), mp.get((x + SLOT["Q"], y + 1))
            if p is None or q is None or not (p.name or "").startswith("P[") or q.name != "Q" + p.name[1:]:
                return None
            pair = self.pair_of(p.name[2:-1])
            if pair is None:
                return None
            if k:
                bl, br = mp.get((x - 1, y - 1)), mp.get((x, y - 1))
                if bl is None or br is None or bl.name != "Bl" or br.name != "Br":
                    return None
            cells.append((pair[0], pair[1], label == FOCUS))
        return cells

    def status_of(self, a: Assembly) -> Status | None:
        cells = self.decode(a)
        if cells is None:
            return None
        heads = [k for k, c in enumerate(cells) if c[0] is not None]
        inputs = [k for k, c in enumerate(cells) if c[2]]
        if len(heads) != 1 or len(inputs) != self.sem.n_input or inputs != list(range(inputs[0], inputs[0] + len(inputs))):
            return None
        st = Status(cells[heads[0]][0], tuple(c[1] for c in cells), heads[0], inputs[0])
        # a clippable cell still present, or an extension still owed: not a settled status
        if self.sem.strip(st) != st or self.sem.pending_extension(st) is not None:
            return None
        return st


def _canon(a: Assembly) -> Assembly:
    return Assembly(a.cells)


_COMPILERS: dict[TMSpec, Compiler] = {}


def compiler_for(m: TMSpec) -> Compiler:
    c = _COMPILERS.get(m)
    if c is None:
        c = _COMPILERS[m] = Compiler(m)
    return c


def tm_status_map(a: Assembly, m: TMSpec) -> Status | None:
    """Status represented by ``a``, or None while anything but the bare tape is attached.

    Tapes that still carry a clippable cell, or still wait for an extension, are not
    settled and map to None.
    """
    return compiler_for(m).status_of(a)


def status_map_for(m: TMSpec):
    c = compiler_for(m)
    return c.status_of


def settle_first(e: TraceEvent) -> int:
    """Run priority: detachments, then reductions, then everything else.

    Reductions race the head otherwise; see :func:`tm_run`.
    """
    if e.kind == BREAK:
        return 0
    names = {t.name[:1] for _, t in e.partner.cells if t.name}
    return 1 if names & {"Y", "K"} else 2


def tm_run(m: TMSpec, steps: int, *, seed: int | None = 0, system: AssemblySystem | None = None,
           max_events: int | None = None) -> tuple[FocusedSequence, list[Status]]:
    """Compiled run of ``m`` until ``steps`` machine steps have been projected.

    Moves are drawn at random among the best ones under :func:`settle_first`.  A
    reduction gadget may otherwise still be waiting when the head moves on, and the
    status it was meant to settle would never be seen.
    Returns the sequence and its projection (the start status included).
    """
    system = system or compile_tm(m, Bounds(max_size=100000, max_prod=10**9))
    f = status_map_for(m)
    sem = compiler_for(m).sem
    seen = [0]
    last = [None]

    def stop(a):
        v = f(a)
        if v is not None and v != last[0]:
            last[0] = v
            seen[0] += 1
        return seen[0] > steps or (v is not None and sem.rule(v) is None)

    seq = run(system, max_events or 200 * (steps + 1), seed=seed, priority=settle_first, stop=stop)
    proj = [v for v in (f(a) for a in seq.assemblies()) if v is not None]
    return seq, proj


def head_count(a: Assembly, m: TMSpec) -> int | None:
    """Number of stateful pairs on a bare tape, None for anything else."""
    cells = compiler_for(m).decode(a)
    return None if cells is None else sum(c[0] is not None for c in cells)


def compile_tm(m: TMSpec, bounds: Bounds | None = None) -> AssemblySystem:
    """Initial set: the input tape, all symbol-state sets and the gadget families."""
    c = compiler_for(m)
    initial = [c.initial_tape()]
    sets = c.symbol_state_sets()
    for tiles in sets.values():
        initial += [Assembly.single(t) for t in tiles.values()]
    trans = c.transition_gadgets()
    ext = c.extension_gadgets()
    red = c.reduction_gadgets()
    util = [c.bridge(), c.reduction_trigger(LEFT), c.reduction_trigger(RIGHT)]
    initial += [_canon(g) for g in trans + ext + red + util]
    meta = {"kind": "tm", "machine": m.to_dict(),
            "counts": {"symbol_state_sets": len(sets), "symbol_state_tiles": 5 * len(sets),
                       "transition_gadgets": len(trans), "extension_gadgets": len(ext),
                       "reduction_gadgets": len(red), "utility": len(util), "assemblies": len(initial)}}
    return AssemblySystem(initial, bounds or Bounds(max_size=512, max_prod=50_000), focus_label=FOCUS, meta=meta)


# --- stage templates -------------------------------------------------------------------------

HALF_STAGES = ("gadget", "+D", "-P", "-Q", "+P", "+Q", "+A", "+Z")


def transition_stages(m: TMSpec, st: Status) -> list[tuple[str, Assembly]]:
    """Assemblies along one transition from ``st``: the head half first, then the
    neighbour half, then the gadget leaving.  Labels name the event just taken."""
    c = compiler_for(m)
    r = c.sem.rule(st)
    if r is None:
        raise ValueError(f"no rule applies in {st}")
    nb = st.head + (1 if r.move == RIGHT else -1)
    if not 0 <= nb < len(st.tape):
        raise ValueError("the head is at the edge; the tape extends first")
    tape = dict(c.tape_assembly(st).cells)
    hx, nx = W * st.head, W * nb
    x = st.tape[nb]
    gadget = [((hx + gx, gy), t) for (gx, gy), t in c.transition_gadget(r, x).cells]
    halves = ((hx, (r.state, r.read), (None, r.write)), (nx, (None, x), (r.next, x)))
    cells = dict(tape)
    cells.update(gadget)
    out = [("gadget", _canon(Assembly(cells, canonical=False)))]
    junk = {p for p, _ in gadget}
    for ox, src, tgt in halves:
        ts, tt = c.symbol_state_tiles(*src), c.symbol_state_tiles(*tgt)
        steps = (("+D", SLOT["D"], ts["D"]), ("-P", SLOT["P"], None), ("-Q", SLOT["Q"], None),
                 ("+P", SLOT["P"], tt["P"]), ("+Q", SLOT["Q"], tt["Q"]), ("+A", SLOT["A"], tt["A"]),
                 ("+Z", SLOT["Z"], tt["Z"]))
        for name, j, t in steps:
            p = (ox + j, 1)
            if t is None:
                del cells[p]
            else:
                cells[p] = t
                if name in ("+D", "+A", "+Z"):
                    junk.add(p)
            out.append((name, _canon(Assembly(cells, canonical=False))))
    rest = {p: t for p, t in cells.items() if p not in junk}
    out.append(("detach", _canon(Assembly(rest, canonical=False))))
    return out
