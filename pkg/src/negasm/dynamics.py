"""Producible-set exploration and focused assembly sequences."""
from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from .cuts import enumerate_breaks, enumerate_combinations, is_stable, _glue_sites
from .model import Assembly

log = logging.getLogger(__name__)

COMBINE = "combine"
BREAK = "break"


class BoundExhausted(RuntimeError):
    def __init__(self, msg, graph=None):
        super().__init__(msg)
        self.graph = graph


@dataclass(frozen=True)
class Bounds:
    max_size: int = 64
    max_prod: int = 20_000
    max_depth: int = 10_000

    def __post_init__(self):
        if min(self.max_size, self.max_prod, self.max_depth) < 0:
            raise ValueError("bounds must be non-negative")


@dataclass
class AssemblySystem:
    initial: list[Assembly]
    bounds: Bounds = field(default_factory=Bounds)
    focus_label: str = "L"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        seen = []
        for a in self.initial:
            if a not in seen:
                seen.append(a)
        self.initial = seen
        for a in self.initial:
            if not is_stable(a):
                raise ValueError(f"initial assembly is not stable: {a!r}")

    def focused_initial(self) -> list[Assembly]:
        return [a for a in self.initial if a.has_label(self.focus_label)]


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    kind: str
    other: int  # partner for a combination, the other piece for a break


@dataclass
class ProducibleGraph:
    nodes: list[Assembly]
    index: dict[Assembly, int]
    edges: list[Edge]
    initial: list[int]
    truncated: set[int]
    parent: dict[int, Edge | None]
    complete: bool = True

    def out_edges(self, i: int) -> list[Edge]:
        if not hasattr(self, "_out"):
            out: dict[int, list[Edge]] = {}
            for e in self.edges:
                out.setdefault(e.src, []).append(e)
            self._out = out
        return self._out.get(i, [])

    def terminal(self) -> list[int]:
        return [i for i in range(len(self.nodes)) if not self.out_edges(i) and i not in self.truncated]

    def witness(self, i: int) -> list[Edge]:
        """Edges of a valid assembly sequence from the initial set to node ``i``."""
        path = []
        while self.parent.get(i) is not None:
            e = self.parent[i]
            path.append(e)
            i = e.src
        return path[::-1]

    def to_jsonl(self) -> Iterable[str]:
        from .serialize import assembly_to_dict

        for i, a in enumerate(self.nodes):
            yield json.dumps({"node": i, "initial": i in self.initial, "truncated": i in self.truncated,
                              "assembly": assembly_to_dict(a)}, sort_keys=True)
        for e in self.edges:
            yield json.dumps({"edge": [e.src, e.dst], "kind": e.kind, "other": e.other}, sort_keys=True)


def _sites_index(a: Assembly) -> frozenset:
    return frozenset(_glue_sites(a))


def explore(system: AssemblySystem, *, strict: bool = False, order: str = "canonical",
            skip_focused_pairs: bool = False) -> ProducibleGraph:
    """Close the initial set under combinations and breaks, within ``system.bounds``.

    ``order`` picks the frontier ordering ("canonical" or "reverse"); the node set
    does not depend on it. Nodes are renumbered in canonical order at the end.
    With ``skip_focused_pairs`` two assemblies that both carry the focus label are
    never combined, which keeps explorations of a single growing assembly cheap.
    """
    focus = system.focus_label if skip_focused_pairs else None
    b = system.bounds
    nodes: list[Assembly] = []
    index: dict[Assembly, int] = {}
    depth: dict[int, int] = {}
    parent: dict[int, Edge | None] = {}
    truncated: set[int] = set()
    edges: set[Edge] = set()
    by_glue: dict[str, list[int]] = {}
    processed: list[bool] = []
    complete = True

    def add(a: Assembly, d: int, via: Edge | None) -> int | None:
        nonlocal complete
        i = index.get(a)
        if i is not None:
            return i
        if len(nodes) >= b.max_prod:
            complete = False
            return None
        i = len(nodes)
        nodes.append(a)
        index[a] = i
        depth[i] = d
        parent[i] = via
        processed.append(False)
        for gid in _sites_index(a):
            by_glue.setdefault(gid, []).append(i)
        return i

    for a in sorted(system.initial, key=Assembly.sort_key):
        add(a, 0, None)

    frontier = list(range(len(nodes)))
    while frontier:
        frontier.sort(key=lambda i: nodes[i].sort_key(), reverse=(order == "reverse"))
        nxt = []
        for i in frontier:
            a = nodes[i]
            if depth[i] >= b.max_depth:
                truncated.add(i)
                complete = False
                continue
            processed[i] = True
            new = []
            for pa, pb, _ in enumerate_breaks(a):
                ja = add(pa, depth[i] + 1, Edge(i, -1, BREAK, -1))
                jb = add(pb, depth[i] + 1, Edge(i, -1, BREAK, -1))
                if ja is None or jb is None:
                    truncated.add(i)
                    continue
                _fix_parent(parent, ja, Edge(i, ja, BREAK, jb))
                _fix_parent(parent, jb, Edge(i, jb, BREAK, ja))
                edges.add(Edge(i, ja, BREAK, jb))
                edges.add(Edge(i, jb, BREAK, ja))
                new += [ja, jb]
            partners = set()
            for gid in _sites_index(a):
                partners.update(by_glue.get(gid, ()))
            a_focused = focus is not None and a.has_label(focus)
            for j in sorted(partners):
                if not processed[j]:
                    continue
                other = nodes[j]
                if a_focused and other.has_label(focus):
                    continue
                if len(a) + len(other) > b.max_size:
                    truncated.add(i)
                    continue
                for c, _ in enumerate_combinations(a, other):
                    k = add(c, max(depth[i], depth[j]) + 1, Edge(i, -1, COMBINE, j))
                    if k is None:
                        truncated.add(i)
                        continue
                    _fix_parent(parent, k, Edge(i, k, COMBINE, j))
                    edges.add(Edge(i, k, COMBINE, j))
                    edges.add(Edge(j, k, COMBINE, i))
                    new.append(k)
            nxt.extend(k for k in new if not processed[k] and k not in nxt and k not in frontier)
        frontier = [k for k in dict.fromkeys(nxt) if not processed[k]]

    if truncated:
        complete = False
    g = _renumber(nodes, edges, parent, truncated, [index[a] for a in system.initial], complete)
    if not complete:
        log.warning("exploration stopped by bounds: %d nodes, %d truncated", len(g.nodes), len(g.truncated))
        if strict:
            raise BoundExhausted("exploration bounds exhausted", g)
    return g


def _fix_parent(parent, k, e):
    p = parent.get(k)
    if p is not None and p.dst == -1:
        parent[k] = e


def _renumber(nodes, edges, parent, truncated, initial, complete) -> ProducibleGraph:
    perm = sorted(range(len(nodes)), key=lambda i: nodes[i].sort_key())
    new = {old: n for n, old in enumerate(perm)}
    nn = [nodes[i] for i in perm]
    ne = sorted({Edge(new[e.src], new[e.dst], e.kind, new[e.other]) for e in edges},
                key=lambda e: (e.src, e.dst, e.kind, e.other))
    npar = {}
    for old, e in parent.items():
        npar[new[old]] = None if e is None else Edge(new[e.src], new[e.dst], e.kind, new[e.other])
    return ProducibleGraph(nn, {a: i for i, a in enumerate(nn)}, ne, sorted(new[i] for i in initial),
                           {new[i] for i in truncated}, npar, complete)


# --- sequences -------------------------------------------------------------------------

def fuel(before: Assembly | int, after: Assembly | int) -> int:
    nb = before if isinstance(before, int) else len(before)
    na = after if isinstance(after, int) else len(after)
    return max(0, na - nb)


@dataclass(frozen=True)
class TraceEvent:
    kind: str
    result: Assembly
    fuel: int
    status: Hashable | None = None
    partner: Assembly | None = None

    def to_dict(self) -> dict:
        from .serialize import assembly_to_dict, status_to_json

        d = {"kind": self.kind, "fuel": self.fuel, "size": len(self.result),
             "status": status_to_json(self.status), "assembly": assembly_to_dict(self.result)}
        if self.partner is not None:
            d["partner"] = assembly_to_dict(self.partner)
        return d


@dataclass
class FocusedSequence:
    start: Assembly
    events: list[TraceEvent]
    focus_label: str
    nascent: bool = False

    def assemblies(self) -> list[Assembly]:
        return [self.start] + [e.result for e in self.events]

    def total_fuel(self) -> int:
        return sum(e.fuel for e in self.events)

    def __post_init__(self):
        for a in self.assemblies():
            if not a.has_label(self.focus_label):
                raise ValueError(f"assembly without label {self.focus_label!r} in a focused sequence")


def successors(a: Assembly, pool: Iterable[Assembly], focus_label: str | None = None) -> list[TraceEvent]:
    """Single-step moves of ``a``: combinations with pool members and breaks.

    With ``focus_label`` set, only moves whose result carries the label are kept.
    """
    out: list[TraceEvent] = []
    seen = set()
    for p1, p2, _ in enumerate_breaks(a):
        for piece in (p1, p2):
            if focus_label is not None and not piece.has_label(focus_label):
                continue
            key = (BREAK, piece)
            if key not in seen:
                seen.add(key)
                out.append(TraceEvent(BREAK, piece, 0, partner=p2 if piece is p1 else p1))
    for other in pool:
        for c, _ in enumerate_combinations(a, other):
            key = (COMBINE, c)
            if key not in seen:
                seen.add(key)
                out.append(TraceEvent(COMBINE, c, fuel(a, c), partner=other))
    return out


def run(system: AssemblySystem, max_events: int, *, seed: int | None = None,
        start: Assembly | None = None, priority: Callable[[TraceEvent], int] | None = None,
        stop: Callable[[Assembly], bool] | None = None) -> FocusedSequence:
    """One focused sequence built by picking random moves.

    Moves come from combining with unlabelled initial assemblies and from breaks.
    ``priority`` ranks moves (lower first); only the best-ranked ones are drawn from.
    The run ends after ``max_events`` moves, when ``stop`` holds, or when stuck.
    """
    rng = random.Random(seed)
    label = system.focus_label
    if start is None:
        start = system.focused_initial()[0]
    pool = [a for a in system.initial if not a.has_label(label)]
    b = system.bounds
    a, events = start, []
    for _ in range(max_events):
        if stop is not None and stop(a):
            break
        moves = [e for e in successors(a, pool, label) if len(e.result) <= b.max_size]
        if not moves:
            break
        if priority is not None:
            best = min(priority(e) for e in moves)
            moves = [e for e in moves if priority(e) == best]
        e = moves[rng.randrange(len(moves))]
        events.append(e)
        a = e.result
    return FocusedSequence(start, events, label)


def project(seq: FocusedSequence | Sequence[Assembly], f: Callable[[Assembly], Hashable | None]) -> list:
    """Replace each assembly by ``f(assembly)``, dropping those where ``f`` is undefined."""
    assemblies = seq.assemblies() if isinstance(seq, FocusedSequence) else list(seq)
    out = []
    for a in assemblies:
        v = f(a)
        if v is not None:
            out.append(v)
    return out


def sequence_fuel(assemblies: Sequence[Assembly]) -> int:
    return sum(fuel(a, b) for a, b in zip(assemblies, assemblies[1:]))
