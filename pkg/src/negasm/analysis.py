"""Bounded verification of graph walking, cut milestones, fuel and space."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Hashable, Iterable, Sequence

from .cuts import bond_graph, cut_weight, enumerate_cuts_below
from .dynamics import (COMBINE, AssemblySystem, FocusedSequence, ProducibleGraph, TraceEvent,
                       explore, fuel)
from .model import Assembly, format_strength

StatusMap = Callable[[Assembly], Hashable | None]


class MilestoneFailed(AssertionError):
    def __init__(self, msg, cut=None):
        super().__init__(msg)
        self.cut = cut


# --- focused transition graph ----------------------------------------------------------

class FocusedGraph:
    """Restriction of a producible graph to assemblies carrying the focus label."""

    def __init__(self, pg: ProducibleGraph, label: str, f: StatusMap):
        self.pg = pg
        self.label = label
        self.focused = [a.has_label(label) for a in pg.nodes]
        self.value = [f(a) if ok else None for a, ok in zip(pg.nodes, self.focused)]
        self.succ: dict[int, list] = {}
        for e in pg.edges:
            if self.focused[e.src] and self.focused[e.dst]:
                self.succ.setdefault(e.src, []).append(e)
        self.starts = [i for i in pg.initial if self.focused[i]]

    def out(self, i: int):
        return self.succ.get(i, ())

    def defined(self, i: int) -> bool:
        return self.value[i] is not None

    def closure(self, seeds: Iterable[int]) -> set[int]:
        """Seeds plus everything reachable through f-undefined nodes only."""
        seen = set(seeds)
        q = deque(seen)
        while q:
            i = q.popleft()
            for e in self.out(i):
                if not self.defined(e.dst) and e.dst not in seen:
                    seen.add(e.dst)
                    q.append(e.dst)
        return seen

    def events(self, path: Sequence) -> list[TraceEvent]:
        """Replayable trace events along a list of edges."""
        nodes = self.pg.nodes
        out = []
        for e in path:
            a, b = nodes[e.src], nodes[e.dst]
            out.append(TraceEvent(e.kind, b, fuel(a, b) if e.kind == COMBINE else 0,
                                  status=self.value[e.dst], partner=nodes[e.other]))
        return out


# --- walk report -----------------------------------------------------------------------

@dataclass
class ConditionResult:
    passed: bool
    detail: str = ""
    counterexample: list[TraceEvent] | None = None
    witnesses: dict = field(default_factory=dict)
    unknown: int = 0

    def to_dict(self) -> dict:
        d = {"passed": self.passed, "detail": self.detail, "unknown": self.unknown,
             "witnesses": {str(k): v for k, v in self.witnesses.items()}}
        if self.counterexample is not None:
            d["counterexample"] = [ev.to_dict() for ev in self.counterexample]
        return d


@dataclass
class WalkReport:
    condition1: ConditionResult
    condition2: ConditionResult
    condition3: ConditionResult
    depth: int
    nodes: int
    bound_exhausted: bool

    @property
    def passed(self) -> bool:
        return self.condition1.passed and self.condition2.passed and self.condition3.passed

    def to_dict(self) -> dict:
        return {"passed": self.passed, "verified_to_depth": self.depth, "nodes": self.nodes,
                "bound_exhausted": self.bound_exhausted,
                "condition1": self.condition1.to_dict(), "condition2": self.condition2.to_dict(),
                "condition3": self.condition3.to_dict()}

    def summary(self) -> str:
        lines = [f"verified to depth {self.depth} over {self.nodes} producibles"
                 + (" (bounds exhausted)" if self.bound_exhausted else "")]
        for name, c in (("sequences are walks", self.condition1), ("walks are sequences", self.condition2),
                        ("no undesired dead-ends", self.condition3)):
            lines.append(f"  {'PASS' if c.passed else 'FAIL'}  {name}: {c.detail}"
                         + (f" ({c.unknown} undecided at the bounds)" if c.unknown else ""))
        return "\n".join(lines)


def _edges_of(graph) -> set:
    return {tuple(e) for e in graph.edges}


def _check_sequences_are_walks(fg: FocusedGraph, edges: set, start) -> ConditionResult:
    """Product search over (node, last projected vertex)."""
    parent: dict = {}
    q = deque()
    for i in fg.starts:
        st = (i, fg.value[i])
        if st not in parent:
            parent[st] = None
            q.append(st)
    visited_pairs = 0

    def trace(st):
        path = []
        while parent[st] is not None:
            prev, e = parent[st]
            path.append(e)
            st = prev
        return path[::-1]

    for i in fg.starts:
        v = fg.value[i]
        if v is not None and v != start:
            return ConditionResult(False, f"initial assembly projects to {v!r}, not the start {start!r}", [])
    while q:
        st = q.popleft()
        i, last = st
        visited_pairs += 1
        for e in fg.out(i):
            v = fg.value[e.dst]
            if v is None:
                nxt = (e.dst, last)
            elif last is None:
                nxt = (e.dst, v)
                if v != start:
                    ev = fg.events(trace(st) + [e])
                    return ConditionResult(False, f"first projected vertex {v!r} is not the start {start!r}", ev)
            else:
                if (last, v) not in edges:
                    ev = fg.events(trace(st) + [e])
                    return ConditionResult(False, f"consecutive pair ({last!r}, {v!r}) is not an edge", ev,
                                           witnesses={"violation": [last, v]})
                nxt = (e.dst, v)
            if nxt not in parent:
                parent[nxt] = (st, e)
                q.append(nxt)
    return ConditionResult(True, f"{visited_pairs} (assembly, last vertex) states checked")


def _check_walks_are_sequences(fg: FocusedGraph, graph, depth: int) -> ConditionResult:
    """Subset construction: R(W) = focused nodes ending a sequence that projects to W."""
    out_of: dict = {}
    for u, v in graph.edges:
        out_of.setdefault(u, []).append(v)
    if depth <= 0:
        return ConditionResult(True, "depth 0: vacuous")
    seed = [i for i in fg.starts if fg.value[i] == graph.start]
    seed += [e.dst for i in fg.closure(j for j in fg.starts if not fg.defined(j))
             for e in fg.out(i) if fg.value[e.dst] == graph.start]
    r0 = frozenset(fg.closure(seed))
    if not r0:
        return ConditionResult(False, f"start vertex {graph.start!r} is not realized")
    seen = {(r0, graph.start)}
    q = deque([(r0, graph.start, 1, [graph.start])])
    unknown = 0
    covered = 0
    while q:
        r, u, n, walk = q.popleft()
        covered += 1
        if n >= depth:
            continue
        for v in out_of.get(u, ()):
            hits = [e.dst for i in r for e in fg.out(i) if fg.value[e.dst] == v]
            if not hits:
                if any(i in fg.pg.truncated for i in r):
                    unknown += 1
                    continue
                return ConditionResult(False, f"walk {walk + [v]!r} has no assembly sequence (edge {u!r}->{v!r})",
                                       witnesses={"walk": walk + [v], "edge": [u, v]})
            nr = frozenset(fg.closure(hits))
            if (nr, v) not in seen:
                seen.add((nr, v))
                q.append((nr, v, n + 1, walk + [v]))
    return ConditionResult(True, f"{covered} walk classes realized up to length {depth}", unknown=unknown)


def _check_no_dead_ends(fg: FocusedGraph, graph) -> ConditionResult:
    """No sequence projecting to <u> gets stuck.

    Every edge u -> v stays reachable from each assembly mapped to u, and from every
    in-flight endpoint after it (f undefined) at least one out-edge of u still completes.
    An endpoint that has already committed to one out-edge need not reach the others.
    """
    out_of: dict = {}
    for u, v in graph.edges:
        out_of.setdefault(u, []).append(v)
    witnesses = {}
    unknown = 0
    by_value: dict = {}
    for i, v in enumerate(fg.value):
        if v is not None:
            by_value.setdefault(v, []).append(i)

    def fail(n, u, v, what):
        return ConditionResult(False, f"dead end: no sequence from {what} <{u!r}> assembly reaches {v!r}",
                               fg.events(_path_from_start(fg, n) or []),
                               witnesses={"edge": [u, v], "node": n})

    for u, nodes in by_value.items():
        targets = out_of.get(u, ())
        if not targets:
            continue
        for n in sorted(nodes):
            for v in targets:
                path = _path_to_value(fg, n, v)
                if path is None:
                    if _touches_truncated(fg, n):
                        unknown += 1
                        continue
                    return fail(n, u, v, "a")
                witnesses.setdefault(f"{u}->{v}", len(path))
        for n in sorted(fg.closure(nodes) - set(nodes)):
            if all(_path_to_value(fg, n, v) is None for v in targets):
                if _touches_truncated(fg, n):
                    unknown += 1
                    continue
                return fail(n, u, "/".join(map(str, targets)), "an in-flight")
    return ConditionResult(True, f"{len(witnesses)} edges extended from every <u> endpoint", witnesses=witnesses,
                           unknown=unknown)


def _path_to_value(fg: FocusedGraph, n: int, v) -> list | None:
    parent = {n: None}
    q = deque([n])
    while q:
        i = q.popleft()
        for e in fg.out(i):
            if e.dst in parent:
                continue
            if fg.value[e.dst] == v:
                path = [e]
                while parent[i] is not None:
                    path.append(parent[i])
                    i = parent[i].src
                return path[::-1]
            if not fg.defined(e.dst):
                parent[e.dst] = e
                q.append(e.dst)
    return None


def _touches_truncated(fg: FocusedGraph, n: int) -> bool:
    return any(i in fg.pg.truncated for i in fg.closure([n]))


def _path_from_start(fg: FocusedGraph, n: int) -> list | None:
    parent = {i: None for i in fg.starts}
    q = deque(fg.starts)
    while q:
        i = q.popleft()
        if i == n:
            path = []
            while parent[i] is not None:
                path.append(parent[i])
                i = parent[i].src
            return path[::-1]
        for e in fg.out(i):
            if e.dst not in parent:
                parent[e.dst] = e
                q.append(e.dst)
    return None


def verify_walk(system: AssemblySystem, graph, f: StatusMap, depth: int,
                pg: ProducibleGraph | None = None) -> WalkReport:
    """Check the three graph-walking conditions over a bounded exploration.

    ``graph`` needs ``vertices``, ``edges`` and ``start``. ``depth`` bounds the
    projected walks checked; the exploration itself (unless ``pg`` is passed in)
    is limited only by the system's bounds, since one transition takes many events.
    """
    if pg is None:
        pg = explore(system)
    fg = FocusedGraph(pg, system.focus_label, f)
    edges = _edges_of(graph)
    if depth <= 0:
        ok = ConditionResult(True, "depth 0: vacuous")
        c1 = ok
        for i in fg.starts:
            v = fg.value[i]
            if v is not None and v != graph.start:
                c1 = ConditionResult(False, f"initial assembly projects to {v!r}, not the start", [])
        return WalkReport(c1, ok, ok, 0, len(pg.nodes), not pg.complete)
    c1 = _check_sequences_are_walks(fg, edges, graph.start)
    c2 = _check_walks_are_sequences(fg, graph, depth)
    c3 = _check_no_dead_ends(fg, graph)
    return WalkReport(c1, c2, c3, depth, len(pg.nodes), not pg.complete)


def projected_walks(pg: ProducibleGraph, label: str, f: StatusMap, length: int) -> set[tuple]:
    """All distinct f'-projections (truncated to ``length`` vertices) of focused nascent sequences."""
    fg = FocusedGraph(pg, label, f)
    out = set()
    seen = set()
    q = deque()
    for i in fg.starts:
        w = (fg.value[i],) if fg.defined(i) else ()
        q.append((i, w))
        seen.add((i, w))
    while q:
        i, w = q.popleft()
        if len(w) >= length:
            out.add(w[:length])
            continue
        moved = False
        for e in fg.out(i):
            moved = True
            v = fg.value[e.dst]
            nw = w + (v,) if v is not None else w
            if (e.dst, nw) not in seen:
                seen.add((e.dst, nw))
                q.append((e.dst, nw))
        if not moved:
            out.add(w)
    return out


# --- cut milestones --------------------------------------------------------------------

@dataclass
class MilestoneReport:
    checks: list[dict]

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks)

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": self.checks}

    def summary(self) -> str:
        return "\n".join(f"  {'PASS' if c['passed'] else 'FAIL'}  {c['name']}: {c['detail']}" for c in self.checks)


def check_cut_milestones(stages: Sequence[Assembly], milestones: Iterable[tuple[int, Fraction]], *,
                         sides: Iterable[tuple[str, int, frozenset, Fraction]] = (),
                         same_side: Iterable[tuple[int, frozenset, frozenset, Fraction]] = (),
                         raise_on_fail: bool = True) -> MilestoneReport:
    """Assert cut facts on stage assemblies (stage numbers are 1-based).

    ``milestones``: the stage has exactly one cut below 1, of the given weight.
    ``sides``: (name, stage, side coords, expected exact weight).
    ``same_side``: (stage, coords A, coords B, minimum) over cuts keeping A and B together.
    """
    checks = []

    def fail(name, detail, cut=None):
        checks.append({"name": name, "passed": False, "detail": detail})
        if raise_on_fail:
            raise MilestoneFailed(f"{name}: {detail}", cut)

    for k, w in milestones:
        a = stages[k - 1]
        cuts = enumerate_cuts_below(a)
        name = f"stage {k} unique break"
        if len(cuts) != 1:
            fail(name, f"{len(cuts)} cuts below 1: {[format_strength(c.weight) for c in cuts]}",
                 cuts[0] if cuts else None)
        elif cuts[0].weight != w:
            fail(name, f"weight {format_strength(cuts[0].weight)} != {format_strength(w)}", cuts[0])
        else:
            checks.append({"name": name, "passed": True, "detail": f"weight {format_strength(w)}",
                           "side": sorted(min(cuts[0].side_a, cuts[0].side_b, key=len))})
    for name, k, side, w in sides:
        a = stages[k - 1]
        got = cut_weight(bond_graph(a), set(side))
        if got != w:
            fail(name, f"weight {format_strength(got)} != {format_strength(w)}")
        else:
            checks.append({"name": name, "passed": True, "detail": f"weight {format_strength(w)}"})
    for k, ca, cb, lo in same_side:
        a = stages[k - 1]
        got = _same_side_min(a, ca, cb)
        name = f"stage {k} same-side minimum"
        if got < lo:
            fail(name, f"minimum {format_strength(got)} < {format_strength(lo)}")
        else:
            checks.append({"name": name, "passed": True, "detail": f"minimum {format_strength(got)}"})
    return MilestoneReport(checks)


def _same_side_min(a: Assembly, ca: frozenset, cb: frozenset):
    """Minimum cut weight over bipartitions keeping ``ca`` and ``cb`` together."""
    g = bond_graph(a)
    group = {c for c in a.mapping if c in ca or c in cb}
    rest = [c for c in a.mapping if c not in group]
    if len(rest) > 20:
        raise ValueError("same-side search too large")
    best = None
    for r in range(len(rest)):
        for extra in combinations(rest, r):
            w = cut_weight(g, group | set(extra))
            if best is None or w < best:
                best = w
    return best


def graph_milestones(u: str = "0", v: str = "1", *, raise_on_fail: bool = True) -> MilestoneReport:
    """Milestone suite of the compiled graph-walking gadget on edge u -> v."""
    from . import graphwalk as gw

    st = gw.transition_stages(u, v)
    P = gw.POS
    e = Fraction(1, 8)
    s3 = gw.VERTEX_REMOVAL_STAGE
    s9 = gw.GADGET_REMOVAL_STAGE
    pre_side = frozenset(P[k] for k in ("T0", "TL", "TR", "T3", "T4", "Z"))
    # The pre-analysis cut is taken on the gadget-removal stage without D, A and the vertex pair.
    bare = Assembly({c: t for c, t in st[s9 - 1].mapping.items()
                     if c in pre_side or c in gw.cell_coords()})
    rep = check_cut_milestones(st, [(s3, 7 * e), (s3 + 1, 7 * e), (s9, 7 * e)],
                               sides=[(f"stage {s3} both vertex tiles", s3, frozenset({P["L"], P["R"]}), 11 * e)],
                               same_side=[(s9, gw.cell_coords(), gw.gadget_coords(), 9 * e)],
                               raise_on_fail=raise_on_fail)
    got = cut_weight(bond_graph(bare), set(pre_side))
    ok = got == e
    rep.checks.append({"name": "pre-analysis cell vs gadget and edge detachment tile", "passed": ok,
                       "detail": f"weight {format_strength(got)}"})
    if not ok and raise_on_fail:
        raise MilestoneFailed(f"pre-analysis cut {format_strength(got)} != 1/8")
    uniq = enumerate_cuts_below(st[s9 - 1])
    junk = gw.junk_side(st[s9 - 1])
    ok = len(uniq) == 1 and junk in (uniq[0].side_a, uniq[0].side_b)
    rep.checks.append({"name": f"stage {s9} break separates cell from gadget", "passed": ok,
                       "detail": "junk side = gadget, D, A, Z" if ok else "unexpected side"})
    if not ok and raise_on_fail:
        raise MilestoneFailed("gadget-removal break has the wrong sides")
    return rep


# --- fuel and space --------------------------------------------------------------------

@dataclass
class FuelReport:
    samples: list[int]
    total: int
    transitions: int
    max_size: int

    @property
    def mean(self) -> Fraction:
        return Fraction(self.total, self.transitions) if self.transitions else Fraction(0)

    @property
    def constant(self) -> int | None:
        """The per-transition fuel if every sample after the first agrees."""
        tail = self.samples[1:] if len(self.samples) > 1 else self.samples
        return tail[0] if tail and len(set(tail)) == 1 else None

    def to_dict(self) -> dict:
        return {"samples": self.samples, "total": self.total, "transitions": self.transitions,
                "mean": str(self.mean), "constant": self.constant, "max_size": self.max_size}


def fuel_report(seq: FocusedSequence | Sequence[Assembly], f: StatusMap) -> FuelReport:
    """Fuel between consecutive f-defined assemblies of a sequence."""
    assemblies = seq.assemblies() if isinstance(seq, FocusedSequence) else list(seq)
    samples = []
    acc = 0
    seen_first = False
    total = 0
    for a, b in zip(assemblies, assemblies[1:]):
        x = fuel(a, b)
        total += x
        acc += x
        if f(b) is not None:
            if seen_first or f(assemblies[0]) is not None:
                samples.append(acc)
            acc = 0
            seen_first = True
    proj = [a for a in assemblies if f(a) is not None]
    n = max(0, len(proj) - 1)
    return FuelReport(samples, total, n, max((len(a) for a in assemblies), default=0))


@dataclass
class SpaceReport:
    sizes: list[int]
    spans: list[int]
    initial_size: int
    max_size: int
    final_size: int

    def ratio(self) -> Fraction:
        return max((Fraction(s, max(1, p)) for s, p in zip(self.sizes, self.spans)), default=Fraction(0))

    def to_dict(self) -> dict:
        return {"sizes": self.sizes, "spans": self.spans, "initial_size": self.initial_size,
                "max_size": self.max_size, "final_size": self.final_size, "max_ratio": str(self.ratio())}


def nonblank_span(status, blank) -> int:
    """Cells between the leftmost and rightmost non-blank symbol, head included."""
    idx = [i for i, s in enumerate(status.tape) if s != blank] + [status.head]
    return max(idx) - min(idx) + 1


def space_report(seq: FocusedSequence | Sequence[Assembly], f: StatusMap, blank) -> SpaceReport:
    """Assembly size against the non-blank span at every f-defined step."""
    assemblies = seq.assemblies() if isinstance(seq, FocusedSequence) else list(seq)
    sizes, spans = [], []
    for a in assemblies:
        s = f(a)
        if s is not None:
            sizes.append(len(a))
            spans.append(nonblank_span(s, blank))
    return SpaceReport(sizes, spans, len(assemblies[0]) if assemblies else 0,
                       max((len(a) for a in assemblies), default=0), sizes[-1] if sizes else 0)


def report_json(*parts) -> str:
    out = {}
    for name, p in parts:
        out[name] = p.to_dict() if hasattr(p, "to_dict") else p
    return json.dumps(out, indent=2, sort_keys=True, default=str)
