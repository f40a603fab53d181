"""``negasm`` command line: compile, run, verify, render, stats.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import analysis, graphwalk, tm
from .dynamics import AssemblySystem, Bounds, explore, run
from .render import FORMATS as RENDER_FORMATS, UnknownFormat, render_frames
from .serialize import assembly_from_dict, assembly_to_dict, save_system, status_to_json, system_from_dict

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

BUILTIN_GRAPHS = {"oscillator": graphwalk.quaternary_oscillator}


class InputError(Exception):
    pass


def _read_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def load_graph(src: str) -> graphwalk.DirectedGraphSpec:
    if src in BUILTIN_GRAPHS:
        return BUILTIN_GRAPHS[src]()
    try:
        text = Path(src).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {src}: {exc.strerror}") from None
    try:
        if text.lstrip().startswith("{"):
            return graphwalk.DirectedGraphSpec.from_dict(_read_json(src))
        return graphwalk.DirectedGraphSpec.parse_text(text)
    except graphwalk.GraphSpecError as exc:
        raise InputError(f"{src}: {exc}") from None


def load_machine(src: str) -> tm.TMSpec:
    """A machine JSON file, or ``name`` / ``name:n`` for a built-in example."""
    name, _, arg = src.partition(":")
    if name in tm.EXAMPLES and not Path(src).exists():
        try:
            return tm.EXAMPLES[name](int(arg)) if arg else tm.EXAMPLES[name]()
        except ValueError:
            raise InputError(f"bad example size {arg!r}") from None
    try:
        return tm.TMSpec.from_dict(_read_json(src))
    except tm.TMError as exc:
        raise InputError(f"{src}: {exc}") from None
    except (KeyError, TypeError) as exc:
        raise InputError(f"{src}: malformed machine ({exc})") from None


def _load_system(path: str) -> AssemblySystem:
    d = _read_json(path)
    try:
        return system_from_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: not an assembly system ({exc})") from None


def context(system: AssemblySystem):
    """Status map, target graph and run priority for a compiled system."""
    kind = system.meta.get("kind")
    if kind == "graph":
        return graphwalk.status_map, graphwalk.DirectedGraphSpec.from_dict(system.meta["graph"]), None
    if kind == "tm":
        m = tm.TMSpec.from_dict(system.meta["machine"])
        return tm.status_map_for(m), None, tm.settle_first
    raise InputError("system has no 'kind' in its metadata; compile it with negasm compile")


def _bounds(args, default: Bounds) -> Bounds:
    return Bounds(args.max_size or default.max_size, args.max_prod or default.max_prod)


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    else:
        print(text)


def cmd_compile(args) -> int:
    if args.kind == "graph":
        system = graphwalk.compile_graph(load_graph(args.input))
        if args.max_size or args.max_prod:
            system.bounds = _bounds(args, system.bounds)
    else:
        m = load_machine(args.input)
        system = tm.compile_tm(m)
        if args.max_size or args.max_prod:
            system.bounds = _bounds(args, system.bounds)
    if args.out:
        save_system(system, args.out)
    counts = system.meta.get("counts", {})
    tiles = sum(len(a) for a in system.initial)
    text = "\n".join([f"{args.kind} system: {len(system.initial)} assemblies, {tiles} tiles"]
                     + [f"  {k}: {v}" for k, v in counts.items()]
                     + ([f"written to {args.out}"] if args.out else []))
    _emit(args, {"assemblies": len(system.initial), "tiles": tiles, "counts": counts}, text)
    return EXIT_OK


def cmd_run(args) -> int:
    system = _load_system(args.system)
    if args.focus_label:
        system.focus_label = args.focus_label
    if not system.focused_initial():
        raise InputError(f"no initial assembly carries the focus label {system.focus_label!r}")
    f, _, priority = context(system)
    done = [0, None]

    def stop(a):
        v = f(a)
        if v is not None and v != done[1]:
            done[0], done[1] = done[0] + 1, v
        return done[0] > args.steps

    seq = run(system, args.max_events, seed=args.seed, priority=priority, stop=stop)
    proj = [v for v in (f(a) for a in seq.assemblies()) if v is not None]
    fr = analysis.fuel_report(seq, f)
    if args.trace:
        with open(args.trace, "w") as fh:
            for a, e in zip(seq.assemblies(), [None] + seq.events):
                rec = {"kind": "start", "fuel": 0} if e is None else {"kind": e.kind, "fuel": e.fuel}
                rec.update(size=len(a), status=status_to_json(f(a)), assembly=assembly_to_dict(a))
                fh.write(json.dumps(rec, sort_keys=True) + "\n")
    text = "\n".join([f"{len(seq.events)} events, {len(proj)} projected statuses"]
                     + [f"  {v}" for v in proj]
                     + [f"fuel per transition: {fr.samples}  total {fr.total}"])
    _emit(args, {"events": len(seq.events), "projection": [status_to_json(v) for v in proj],
                 "fuel": fr.to_dict()}, text)
    return EXIT_OK


def cmd_verify(args) -> int:
    system = _load_system(args.system)
    if args.focus_label:
        system.focus_label = args.focus_label
    f, graph, _ = context(system)
    if args.target:
        if system.meta.get("kind") == "tm":
            graph = tm.configuration_graph(load_machine(args.target))
        else:
            graph = load_graph(args.target)
    elif graph is None:
        graph = tm.configuration_graph(tm.TMSpec.from_dict(system.meta["machine"]))
    system.bounds = _bounds(args, system.bounds)
    pg = None
    if system.meta.get("kind") == "tm" and args.depth > 0:
        # the tape never combines with another tape, so skip those pairs
        pg = explore(system, skip_focused_pairs=True)
    report = analysis.verify_walk(system, graph, f, args.depth, pg=pg)
    payload = {"walk": report.to_dict()}
    text = report.summary()
    ok = report.passed
    if system.meta.get("kind") == "graph":
        ms = analysis.graph_milestones(raise_on_fail=False)
        payload["milestones"] = ms.to_dict()
        text += "\nmilestones\n" + ms.summary()
        ok = ok and ms.passed
    _emit(args, payload, text)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_render(args) -> int:
    fmt = args.format or "ascii"
    if fmt not in RENDER_FORMATS:
        raise UnknownFormat(f"unknown format {fmt!r}; expected one of {', '.join(RENDER_FORMATS)}")
    try:
        lines = Path(args.trace).read_text().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {args.trace}: {exc.strerror}") from None
    frames, titles = [], []
    for n, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            frames.append(assembly_from_dict(rec["assembly"]))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{args.trace}:{n}: bad trace record ({exc})") from None
        titles.append(f"{len(titles)}: {rec.get('kind', '?')}" + (f" -> {rec['status']}" if rec.get("status") else ""))
    out = render_frames(frames, fmt, titles)
    if fmt == "svg":
        d = Path(args.out or "frames")
        d.mkdir(parents=True, exist_ok=True)
        for i, svg in enumerate(out):
            (d / f"frame_{i:04d}.svg").write_text(svg)
        print(f"{len(out)} frames written to {d}")
    elif args.out:
        Path(args.out).write_text("\n\n".join(out) + "\n")
        print(f"{len(out)} frames written to {args.out}")
    else:
        print("\n\n".join(out))
    return EXIT_OK


def cmd_stats(args) -> int:
    system = _load_system(args.system)
    sizes = [len(a) for a in system.initial]
    labels = sorted({t.label for a in system.initial for _, t in a.cells if t.label})
    glues = {g.id for a in system.initial for _, t in a.cells for _, g in t.glues()}
    payload = {"kind": system.meta.get("kind"), "assemblies": len(sizes), "tiles": sum(sizes),
               "largest": max(sizes, default=0), "singletons": sizes.count(1), "glue_ids": len(glues),
               "labels": labels, "focus_label": system.focus_label, "counts": system.meta.get("counts", {})}
    text = "\n".join(f"{k}: {v}" for k, v in payload.items())
    _emit(args, payload, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="negasm", description="Negative-glue 2HAM simulator and compilers.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-size", type=int, default=None, help="largest assembly explored")
    common.add_argument("--max-prod", type=int, default=None, help="producible budget")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("text", "json", "svg", "ascii"), default=None)
    common.add_argument("--focus-label", default=None)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", parents=[common], help="compile a graph or a Turing machine")
    c.add_argument("kind", choices=("graph", "tm"))
    c.add_argument("input", help="file, or a built-in name (oscillator, unary_increment:3, ...)")
    c.add_argument("-o", "--out")
    c.set_defaults(func=cmd_compile)

    r = sub.add_parser("run", parents=[common], help="one seeded focused run and its projection")
    r.add_argument("system")
    r.add_argument("--steps", type=int, default=8, help="projected steps to run for")
    r.add_argument("--max-events", type=int, default=100_000)
    r.add_argument("--trace", help="write the event stream here as JSON lines")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("verify", parents=[common], help="check the walk conditions")
    v.add_argument("system")
    v.add_argument("target", nargs="?", help="graph or machine to check against (default: the compiled one)")
    v.add_argument("--depth", type=int, default=40)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("render", parents=[common], help="draw the frames of a trace")
    d.add_argument("trace")
    d.add_argument("-o", "--out")
    d.set_defaults(func=cmd_render)

    s = sub.add_parser("stats", parents=[common], help="summarise a compiled system")
    s.add_argument("system")
    s.set_defaults(func=cmd_stats)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command != "render" and args.format in ("svg", "ascii"):
        print(f"negasm: --format {args.format} only applies to render", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, UnknownFormat, graphwalk.GraphSpecError, tm.TMError) as exc:
        print(f"negasm: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
