"""JSON forms of assemblies and assembly systems (strengths as "p/q" or "inf")."""
from __future__ import annotations

import json
from pathlib import Path

from .model import FACES, Assembly, Glue, Tile, format_strength, parse_strength


def tile_to_dict(t: Tile) -> dict:
    d = {"glues": {f: {"id": g.id, "strength": format_strength(g.strength)} for f, g in t.glues()}}
    if t.label is not None:
        d["label"] = t.label
    if t.name is not None:
        d["name"] = t.name
    return d


def tile_from_dict(d: dict) -> Tile:
    glues = {}
    for f, g in (d.get("glues") or {}).items():
        if f not in FACES:
            raise ValueError(f"unknown face {f!r}")
        glues[f] = Glue(str(g["id"]), parse_strength(g["strength"]))
    return Tile(label=d.get("label"), name=d.get("name"), **glues)


def assembly_to_dict(a: Assembly) -> dict:
    return {"tiles": [{"x": x, "y": y, **tile_to_dict(t)} for (x, y), t in a.cells]}


def assembly_from_dict(d: dict) -> Assembly:
    return Assembly([((int(t["x"]), int(t["y"])), tile_from_dict(t)) for t in d["tiles"]])


def status_to_json(s):
    if s is None:
        return None
    if hasattr(s, "to_json"):
        return s.to_json()
    return s


def system_to_dict(system) -> dict:
    return {
        "focus_label": system.focus_label,
        "bounds": {"max_size": system.bounds.max_size, "max_prod": system.bounds.max_prod,
                   "max_depth": system.bounds.max_depth},
        "meta": system.meta,
        "initial": [assembly_to_dict(a) for a in system.initial],
    }


def system_from_dict(d: dict):
    from .dynamics import AssemblySystem, Bounds

    return AssemblySystem(
        initial=[assembly_from_dict(a) for a in d["initial"]],
        bounds=Bounds(**d.get("bounds", {})),
        focus_label=d.get("focus_label", "L"),
        meta=d.get("meta", {}),
    )


def save_system(system, path) -> None:
    Path(path).write_text(json.dumps(system_to_dict(system), indent=1, sort_keys=True))


def load_system(path):
    return system_from_dict(json.loads(Path(path).read_text()))
