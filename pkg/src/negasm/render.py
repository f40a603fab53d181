"""Drawing assemblies: ASCII grids for terminals, SVG for everything else."""
from __future__ import annotations

from html import escape
from typing import Iterable, Sequence

from .model import Assembly, Tile, format_strength

FORMATS = ("ascii", "svg")
CELL = 64  # svg pixels per tile

_FACE_POS = {  # text anchor inside a tile, as fractions of CELL
    "n": (0.5, 0.16),
    "e": (0.84, 0.5),
    "s": (0.5, 0.9),
    "w": (0.16, 0.5),
}


class UnknownFormat(ValueError):
    pass


def _glyph(t: Tile) -> str:
    name = t.name or ""
    for ch in name:
        if ch.isalnum():
            return ch
    return "#"


def ascii_frame(a: Assembly) -> str:
    """One character per tile, north at the top; empty positions are dots."""
    if not len(a):
        return "(empty)"
    x0, y0, x1, y1 = a.bbox()
    m = a.mapping
    rows = []
    for y in range(y1, y0 - 1, -1):
        rows.append("".join(_glyph(m[(x, y)]) if (x, y) in m else "." for x in range(x0, x1 + 1)))
    return "\n".join(rows)


def _glue_text(g) -> str:
    gid = g.id if len(g.id) <= 14 else g.id[:13] + "~"
    return f"{gid} {format_strength(g.strength)}"


def svg_frame(a: Assembly, title: str | None = None) -> str:
    """Tiles as squares annotated with glue ids and strengths (negative glues in red)."""
    if not len(a):
        x0 = y0 = x1 = y1 = 0
    else:
        x0, y0, x1, y1 = a.bbox()
    w, h = (x1 - x0 + 1) * CELL, (y1 - y0 + 1) * CELL
    top = 20 if title else 0
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h + top}" '
           f'viewBox="0 0 {w} {h + top}" font-family="monospace">']
    if title:
        out.append(f'<text x="4" y="14" font-size="12">{escape(title)}</text>')
    for (x, y), t in sorted(a.cells, key=lambda c: c[0]):
        px, py = (x - x0) * CELL, top + (y1 - y) * CELL
        fill = "#dde8f6" if t.label else "#f2f2f2"
        out.append(f'<rect x="{px}" y="{py}" width="{CELL}" height="{CELL}" fill="{fill}" stroke="#333"/>')
        if t.name:
            out.append(f'<text x="{px + CELL / 2}" y="{py + CELL / 2 + 3}" font-size="8" '
                       f'text-anchor="middle" fill="#555">{escape(t.name[:12])}</text>')
        for face, g in t.glues():
            if g.id.endswith(("h", "v")) and "#" in g.id:
                continue  # internal polyomino bonds would only add noise
            fx, fy = _FACE_POS[face]
            colour = "#b00" if g.strength < 0 else "#060"
            out.append(f'<text x="{px + fx * CELL}" y="{py + fy * CELL + 2}" font-size="6" '
                       f'text-anchor="middle" fill="{colour}">{escape(_glue_text(g))}</text>')
    out.append("</svg>")
    return "\n".join(out)


def render_frames(assemblies: Iterable[Assembly], fmt: str = "ascii",
                  titles: Sequence[str] | None = None) -> list[str]:
    if fmt not in FORMATS:
        raise UnknownFormat(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
    frames = []
    for i, a in enumerate(assemblies):
        title = titles[i] if titles is not None else f"frame {i}"
        if fmt == "svg":
            frames.append(svg_frame(a, title))
        else:
            frames.append(f"-- {title}\n{ascii_frame(a)}")
    return frames
