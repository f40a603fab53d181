import pytest

from negasm import graphwalk as gw
from negasm.model import Assembly, Glue, Tile
from negasm.render import UnknownFormat, ascii_frame, render_frames, svg_frame


def test_ascii_grid_north_up():
    a = Assembly({(0, 0): Tile(name="A", n=Glue("x", 1)), (0, 1): Tile(name="B", s=Glue("x", 1)),
                  (1, 1): Tile(name="C")})
    assert ascii_frame(a).splitlines() == ["BC", "A."]


def test_svg_marks_negative_glues():
    a = Assembly({(0, 0): Tile(name="A", e=Glue("neg", "-1/2")), (1, 0): Tile(name="B", w=Glue("neg", "-1/2"))})
    svg = svg_frame(a, "two")
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert "-1/2" in svg and "two" in svg


def test_render_frames_of_a_stage_sequence():
    stages = gw.transition_stages("0", "1")
    out = render_frames(stages, "ascii", [str(i) for i in range(len(stages))])
    assert len(out) == len(stages)
    with pytest.raises(UnknownFormat):
        render_frames(stages, "png", None)
