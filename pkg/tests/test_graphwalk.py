from fractions import Fraction

import pytest

from negasm import graphwalk as gw
from negasm.analysis import graph_milestones, projected_walks, verify_walk
from negasm.cuts import enumerate_breaks, is_stable
from negasm.dynamics import AssemblySystem, explore


@pytest.fixture(scope="module")
def oscillator():
    g = gw.quaternary_oscillator()
    s = gw.compile_graph(g)
    return g, s, explore(s)


def test_parse_text_graph():
    g = gw.DirectedGraphSpec.parse_text("start: b\na -> b  # comment\nb -> a\nc\n")
    assert g.vertices == ("a", "b", "c") and g.start == "b" and g.out("a") == ["b"]


@pytest.mark.parametrize("text, exc", [
    ("", gw.EmptyGraph),
    ("a -> b\nstart: z", gw.StartMissing),
    ("a -> b -> c", gw.GraphSpecError),
])
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        gw.DirectedGraphSpec.parse_text(text)


def test_self_loop_rejected():
    with pytest.raises(gw.UnsupportedEdge):
        gw.compile_graph(gw.DirectedGraphSpec(("a",), (("a", "a"),), "a"))


def test_from_dict_round_trip():
    g = gw.quaternary_oscillator()
    assert gw.DirectedGraphSpec.from_dict(g.to_dict()) == g
    with pytest.raises(gw.GraphSpecError):
        gw.DirectedGraphSpec.from_dict({"edges": []})


def test_oscillator_inventory(oscillator):
    g, s, _ = oscillator
    c = s.meta["counts"]
    assert c["vertex_sets"] == 4 and c["edge_gadgets"] == 4
    assert all(is_stable(a) for a in s.initial)
    assert len(s.focused_initial()) == 1


def test_status_map_on_cell_and_gadget():
    assert gw.status_map(gw.cell_with("2")) == "2"
    stages = gw.transition_stages("0", "1")
    assert gw.status_map(stages[0]) == "0" and gw.status_map(stages[-1]) == "1"
    assert all(gw.status_map(a) is None for a in stages[1:-1])


def test_transition_stage_breaks():
    stages = gw.transition_stages("0", "1")
    assert len(stages) == len(gw.STAGE_NAMES)
    # stage 3 drops exactly one tile, at 7/8
    # (stage k is stages[k - 1])
    (p, q, cut), = enumerate_breaks(stages[gw.VERTEX_REMOVAL_STAGE - 1])
    assert cut.weight == Fraction(7, 8) and min(len(p), len(q)) == 1
    # the gadget-removal stage has a single break, which frees the cell
    (p, q, cut), = enumerate_breaks(stages[gw.GADGET_REMOVAL_STAGE - 1])
    assert gw.status_map(p) == "1" or gw.status_map(q) == "1"


def test_milestones_pass():
    rep = graph_milestones()
    assert rep.passed, rep.summary()


def test_oscillator_explores_completely(oscillator):
    _, s, pg = oscillator
    assert pg.complete and len(pg.nodes) < s.bounds.max_prod


def test_oscillator_projection_is_periodic(oscillator):
    _, s, pg = oscillator
    walks = projected_walks(pg, s.focus_label, gw.status_map, 40)
    period = tuple(str(i % 4) for i in range(40))
    assert walks == {period}


def test_oscillator_verifies(oscillator):
    g, s, pg = oscillator
    rep = verify_walk(s, g, gw.status_map, 40, pg=pg)
    assert rep.passed, rep.summary()


def test_missing_edge_gadget_breaks_condition_two(oscillator):
    g, s, _ = oscillator
    gadget = gw.gadget_assembly("3", "0")
    mutated = AssemblySystem([a for a in s.initial if a != gadget], s.bounds, s.focus_label, s.meta)
    rep = verify_walk(mutated, g, gw.status_map, 12, pg=explore(mutated))
    assert not rep.condition2.passed


def test_branching_graph_verifies():
    g = gw.DirectedGraphSpec(("a", "b", "c"), (("a", "b"), ("a", "c"), ("b", "a"), ("c", "a")), "a")
    s = gw.compile_graph(g)
    pg = explore(s)
    assert pg.complete
    rep = verify_walk(s, g, gw.status_map, 12, pg=pg)
    assert rep.passed, rep.summary()
    walks = projected_walks(pg, s.focus_label, gw.status_map, 5)
    assert len(walks) == 4  # a ? a ? a


def test_depth_zero_is_vacuous(oscillator):
    g, s, pg = oscillator
    rep = verify_walk(s, g, gw.status_map, 0, pg=pg)
    assert rep.passed and "depth 0" in rep.summary()
