import json
from fractions import Fraction

import pytest

from negasm import graphwalk as gw
from negasm import tm
from negasm.analysis import (MilestoneFailed, check_cut_milestones, fuel_report, graph_milestones, nonblank_span,
                             report_json, space_report)
from negasm.dynamics import run
from negasm.model import Assembly, Tile


def strip_of(n):
    return Assembly({(i, 0): Tile(name=f"t{i}") for i in range(n)})


def test_fuel_report_on_sizes():
    # sizes 3 -> 5 -> 4 -> 6 -> 5 -> 7 ; f defined on odd sizes
    seq = [strip_of(n) for n in (3, 5, 4, 6, 5, 7)]
    f = lambda a: len(a) if len(a) % 2 else None
    rep = fuel_report(seq, f)
    assert rep.samples == [2, 2, 2]
    assert rep.total == 6 and rep.transitions == 3 and rep.constant == 2 and rep.mean == 2


def test_fuel_constant_ignores_first_sample_only():
    seq = [strip_of(n) for n in (1, 5, 6, 7, 9, 10)]
    f = lambda a: len(a) if len(a) != 6 and len(a) != 9 else None
    rep = fuel_report(seq, f)
    assert rep.samples == [4, 2, 3]
    assert rep.constant is None


def test_oscillator_fuel_is_constant():
    s = gw.compile_graph(gw.quaternary_oscillator())
    seq = run(s, 400, seed=2)
    rep = fuel_report(seq, gw.status_map)
    assert rep.transitions >= 20
    assert rep.constant == gw.FUEL_PER_TRANSITION
    assert json.loads(report_json(("fuel", rep)))["fuel"]["constant"] == gw.FUEL_PER_TRANSITION


def test_nonblank_span_includes_head():
    st = tm.Status("q", ("b", "1", "b", "1", "b"), 4, 0)
    assert nonblank_span(st, "b") == 4
    assert nonblank_span(tm.Status("q", ("b", "b"), 0, 0), "b") == 1


def test_space_returns_after_blanking():
    m = tm.copy_then_blank(2)
    seq, proj = tm.tm_run(m, 100, seed=0)
    assert proj == tm.reference_tm_run(m, 100)
    rep = space_report(seq, tm.status_map_for(m), m.blank)
    assert rep.max_size > rep.final_size >= rep.initial_size
    assert rep.final_size - rep.initial_size == 11
    assert len(rep.sizes) == len(proj)


def test_milestones_on_another_edge():
    assert graph_milestones("2", "3").passed


def test_failing_milestone_reports_or_raises():
    stages = [a for a in gw.transition_stages("0", "1")]
    with pytest.raises(MilestoneFailed):
        check_cut_milestones(stages, [(3, Fraction(1, 2))])
    rep = check_cut_milestones(stages, [(3, Fraction(1, 2)), (1, Fraction(7, 8))], raise_on_fail=False)
    assert not rep.passed and all(not c["passed"] for c in rep.checks)
