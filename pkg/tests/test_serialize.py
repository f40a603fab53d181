import random

import pytest

from negasm import graphwalk as gw
from negasm import tm
from negasm.dynamics import explore
from negasm.model import INF, Assembly, Glue, Tile
from negasm.serialize import (assembly_from_dict, assembly_to_dict, load_system, save_system, system_from_dict,
                              system_to_dict, tile_from_dict)

from oracles import random_assembly


def test_assembly_round_trip():
    rng = random.Random(7)
    for _ in range(30):
        a = random_assembly(rng, rng.randint(1, 8), p_inf=0.3)
        assert assembly_from_dict(assembly_to_dict(a)) == a


def test_strengths_are_exact_text():
    a = Assembly.single(Tile(e=Glue("x", "-5/8"), w=Glue("i", INF), label="L", name="t"))
    d = assembly_to_dict(a)
    assert d["tiles"][0]["glues"]["e"]["strength"] == "-5/8"
    assert d["tiles"][0]["glues"]["w"]["strength"] == "inf"


def test_unknown_face_rejected():
    with pytest.raises(ValueError):
        tile_from_dict({"glues": {"up": {"id": "x", "strength": "1/1"}}})


def test_system_round_trip_explores_alike(tmp_path):
    s = gw.compile_graph(gw.quaternary_oscillator())
    path = tmp_path / "osc.json"
    save_system(s, path)
    back = load_system(path)
    assert back.initial == s.initial and back.meta == s.meta and back.focus_label == s.focus_label
    assert len(explore(back).nodes) == len(explore(s).nodes)


def test_tm_system_round_trip():
    s = tm.compile_tm(tm.unary_increment(2))
    back = system_from_dict(system_to_dict(s))
    assert back.initial == s.initial
    assert tm.TMSpec.from_dict(back.meta["machine"]) == tm.unary_increment(2)
