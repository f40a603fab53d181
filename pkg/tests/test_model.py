from fractions import Fraction

import pytest

from negasm.model import (INF, Assembly, Glue, Tile, add_strength, bond_strength, canonicalize,
                          format_strength, is_connected, parse_strength, union)


def test_parse_and_format_round_trip():
    for text in ("7/8", "-5/8", "1/1", "0/1"):
        assert format_strength(parse_strength(text)) == text
    assert parse_strength("inf") is INF
    assert format_strength(INF) == "inf"
    assert parse_strength(2) == Fraction(2)


def test_floats_rejected():
    with pytest.raises(TypeError):
        parse_strength(0.5)


def test_inf_singleton_ordering_and_sum():
    assert INF > Fraction(10**9)
    assert not (INF < 5)
    assert INF == INF
    assert add_strength(INF, Fraction(-3)) is INF
    assert add_strength(Fraction(1, 2), Fraction(1, 4)) == Fraction(3, 4)


def test_glue_function_is_diagonal():
    a = Tile(e=Glue("x", "3/8"))
    b = Tile(w=Glue("x", "3/8"))
    c = Tile(w=Glue("y", "3/8"))
    assert bond_strength(a, "e", b) == Fraction(3, 8)
    assert bond_strength(a, "e", c) == 0
    assert bond_strength(a, "n", b) == 0


def test_negative_glue_bonds_negatively():
    a = Tile(e=Glue("x", "-5/8"))
    b = Tile(w=Glue("x", "-5/8"))
    assert bond_strength(a, "e", b) == Fraction(-5, 8)


def test_one_id_two_strengths_is_an_error():
    a = Tile(e=Glue("x", "3/8"))
    b = Tile(w=Glue("x", "1/8"))
    with pytest.raises(ValueError):
        bond_strength(a, "e", b)


def test_assembly_canonical_translation():
    t = Tile(name="t")
    a = Assembly({(3, 4): t, (4, 4): t})
    assert a.cells[0][0] == (0, 0)
    assert a == Assembly({(0, 0): t, (1, 0): t})
    assert hash(a) == hash(Assembly({(-7, 2): t, (-6, 2): t}))
    raw = a.translated(2, 2)
    assert not raw.canonical and canonicalize(raw) == a


def test_assembly_rejects_overlap_and_empty():
    t = Tile()
    with pytest.raises(ValueError):
        Assembly([((0, 0), t), ((0, 0), t)])
    with pytest.raises(ValueError):
        Assembly([])


def test_union_and_overlap():
    t = Tile(name="t")
    a = Assembly.single(t)
    assert len(union(a, a, 1, 0)) == 2
    with pytest.raises(ValueError):
        union(a, a, 0, 0)


def test_labels_and_connectivity():
    a = Assembly({(0, 0): Tile(label="L"), (1, 0): Tile()})
    assert a.has_label("L") and a.labels() == {"L"}
    assert is_connected([(0, 0), (0, 1)])
    assert not is_connected([(0, 0), (2, 0)])
