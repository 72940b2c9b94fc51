import pytest

from plugboard.errors import TypeMismatch
from plugboard.evaluation import run_fast
from plugboard.netgraph import validate
from plugboard.primitives import by_name, prim_add, prim_const, prim_dup, prim_numeral, prim_proj, prim_succ, product
from plugboard.types import format_type


@pytest.mark.parametrize(
    "c, text, inputs, outputs",
    [
        (prim_succ(), "N -> N", [4], [5]),
        (prim_add(), "(N;N) -> N", [3, 4], [7]),
        (prim_dup(), "N -> (N;N)", [6], [6, 6]),
        (prim_const(5), "N -> N", [9], [5]),
        (prim_proj(2, 3), "(N;N;N) -> N", [7, 8, 9], [8]),
        (prim_numeral(3), "() -> N", [], [3]),
    ],
)
def test_primitive_types_and_values(c, text, inputs, outputs):
    assert format_type(c.interface_type) == text
    assert validate(c) == []
    assert run_fast(c, inputs) == outputs


@pytest.mark.parametrize("bad", [lambda: prim_const(0), lambda: prim_proj(0, 2), lambda: prim_proj(3, 2), lambda: prim_numeral(0)])
def test_out_of_range_parameters(bad):
    with pytest.raises(ValueError):
        bad()


def test_product_places_side_by_side():
    c = product(prim_succ(), prim_add())
    assert format_type(c.interface_type) == "(N;N;N) -> (N;N)"
    assert run_fast(c, [1, 2, 3]) == [2, 5]
    assert validate(c) == []


def test_by_name_round_trips_serialized_names():
    for name in ["succ", "add", "dup", "const:4", "proj:1:2", "numeral:7"]:
        assert by_name(name).name == name
    with pytest.raises(TypeMismatch):
        by_name("sqrt")
    with pytest.raises(TypeMismatch):
        by_name("const:0")
