import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plugboard.errors import CycleError, InvalidPort, OrientationError, PortOccupied, SerializationError, TypeMismatch
from plugboard.evaluation import elaborate
from plugboard.functionals import compose_direct, iter_gadget, iter_unfold
from plugboard.netgraph import (
    SHELL,
    Composite,
    Construction,
    Functional,
    Numeral,
    Prim,
    add_board,
    add_link,
    canonical,
    check,
    deserialize,
    embed,
    flatten,
    fresh_copy,
    new_construction,
    serialize,
    to_dot,
    validate,
    wrap_board,
)
from plugboard.primitives import prim_add, prim_succ, product
from plugboard.types import NAT, arrow, parse_type

N = NAT
NN = arrow([N], [N])
IN0 = (("in", 0),)
IN1 = (("in", 1),)
OUT0 = (("out", 0),)


def two_succ_chain():
    c = new_construction(NN)
    a = add_board(c, Prim("succ"))
    b = add_board(c, Prim("succ"))
    add_link(c, (SHELL, IN0), (a, IN0))
    add_link(c, (a, OUT0), (b, IN0))
    add_link(c, (b, OUT0), (SHELL, OUT0))
    return c, a, b


def test_board_ids_are_unique_and_stable():
    c = new_construction(NN)
    assert add_board(c, Prim("succ")) == "succ1"
    assert add_board(c, Prim("succ")) == "succ2"
    assert add_board(c, Numeral(4)) == "num1"


def test_valid_chain_has_no_violations():
    c, _, _ = two_succ_chain()
    assert validate(c) == []


def test_link_must_run_emitter_to_receiver():
    c = new_construction(NN)
    a = add_board(c, Prim("succ"))
    with pytest.raises(OrientationError):
        add_link(c, (a, IN0), (SHELL, IN0))
    with pytest.raises(OrientationError):
        add_link(c, (a, OUT0), (SHELL, IN0))


def test_link_to_a_compound_group_is_a_type_mismatch():
    c = new_construction(NN)
    it = add_board(c, Functional("iter"), iter_gadget(N).interface_type)
    with pytest.raises(TypeMismatch):
        add_link(c, (SHELL, IN0), (it, IN1))


def test_unknown_port_is_invalid():
    c = new_construction(NN)
    a = add_board(c, Prim("succ"))
    with pytest.raises(InvalidPort):
        add_link(c, (SHELL, IN0), (a, IN1))


def test_double_fed_receiver():
    c = new_construction(arrow([N, N], [N]))
    a = add_board(c, Prim("succ"))
    add_link(c, (SHELL, IN0), (a, IN0))
    with pytest.raises(PortOccupied):
        add_link(c, (SHELL, IN1), (a, IN0))


def test_emitter_used_twice():
    c = new_construction(NN)
    a = add_board(c, Prim("add"))
    add_link(c, (SHELL, IN0), (a, IN0))
    with pytest.raises(PortOccupied):
        add_link(c, (SHELL, IN0), (a, IN1))


def test_two_board_cycle():
    c = new_construction(NN)
    a = add_board(c, Prim("succ"))
    b = add_board(c, Prim("succ"))
    add_link(c, (a, OUT0), (b, IN0))
    with pytest.raises(CycleError):
        add_link(c, (b, OUT0), (a, IN0))


def test_self_loop():
    c = new_construction(NN)
    a = add_board(c, Prim("succ"))
    with pytest.raises(CycleError):
        add_link(c, (a, OUT0), (a, IN0))


def test_validate_reports_unchecked_defects():
    c = new_construction(NN)
    a = add_board(c, Prim("succ"))
    b = add_board(c, Prim("succ"))
    c.add_link((a, OUT0), (b, IN0), check=False)
    c.add_link((b, OUT0), (a, IN0), check=False)
    c.add_link((SHELL, IN0), (a, IN0), check=False)
    kinds = {v.kind for v in validate(c)}
    assert kinds == {"CycleError", "FanInViolation"}
    with pytest.raises(PortOccupied):
        check(c)


def test_shell_failures_detected_and_cycles_named():
    c = new_construction(NN)
    a = add_board(c, Prim("succ"))
    b = add_board(c, Prim("succ"))
    c.add_link((a, OUT0), (b, IN0), check=False)
    c.add_link((b, OUT0), (a, IN0), check=False)
    (v,) = validate(c)
    assert v.kind == "CycleError" and set(v.endpoints) == {a, b}
    with pytest.raises(CycleError):
        check(c)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_growth_stays_acyclic(seed):
    """Grow a random DAG one link at a time, then try every back edge."""
    rng = random.Random(seed)
    c = new_construction(arrow([N], [N]))
    boards = [add_board(c, Prim(rng.choice(["succ", "add", "dup"]))) for _ in range(rng.randint(2, 8))]
    for _ in range(30):
        src_b, dst_b = rng.choice([SHELL] + boards), rng.choice(boards)
        src = (src_b, rng.choice(c.boards[src_b].layout.emitters() if src_b != SHELL else [IN0]))
        dst = (dst_b, rng.choice(c.boards[dst_b].layout.receivers()))
        try:
            add_link(c, src, dst)
        except (CycleError, PortOccupied):
            pass
        assert validate(c) == []
    # every link reversed through the boards must be refused as a loop
    for link in list(c.links):
        if link.src[0] == SHELL or link.dst[0] == SHELL or link.src[0] == link.dst[0]:
            continue
        back_src = (link.dst[0], c.boards[link.dst[0]].layout.emitters()[0])
        back_dst = (link.src[0], c.boards[link.src[0]].layout.receivers()[0])
        if c.target(back_src) is None and c.feeder(back_dst) is None:
            with pytest.raises(CycleError):
                add_link(c, back_src, back_dst)


def test_connect_groups_checks_types():
    c = new_construction(arrow([NN], [N]))
    a = add_board(c, Prim("add"))
    with pytest.raises(TypeMismatch):
        c.connect_groups(SHELL, IN0, a, ())


def test_flatten_inlines_composites():
    outer = new_construction(NN)
    inner, _, _ = two_succ_chain()
    box = embed(outer, inner, "twice")
    outer.connect_groups(SHELL, (), box, ())
    assert isinstance(outer.boards[box].kind, Composite)
    flat = flatten(outer)
    assert set(flat.boards) == {SHELL, f"{box}/succ1", f"{box}/succ2"}
    assert len(flat.links) == 3
    assert validate(flat) == []


def test_flatten_resolves_pass_through_wires():
    outer = new_construction(NN)
    ident = Construction(NN, "id")
    ident.connect_groups(SHELL, IN0, SHELL, OUT0)
    box = embed(outer, ident)
    s = add_board(outer, Prim("succ"))
    outer.connect_groups(SHELL, IN0, box, IN0)
    outer.connect_groups(box, OUT0, s, IN0)
    outer.connect_groups(s, OUT0, SHELL, OUT0)
    flat = flatten(outer)
    assert sorted(l.text() for l in flat.links) == [("shell/in.0", "succ1/in.0"), ("succ1/out.0", "shell/out.0")]


def test_canonical_ignores_construction_order():
    a, _, _ = two_succ_chain()
    b = new_construction(NN)
    y = add_board(b, Prim("succ"))
    x = add_board(b, Prim("succ"))
    add_link(b, (x, OUT0), (y, IN0))
    add_link(b, (y, OUT0), (SHELL, OUT0))
    add_link(b, (SHELL, IN0), (x, IN0))
    assert serialize(canonical(a)) == serialize(canonical(b))


def test_fresh_copy_shares_no_ids():
    c, _, _ = two_succ_chain()
    d = fresh_copy(c)
    assert set(c.boards) & set(d.boards) == {SHELL}
    assert validate(d) == []
    assert len(d.links) == len(c.links)


def test_serialization_shape():
    doc = json.loads(serialize(prim_succ()))
    assert list(doc) == ["format_version", "name", "interface_type", "boards", "links"]
    assert doc["boards"][1] == {"id": "succ1", "kind": "primitive:succ", "type": "N -> N"}
    assert doc["links"] == [{"from": "shell/in.0", "to": "succ1/in.0"}, {"from": "succ1/out.0", "to": "shell/out.0"}]


def test_round_trip_with_composites():
    outer = new_construction(NN, "outer")
    box = embed(outer, prim_succ(), "inc")
    outer.connect_groups(SHELL, (), box, ())
    text = serialize(outer)
    assert serialize(deserialize(text)) == text


@pytest.mark.parametrize(
    "mutate, where",
    [
        (lambda d: d.pop("links"), "document"),
        (lambda d: d["boards"][1].update(kind="primitive:sqrt"), "document.boards[1]"),
        (lambda d: d["boards"][1].update(type="(N;N) -> N"), "document.boards[1]"),
        (lambda d: d["links"].append({"from": "ghost/out.0", "to": "shell/out.0"}), "document.links[2]"),
        (lambda d: d["links"].append({"from": "succ1"}), "document.links[2]"),
        (lambda d: d.update(format_version="9"), "document"),
        (lambda d: d.update(interface_type="N ->"), "document.interface_type"),
    ],
)
def test_deserialize_names_the_bad_record(mutate, where):
    doc = json.loads(serialize(prim_succ()))
    mutate(doc)
    with pytest.raises(SerializationError) as err:
        deserialize(json.dumps(doc))
    assert str(err.value).startswith(where)


def test_deserialize_rejects_invalid_graphs_with_the_specific_error():
    doc = json.loads(serialize(prim_add()))
    doc["links"].append({"from": "shell/in.0", "to": "add1/in.1"})
    with pytest.raises(PortOccupied):
        deserialize(json.dumps(doc))


def test_dot_export_is_deterministic():
    a, _, _ = two_succ_chain()
    b, _, _ = two_succ_chain()
    assert to_dot(a) == to_dot(b)
    text = to_dot(a)
    assert text.startswith("digraph")
    assert '"shell":p_in_0 -> "succ1":p_in_0;' in text


def test_wrap_board_types_from_kind():
    c = wrap_board(Numeral(3))
    assert c.interface_type == parse_type("() -> N")
    assert validate(c) == []


def dot_counts(c):
    lines = to_dot(c).splitlines()
    nodes = [l for l in lines if l.strip().startswith('"') and "[label=" in l]
    edges = [l for l in lines if " -> " in l and "[label=" not in l]
    return len(nodes), len(edges)


def test_dot_counts_for_a_lone_board():
    c = new_construction(NN)
    add_board(c, Prim("succ"))
    assert dot_counts(c) == (2, 0)


def test_dot_counts_for_h():
    h = compose_direct(product(prim_succ(), prim_succ()), prim_add())
    assert dot_counts(h) == (4, 5)


def test_dot_counts_for_iter4():
    unfolded = iter_unfold(4, prim_succ())
    assert dot_counts(unfolded) == (4 + 3 + 1, len(unfolded.links))
    assert dot_counts(elaborate(unfolded)) == (5, 5)
