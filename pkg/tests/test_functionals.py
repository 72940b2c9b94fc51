import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from plugboard.errors import InvalidPort, SlotNotCompound, TypeMismatch
from plugboard.evaluation import elaborate, run_fast
from plugboard.functionals import (
    apply,
    build_ackermann,
    comp_gadget,
    compose_at,
    compose_direct,
    copy,
    curry,
    iter_gadget,
    iter_unfold,
    rec_apply,
    rec_eval,
    rec_unfold,
    recursor,
    uncurry,
)
from plugboard.netgraph import Composite, Prim, validate
from plugboard.oracle import ack1, oracle_rec
from plugboard.primitives import prim_add, prim_const, prim_dup, prim_numeral, prim_succ
from plugboard.types import NAT, arrow, format_type

N = NAT
NN = arrow([N], [N])


def add_step():
    """c(k) = x -> x + k."""
    return curry(prim_add())


def test_apply_keeps_operands_as_composites():
    F = comp_gadget(N, N, N)
    c = apply(F, prim_succ())
    kinds = [b.kind for bid, b in c.boards.items() if bid != "shell"]
    assert all(isinstance(k, Composite) for k in kinds)
    assert format_type(c.interface_type) == "(N -> N) -> N -> N"


def test_apply_rejects_first_order_slot():
    with pytest.raises(SlotNotCompound):
        apply(prim_add(), prim_succ())
    with pytest.raises(SlotNotCompound):
        apply(iter_gadget(N), prim_succ(), slot=0)


def test_apply_rejects_wrong_argument_type():
    with pytest.raises(TypeMismatch):
        apply(comp_gadget(N, N, N), prim_add())


def test_apply_rejects_missing_slot():
    with pytest.raises(InvalidPort):
        apply(comp_gadget(N, N, N), prim_succ(), slot=5)


def test_comp_gadget_applied_twice_is_a_function():
    c = apply(comp_gadget(N, N, N), [prim_succ(), prim_const(3)])
    assert c.interface_type == NN
    assert run_fast(c, [10]) == [3]


def test_compose_direct():
    c = compose_direct(prim_dup(), prim_add())
    assert c.interface_type == NN
    assert run_fast(c, [6]) == [12]
    assert all(isinstance(b.kind, Prim) for bid, b in c.boards.items() if bid != "shell")


def test_compose_direct_mismatch():
    with pytest.raises(TypeMismatch):
        compose_direct(prim_succ(), prim_add())


def test_compose_at_remaining_ports():
    c = compose_at(prim_dup(), 1, prim_add(), 0)
    assert format_type(c.interface_type) == "(N;N) -> (N;N)"
    assert run_fast(c, [5, 2]) == [5, 7]
    with pytest.raises(InvalidPort):
        compose_at(prim_dup(), 2, prim_add(), 0)
    with pytest.raises(TypeMismatch):
        compose_at(prim_succ(), 0, iter_gadget(N), 1)


def test_copy_is_independent():
    a, b = copy(prim_add())
    assert a.interface_type == b.interface_type
    assert not (set(a.boards) - {"shell"}) & (set(b.boards) - {"shell"})


def test_curry_uncurry_inverse():
    c = curry(prim_add())
    assert format_type(c.interface_type) == "N -> N -> N"
    u = uncurry(c)
    assert u.interface_type == prim_add().interface_type
    assert run_fast(u, [3, 4]) == [7]
    with pytest.raises(TypeMismatch):
        curry(prim_succ())
    with pytest.raises(TypeMismatch):
        uncurry(prim_add())


def test_iter_unfold_structure():
    c = iter_unfold(4, prim_succ())
    f_boards = [b for b in c.boards.values() if isinstance(b.kind, Composite) and b.kind.body.name == "succ"]
    assert len(f_boards) == 4
    comps = [b for b in c.boards.values() if isinstance(b.kind, Composite) and b.kind.body.name == "comp"]
    assert len(comps) == 3
    assert validate(c) == []
    circuit = elaborate(c)
    assert sum(1 for b in circuit.boards.values() if b.kind == Prim("succ")) == 4


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.integers(1, 12), st.integers(1, 5))
def test_iter_unfold_matches_repeated_application(n, x, k):
    f = prim_const(k) if n % 3 == 0 else prim_succ()
    want = x
    for _ in range(n):
        want = k if n % 3 == 0 else want + 1
    assert run_fast(iter_unfold(n, f), [x]) == [want]


def test_iter_gadget_type():
    assert format_type(iter_gadget(N).interface_type) == "(N;N -> N) -> N -> N"
    with pytest.raises(ValueError):
        iter_unfold(0, prim_succ())
    with pytest.raises(TypeMismatch):
        iter_unfold(2, prim_add())


def test_recursor_type():
    assert format_type(recursor(N).interface_type) == "N -> (N -> N -> N) -> N -> N"


@pytest.mark.parametrize("k", range(1, 8))
def test_rec_unfold_and_rec_eval_agree_with_oracle(k):
    want = oracle_rec(2, lambda i: lambda x: x + i, k)
    assert rec_eval(2, add_step(), k) == want
    assert run_fast(rec_unfold(k, add_step()), [2]) == [want]


def test_rec_base_case_returns_a():
    assert rec_eval(5, add_step(), 1) == 5


def test_rec_rejects_bad_step():
    with pytest.raises(TypeMismatch):
        rec_apply(1, prim_add())
    with pytest.raises(ValueError):
        rec_eval(1, add_step(), 0)


def test_rec_with_numeral_board_argument():
    c = rec_apply(prim_numeral(1), add_step(), prim_numeral(4))
    assert run_fast(c, []) == [oracle_rec(1, lambda i: lambda x: x + i, 4)]


@pytest.mark.parametrize("m, n", [(1, 1), (2, 3), (3, 4), (4, 2)])
def test_ackermann_board(m, n):
    assert run_fast(build_ackermann(), [m, n]) == [ack1(m, n)]
