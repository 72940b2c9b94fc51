"""Second-order layer: application, composition, copy, iteration and the recursor.

Every operation returns a new :class:`Construction`; inputs are never mutated.
``apply`` and ``iter_unfold`` keep their operands as composite boards so the
wiring between a functional and its argument stays visible; the first-order
combinators (``compose_direct``, ``compose_at``) inline their operands.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .errors import InvalidPort, SlotNotCompound, TypeMismatch
from .netgraph import (
    SHELL,
    Construction,
    Functional,
    Numeral,
    canonical,
    embed,
    flatten,
    fresh_copy,
    iter_type,
    rec_step_type,
    rec_type,
    wrap_board,
)
from .primitives import prim_numeral, prim_succ
from .types import NAT, Arrow, Nat, TypeExpr, format_type, gather, spread


@dataclass(frozen=True)
class FunctionalGadget:
    construction: Construction
    family: str
    params: tuple

    @property
    def interface_type(self):
        return self.construction.interface_type


Term = Union[Construction, FunctionalGadget]


def as_construction(x: Term) -> Construction:
    return x.construction if isinstance(x, FunctionalGadget) else x


def _interface(ins: Sequence[TypeExpr], outs: Sequence[TypeExpr]):
    """Result type and shell-path mapper; ``() -> (A -> C)`` collapses to ``A -> C``."""
    ins, outs = tuple(ins), tuple(outs)
    if not ins and len(outs) == 1 and isinstance(outs[0], Arrow):
        return outs[0], lambda path: tuple(path)[1:]
    return Arrow(ins, outs), lambda path: tuple(path)


def _socket(i):
    return (("in", i),)


def _plug(j):
    return (("out", j),)


# --- application --------------------------------------------------------------


def apply(F: Term, g, slot: int = None) -> Construction:
    """Discharge one compound socket of ``F`` with ``g`` (or several, left to right)."""
    if isinstance(g, (list, tuple)):
        result = as_construction(F)
        for arg in g:
            result = apply(result, arg)
        return result
    F, g = as_construction(F), as_construction(g)
    ft = F.interface_type
    if slot is None:
        slot = next((i for i, t in enumerate(ft.inputs) if isinstance(t, Arrow)), None)
        if slot is None:
            raise SlotNotCompound(f"{format_type(ft)} has no compound socket")
    if not 0 <= slot < len(ft.inputs):
        raise InvalidPort(f"socket {slot} out of range for {format_type(ft)}")
    wanted = ft.inputs[slot]
    if not isinstance(wanted, Arrow):
        raise SlotNotCompound(f"socket {slot} of {format_type(ft)} is first-order")
    if g.interface_type != wanted:
        raise TypeMismatch(
            f"socket {slot} expects {format_type(wanted)}, argument has {format_type(g.interface_type)}")

    rest = [t for i, t in enumerate(ft.inputs) if i != slot]
    rtype, path = _interface(rest, ft.outputs)
    c = Construction(rtype, f"apply({F.name},{g.name})")
    fb = embed(c, F, F.name or "F")
    gb = embed(c, g, g.name or "g")
    # socket A of the socket of F -> socket A of g; plug B of g -> plug of the socket of F
    c.connect_groups(fb, _socket(slot), gb, ())
    n = 0
    for i in range(len(ft.inputs)):
        if i != slot:
            c.connect_groups(SHELL, path(_socket(n)), fb, _socket(i))
            n += 1
    for j in range(len(ft.outputs)):
        c.connect_groups(SHELL, path(_plug(j)), fb, _plug(j))
    return c


# --- composition --------------------------------------------------------------


def _comp_construction(sa: tuple, sb: tuple, sc: tuple) -> Construction:
    ab, bc, ac = Arrow(sa, sb), Arrow(sb, sc), Arrow(sa, sc)
    c = Construction(Arrow((ab, bc), (ac,)), "comp")
    for k in range(len(sa)):
        c.connect_groups(SHELL, (("out", 0), ("in", k)), SHELL, (("in", 0), ("in", k)))
    for k in range(len(sb)):
        c.connect_groups(SHELL, (("in", 0), ("out", k)), SHELL, (("in", 1), ("in", k)))
    for k in range(len(sc)):
        c.connect_groups(SHELL, (("in", 1), ("out", k)), SHELL, (("out", 0), ("out", k)))
    return c


def comp_gadget(A: TypeExpr, B: TypeExpr, C: TypeExpr) -> FunctionalGadget:
    """Pure wiring of type ((A -> B); (B -> C)) -> (A -> C)."""
    return FunctionalGadget(_comp_construction(spread(A), spread(B), spread(C)), "comp", (A, B, C))


def compose_direct(f: Term, g: Term) -> Construction:
    """``x -> g(f(x))`` by linking each plug of ``f`` to the matching socket of ``g``."""
    f, g = as_construction(f), as_construction(g)
    ft, gt = f.interface_type, g.interface_type
    if ft.outputs != gt.inputs:
        raise TypeMismatch(
            f"cannot compose: {_ports(ft.outputs)} produced, {_ports(gt.inputs)} expected")
    rtype, path = _interface(ft.inputs, gt.outputs)
    c = Construction(rtype, f"compose({f.name},{g.name})")
    fb = embed(c, f, f.name or "f")
    gb = embed(c, g, g.name or "g")
    for i in range(len(ft.inputs)):
        c.connect_groups(SHELL, path(_socket(i)), fb, _socket(i))
    for j in range(len(ft.outputs)):
        c.connect_groups(fb, _plug(j), gb, _socket(j))
    for j in range(len(gt.outputs)):
        c.connect_groups(SHELL, path(_plug(j)), gb, _plug(j))
    return canonical(flatten(c, depth=1))


def _ports(items) -> str:
    if len(items) == 1:
        return format_type(items[0])
    return "(" + ";".join(format_type(t) for t in items) + ")"


def compose_at(f: Term, plug_index: int, g: Term, socket_index: int) -> Construction:
    """Link one N plug of ``f`` to one N socket of ``g``.

    Remaining sockets are ``f``'s followed by ``g``'s; remaining plugs likewise.
    """
    f, g = as_construction(f), as_construction(g)
    ft, gt = f.interface_type, g.interface_type
    if not 0 <= plug_index < len(ft.outputs):
        raise InvalidPort(f"plug {plug_index} out of range for {format_type(ft)}")
    if not 0 <= socket_index < len(gt.inputs):
        raise InvalidPort(f"socket {socket_index} out of range for {format_type(gt)}")
    pt, st = ft.outputs[plug_index], gt.inputs[socket_index]
    if pt != st or not isinstance(pt, Nat):
        raise TypeMismatch(f"plug {format_type(pt)} cannot feed socket {format_type(st)}")
    ins = list(ft.inputs) + [t for i, t in enumerate(gt.inputs) if i != socket_index]
    outs = [t for j, t in enumerate(ft.outputs) if j != plug_index] + list(gt.outputs)
    rtype, path = _interface(ins, outs)
    c = Construction(rtype, f"compose-at({f.name},{g.name})")
    fb = embed(c, f, f.name or "f")
    gb = embed(c, g, g.name or "g")
    c.connect_groups(fb, _plug(plug_index), gb, _socket(socket_index))
    n = 0
    for i in range(len(ft.inputs)):
        c.connect_groups(SHELL, path(_socket(n)), fb, _socket(i))
        n += 1
    for i in range(len(gt.inputs)):
        if i != socket_index:
            c.connect_groups(SHELL, path(_socket(n)), gb, _socket(i))
            n += 1
    n = 0
    for j in range(len(ft.outputs)):
        if j != plug_index:
            c.connect_groups(SHELL, path(_plug(n)), fb, _plug(j))
            n += 1
    for j in range(len(gt.outputs)):
        c.connect_groups(SHELL, path(_plug(n)), gb, _plug(j))
        n += 1
    return canonical(flatten(c, depth=1))


def identity(ports: Sequence[TypeExpr]) -> Construction:
    ports = tuple(ports)
    c = Construction(Arrow(ports, ports), "id")
    for i in range(len(ports)):
        c.connect_groups(SHELL, _socket(i), SHELL, _plug(i))
    return c


def curry(f: Term) -> Construction:
    """``(A;B...) -> C`` becomes ``A -> (B... -> C)``."""
    f = as_construction(f)
    ft = f.interface_type
    if len(ft.inputs) < 2:
        raise TypeMismatch(f"curry needs at least two sockets, got {format_type(ft)}")
    c = Construction(Arrow(ft.inputs[:1], (Arrow(ft.inputs[1:], ft.outputs),)), f"curry({f.name})")
    fb = embed(c, f, f.name or "f")
    c.connect_groups(SHELL, _socket(0), fb, _socket(0))
    for i in range(1, len(ft.inputs)):
        c.connect_groups(SHELL, (("out", 0), ("in", i - 1)), fb, _socket(i))
    for j in range(len(ft.outputs)):
        c.connect_groups(SHELL, (("out", 0), ("out", j)), fb, _plug(j))
    return canonical(flatten(c, depth=1))


def uncurry(f: Term) -> Construction:
    """``A -> (B... -> C)`` becomes ``(A;B...) -> C``."""
    f = as_construction(f)
    ft = f.interface_type
    if len(ft.inputs) != 1 or len(ft.outputs) != 1 or not isinstance(ft.outputs[0], Arrow):
        raise TypeMismatch(f"uncurry needs A -> (B -> C), got {format_type(ft)}")
    inner = ft.outputs[0]
    c = Construction(Arrow(ft.inputs + inner.inputs, inner.outputs), f"uncurry({f.name})")
    fb = embed(c, f, f.name or "f")
    c.connect_groups(SHELL, _socket(0), fb, _socket(0))
    for i in range(len(inner.inputs)):
        c.connect_groups(SHELL, _socket(i + 1), fb, (("out", 0), ("in", i)))
    for j in range(len(inner.outputs)):
        c.connect_groups(SHELL, _plug(j), fb, (("out", 0), ("out", j)))
    return canonical(flatten(c, depth=1))


# --- copy and iteration ----------------------------------------------------------


def copy(a: Term):
    """The original and a structurally identical copy with fresh board ids."""
    a = as_construction(a)
    return a, fresh_copy(a)


def iter_gadget(A: TypeExpr) -> FunctionalGadget:
    """Iter_A of type (N; (A -> A)) -> (A -> A) as a single functional board."""
    c = wrap_board(Functional("iter"), iter_type(spread(A)), name="iter")
    return FunctionalGadget(c, "iter", (A,))


def _endo_ports(f: Construction) -> tuple:
    ft = f.interface_type
    if ft.inputs != ft.outputs or not ft.inputs:
        raise TypeMismatch(f"expected a function A -> A, got {format_type(ft)}")
    return ft.inputs


def iter_unfold(n: int, f: Term) -> Construction:
    """n instances of ``f`` (the original plus n-1 copies) joined by n-1 comp gadgets."""
    f = as_construction(f)
    if n < 1:
        raise ValueError(f"iteration count must be a positive numeral, got {n}")
    ports = _endo_ports(f)
    c = Construction(f.interface_type, f"iter{n}({f.name})")
    instances = [embed(c, f, f.name or "f")]
    for _ in range(n - 1):
        instances.append(embed(c, copy(f)[1], f.name or "f"))
    if n == 1:
        c.connect_groups(SHELL, (), instances[0], ())
        return canonical(c)
    joint = _comp_construction(ports, ports, ports)
    acc = instances[0]
    acc_group = ()
    for inst in instances[1:]:
        comp = embed(c, joint, "comp")
        c.connect_groups(comp, _socket(0), acc, acc_group)
        c.connect_groups(comp, _socket(1), inst, ())
        acc, acc_group = comp, _plug(0)
    c.connect_groups(SHELL, (), acc, acc_group)
    return canonical(c)


# --- recursor ------------------------------------------------------------------


def recursor(A: TypeExpr) -> FunctionalGadget:
    """R^A of type A -> ((N -> (A -> A)) -> (N -> A)) as a single functional board."""
    c = wrap_board(Functional("rec"), rec_type(spread(A)), name="rec")
    return FunctionalGadget(c, "rec", (A,))


def _step_ports(c: Construction) -> tuple:
    ct = c.interface_type
    if (len(ct.inputs) != 1 or ct.inputs[0] != NAT or len(ct.outputs) != 1
            or not isinstance(ct.outputs[0], Arrow)):
        raise TypeMismatch(f"recursor step must have type N -> (A -> A), got {format_type(ct)}")
    ports = _endo_ports_of(ct.outputs[0])
    if ct != rec_step_type(ports):
        raise TypeMismatch(f"recursor step must have type N -> (A -> A), got {format_type(ct)}")
    return ports


def _endo_ports_of(t: Arrow) -> tuple:
    if t.inputs != t.outputs or not t.inputs:
        raise TypeMismatch(f"expected A -> A, got {format_type(t)}")
    return t.inputs


def rec_unfold(k: int, c: Term) -> Construction:
    """The function ``a -> c(k-1)(...c(1)(a))`` of type A -> A, built from copies of ``c``."""
    c = as_construction(c)
    if k < 1:
        raise ValueError(f"recursion index must be a positive numeral, got {k}")
    ports = _step_ports(c)
    if k == 1:
        return identity(ports)
    stages = [compose_at(prim_numeral(i), 0, c if i == 1 else copy(c)[1], 0) for i in range(1, k)]
    acc = stages[0]
    for stage in stages[1:]:
        acc = compose_direct(acc, stage)
    acc.name = f"rec{k}({c.name})"
    return acc


def rec_apply(a, c: Term, k=None) -> Construction:
    """R^A applied to ``a`` and ``c`` (and the numeral ``k`` when given).

    ``a`` supplies one item per port of A: an int or ``() -> N`` construction for
    an N port, a construction of the port's arrow type otherwise.
    """
    c = as_construction(c)
    ports = _step_ports(c)
    items = list(a) if isinstance(a, (list, tuple)) else [a]
    if len(items) != len(ports):
        raise TypeMismatch(f"A has {len(ports)} ports, got {len(items)} values")
    cur = recursor(gather(ports)).construction
    for port, item in zip(ports, items):
        if isinstance(port, Nat):
            source = prim_numeral(item) if isinstance(item, int) else as_construction(item)
            cur = compose_at(source, 0, cur, 0)
        else:
            cur = apply(cur, item, slot=0)
    cur = apply(cur, c, slot=0)
    if k is not None:
        source = prim_numeral(k) if isinstance(k, int) else as_construction(k)
        cur = compose_at(source, 0, cur, 0)
    return cur


def rec_eval(a, c: Term, k: int):
    """Value of ((R^A(a))(c))(k) under the denotational evaluator."""
    from .evaluation import run_fast

    if k < 1:
        raise ValueError(f"recursion index must be a positive numeral, got {k}")
    out = run_fast(rec_apply(a, c, k), [])
    return out[0] if len(out) == 1 else out


# --- Ackermann -------------------------------------------------------------------


def ackermann_step() -> Construction:
    """c(k)(h) = n -> Iter(n, h)(2), the same for every k."""
    h = Arrow((NAT,), (NAT,))
    step = Construction(rec_step_type((h,)), "ack_step")
    it = step.add_board(Functional("iter"), iter_type((NAT,)))
    two = step.add_board(Numeral(2))
    step.connect_groups(SHELL, (("out", 0), ("in", 0)), it, (("in", 1),))
    step.connect_groups(SHELL, (("out", 0), ("out", 0), ("in", 0)), it, (("in", 0),))
    step.connect_groups(two, (("out", 0),), it, (("out", 0), ("in", 0)))
    step.connect_groups(it, (("out", 0), ("out", 0)), SHELL, (("out", 0), ("out", 0), ("out", 0)))
    return step


def build_ackermann() -> Construction:
    """(m; n) -> Ack(m-1, n-1) + 1, via R^(N -> N) started at succ."""
    stages = rec_apply(prim_succ(), ackermann_step())
    ack = uncurry(stages)
    ack.name = "ackermann"
    return ack
