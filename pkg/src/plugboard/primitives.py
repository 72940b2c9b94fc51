"""Ready-made one-board constructions for the basic function inventory."""

from __future__ import annotations

from .errors import TypeMismatch
from .netgraph import SHELL, Construction, Numeral, Prim, canonical, embed, flatten, wrap_board
from .types import Arrow


def prim_succ() -> Construction:
    return wrap_board(Prim("succ"), name="succ")


def prim_const(k: int) -> Construction:
    """Constant ``k`` with one ignored N input."""
    if k < 1:
        raise ValueError(f"constants are positive numerals, got {k}")
    return wrap_board(Prim("const", (k,)), name=f"const:{k}")


def prim_proj(i: int, k: int) -> Construction:
    if not 1 <= i <= k:
        raise ValueError(f"projection index {i} outside 1..{k}")
    return wrap_board(Prim("proj", (i, k)), name=f"proj:{i}:{k}")


def prim_add() -> Construction:
    return wrap_board(Prim("add"), name="add")


def prim_dup() -> Construction:
    """Copy at type N: one value in, the value and its copy out."""
    return wrap_board(Prim("dup"), name="dup")


def prim_numeral(k: int) -> Construction:
    if k < 1:
        raise ValueError(f"numerals are positive, got {k}")
    return wrap_board(Numeral(k), name=f"numeral:{k}")


def product(f: Construction, g: Construction) -> Construction:
    """Side-by-side placement: ``(A;C) -> (B;D)`` from ``A -> B`` and ``C -> D``."""
    ft, gt = f.interface_type, g.interface_type
    c = Construction(Arrow(ft.inputs + gt.inputs, ft.outputs + gt.outputs),
                     f"product({f.name},{g.name})")
    fb = embed(c, f)
    gb = embed(c, g)
    for i in range(len(ft.inputs)):
        c.connect_groups(SHELL, (("in", i),), fb, (("in", i),))
    for i in range(len(gt.inputs)):
        c.connect_groups(SHELL, (("in", len(ft.inputs) + i),), gb, (("in", i),))
    for j in range(len(ft.outputs)):
        c.connect_groups(SHELL, (("out", j),), fb, (("out", j),))
    for j in range(len(gt.outputs)):
        c.connect_groups(SHELL, (("out", len(ft.outputs) + j),), gb, (("out", j),))
    return canonical(flatten(c, depth=1))


PRIMITIVE_NAMES = ("succ", "add", "dup")


def by_name(name: str) -> Construction:
    """Build a primitive from its serialized name, e.g. ``const:5`` or ``proj:1:2``."""
    parts = name.split(":")
    try:
        if parts == ["succ"]:
            return prim_succ()
        if parts == ["add"]:
            return prim_add()
        if parts == ["dup"]:
            return prim_dup()
        if parts[0] == "const" and len(parts) == 2:
            return prim_const(int(parts[1]))
        if parts[0] == "proj" and len(parts) == 3:
            return prim_proj(int(parts[1]), int(parts[2]))
        if parts[0] == "numeral" and len(parts) == 2:
            return prim_numeral(int(parts[1]))
    except ValueError as e:
        raise TypeMismatch(str(e)) from None
    raise TypeMismatch(f"unknown primitive {name!r}")
