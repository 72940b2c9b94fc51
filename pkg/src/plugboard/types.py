"""Type algebra: naturals, products and multi-socket arrows, plus board layouts.

A type is rendered as a board of leaf ports.  Each leaf is named by a path of
selectors ``("in", i)``, ``("out", i)`` or ``("p", i)`` (product component).
A leaf is a receiver when the number of ``in`` selectors on its path is odd.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence, Union

from .errors import InvalidPort, TypeSyntaxError


@dataclass(frozen=True)
class Nat:
    def __repr__(self) -> str:
        return "N"


@dataclass(frozen=True)
class Product:
    components: tuple

    def __post_init__(self):
        if len(self.components) < 2:
            raise ValueError("a product needs at least two components")


@dataclass(frozen=True)
class Arrow:
    inputs: tuple
    outputs: tuple

    def __post_init__(self):
        if not self.outputs:
            raise ValueError("an arrow needs at least one output")


TypeExpr = Union[Nat, Product, Arrow]
NAT = Nat()

Selector = tuple  # (side, index) with side in {"in", "out", "p"}
PortPath = tuple  # tuple of selectors


def arrow(inputs: Sequence[TypeExpr], outputs: Sequence[TypeExpr]) -> Arrow:
    return Arrow(tuple(inputs), tuple(outputs))


def product(*components: TypeExpr) -> Product:
    return Product(tuple(components))


def spread(t: TypeExpr) -> tuple:
    """Port list for ``t`` at one side of an arrow: products become several ports."""
    if isinstance(t, Product):
        return t.components
    return (t,)


def gather(ports: Sequence[TypeExpr]) -> TypeExpr:
    """Inverse of :func:`spread` for non-empty port lists."""
    if len(ports) == 1:
        return ports[0]
    return Product(tuple(ports))


def type_equal(a: TypeExpr, b: TypeExpr) -> bool:
    return a == b


def is_first_order(t: TypeExpr) -> bool:
    """True when no arrow occurs strictly inside ``t``."""
    if isinstance(t, Arrow):
        return all(_arrow_free(x) for x in t.inputs + t.outputs)
    return _arrow_free(t)


def _arrow_free(t: TypeExpr) -> bool:
    if isinstance(t, Nat):
        return True
    if isinstance(t, Product):
        return all(_arrow_free(c) for c in t.components)
    return False


def order(t: TypeExpr) -> int:
    if isinstance(t, Nat):
        return 0
    if isinstance(t, Product):
        return max(order(c) for c in t.components)
    arg = max((order(x) for x in t.inputs), default=0)
    res = max(order(x) for x in t.outputs)
    return max(arg + 1, res, 1)


# --- ports -----------------------------------------------------------------


class Orientation(enum.Enum):
    EMITTER = "emitter"
    RECEIVER = "receiver"

    def flipped(self) -> "Orientation":
        return Orientation.RECEIVER if self is Orientation.EMITTER else Orientation.EMITTER


def orientation(path: PortPath) -> Orientation:
    flips = sum(1 for side, _ in path if side == "in")
    return Orientation.RECEIVER if flips % 2 else Orientation.EMITTER


def subtype(t: TypeExpr, path: PortPath) -> TypeExpr:
    """The type found at ``path`` inside ``t``; raises InvalidPort if absent."""
    for side, index in path:
        if side == "p" and isinstance(t, Product):
            items = t.components
        elif side == "in" and isinstance(t, Arrow):
            items = t.inputs
        elif side == "out" and isinstance(t, Arrow):
            items = t.outputs
        else:
            raise InvalidPort(f"selector {side}.{index} does not apply to {format_type(t)}")
        if not 0 <= index < len(items):
            raise InvalidPort(f"selector {side}.{index} out of range for {format_type(t)}")
        t = items[index]
    return t


def iter_leaves(t: TypeExpr, prefix: PortPath = ()) -> Iterator[PortPath]:
    """Depth-first enumeration of Nat leaves: inputs before outputs, left to right."""
    if isinstance(t, Nat):
        yield prefix
    elif isinstance(t, Product):
        for i, c in enumerate(t.components):
            yield from iter_leaves(c, prefix + (("p", i),))
    else:
        for i, c in enumerate(t.inputs):
            yield from iter_leaves(c, prefix + (("in", i),))
        for i, c in enumerate(t.outputs):
            yield from iter_leaves(c, prefix + (("out", i),))


def leaf_count(t: TypeExpr) -> int:
    return sum(1 for _ in iter_leaves(t))


@dataclass(frozen=True)
class LeafPort:
    path: PortPath
    base: Nat
    orientation: Orientation


@dataclass(frozen=True)
class BoardLayout:
    board_type: TypeExpr
    leaf_ports: tuple

    def paths(self) -> list:
        return [lp.path for lp in self.leaf_ports]

    def emitters(self) -> list:
        return [lp.path for lp in self.leaf_ports if lp.orientation is Orientation.EMITTER]

    def receivers(self) -> list:
        return [lp.path for lp in self.leaf_ports if lp.orientation is Orientation.RECEIVER]


@lru_cache(maxsize=4096)
def layout(t: TypeExpr) -> BoardLayout:
    ports = tuple(LeafPort(p, NAT, orientation(p)) for p in iter_leaves(t))
    return BoardLayout(t, ports)


@lru_cache(maxsize=4096)
def leaf_orientations(t: TypeExpr) -> dict:
    return {lp.path: lp.orientation for lp in layout(t).leaf_ports}


def format_path(path: PortPath) -> str:
    return ".".join(f"{side}.{index}" for side, index in path)


def parse_path(text: str) -> PortPath:
    if text == "":
        return ()
    parts = text.split(".")
    if len(parts) % 2:
        raise InvalidPort(f"malformed port path {text!r}")
    out = []
    for side, index in zip(parts[::2], parts[1::2]):
        if side not in ("in", "out", "p") or not index.isdigit():
            raise InvalidPort(f"malformed port path {text!r}")
        out.append((side, int(index)))
    return tuple(out)


# --- concrete syntax ---------------------------------------------------------
#
#   T    ::= atom ('->' T)?
#   atom ::= 'N' | '(' ')' | '(' T (';' T)* ')'
#
# A bare semicolon group on either side of an arrow lists several ports; any
# other group (or a single parenthesised type) is one port.


def format_type(t: TypeExpr) -> str:
    if isinstance(t, Nat):
        return "N"
    if isinstance(t, Product):
        return "(" + ";".join(format_type(c) for c in t.components) + ")"
    return _format_side(t.inputs, left=True) + " -> " + _format_side(t.outputs, left=False)


def _format_side(items: tuple, left: bool) -> str:
    if len(items) != 1:
        return "(" + ";".join(format_type(c) for c in items) + ")"
    (x,) = items
    if isinstance(x, Nat):
        return "N"
    if isinstance(x, Product) or (left and isinstance(x, Arrow)):
        return "(" + format_type(x) + ")"
    return format_type(x)


def parse_type(text: str) -> TypeExpr:
    parser = _TypeParser(text)
    node = parser.parse_t()
    parser.skip_ws()
    if parser.pos != len(text):
        raise TypeSyntaxError(f"unexpected {text[parser.pos]!r}", parser.pos)
    return _to_type(node, parser)


class _TypeParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        self.skip_ws()
        return self.text.startswith(s, self.pos)

    def expect(self, s: str):
        if not self.peek(s):
            found = self.text[self.pos] if self.pos < len(self.text) else "end of input"
            raise TypeSyntaxError(f"expected {s!r}, found {found!r}", self.pos)
        self.pos += len(s)

    def parse_t(self):
        start = self.pos
        lhs = self.parse_atom()
        if self.peek("->"):
            self.pos += 2
            rhs = self.parse_t()
            return ("arrow", lhs, rhs, start)
        return lhs

    def parse_atom(self):
        self.skip_ws()
        start = self.pos
        if self.peek("N"):
            self.pos += 1
            return ("nat", start)
        if self.peek("("):
            self.pos += 1
            if self.peek(")"):
                self.pos += 1
                return ("group", [], start)
            items = [self.parse_t()]
            while self.peek(";"):
                self.pos += 1
                items.append(self.parse_t())
            self.expect(")")
            if len(items) == 1:
                return ("paren", items[0], start)
            return ("group", items, start)
        found = self.text[self.pos] if self.pos < len(self.text) else "end of input"
        raise TypeSyntaxError(f"expected a type, found {found!r}", self.pos)


def _to_type(node, parser: _TypeParser) -> TypeExpr:
    tag = node[0]
    if tag == "nat":
        return NAT
    if tag == "paren":
        return _to_type(node[1], parser)
    if tag == "group":
        if not node[1]:
            raise TypeSyntaxError("empty group outside an arrow input", node[2])
        return Product(tuple(_to_type(x, parser) for x in node[1]))
    _, lhs, rhs, _start = node
    ins = _side(lhs, parser, allow_empty=True)
    outs = _side(rhs, parser, allow_empty=False)
    return Arrow(ins, outs)


def _side(node, parser, allow_empty: bool) -> tuple:
    if node[0] == "group":
        if not node[1] and not allow_empty:
            raise TypeSyntaxError("an arrow needs at least one output", node[2])
        return tuple(_to_type(x, parser) for x in node[1])
    return (_to_type(node, parser),)
