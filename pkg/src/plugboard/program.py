"""Reader and builder for ``.pbc`` construction programs.

A program is a sequence of ``(define <name> <expr>)`` forms in prefix
notation.  ``#`` starts a comment that runs to the end of the line.  Types
inside expressions are written as the atom ``N`` or as a quoted string such
as ``"(N;N) -> N"``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from . import functionals as fn
from . import primitives as prims
from .errors import CalculusError, ProgramError
from .functionals import as_construction
from .netgraph import Construction
from .types import NAT, Nat, TypeExpr, format_type, gather, parse_type

_TOKEN = re.compile(r'\s+|#[^\n]*|\(|\)|"[^"\n]*"|[^\s()"#]+|"')


@dataclass(frozen=True)
class Atom:
    text: str
    line: int


@dataclass
class Form:
    items: list
    line: int


def read(text: str) -> list:
    """Nested ``Form``/``Atom`` structure for every top-level form."""
    stack = [Form([], 0)]
    line = 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        tok = m.group(0)
        pos = m.end()
        if tok == "(":
            stack.append(Form([], line))
        elif tok == ")":
            if len(stack) == 1:
                raise ProgramError("unbalanced ')'", line)
            done = stack.pop()
            stack[-1].items.append(done)
        elif tok == '"':
            raise ProgramError("unterminated string", line)
        elif not tok[0].isspace() and tok[0] != "#":
            stack[-1].items.append(Atom(tok, line))
        line += tok.count("\n")
    if len(stack) > 1:
        raise ProgramError("missing ')'", stack[-1].line)
    return stack[0].items


@dataclass
class Definition:
    name: str
    value: object
    line: int

    @property
    def interface_type(self) -> TypeExpr:
        return self.value.interface_type


@dataclass
class Program:
    definitions: dict = field(default_factory=dict)

    def get(self, name: str = "main") -> Construction:
        if name not in self.definitions:
            raise ProgramError(f"program has no definition named {name!r}")
        return as_construction(self.definitions[name].value)

    def report(self) -> list:
        return [f"{d.name} : {format_type(d.interface_type)}" for d in self.definitions.values()]


def parse_program(text: str) -> Program:
    prog = Program()
    for form in read(text):
        if not isinstance(form, Form) or len(form.items) != 3 or not _is_atom(form.items[0], "define"):
            raise ProgramError("expected (define <name> <expr>)", _line(form))
        name = form.items[1]
        if not isinstance(name, Atom) or not _IDENT.fullmatch(name.text):
            raise ProgramError("definition name must be an identifier", form.line)
        if name.text in prog.definitions:
            raise ProgramError(f"{name.text!r} is already defined", form.line)
        if name.text in _ATOMS:
            raise ProgramError(f"{name.text!r} is a built-in name", form.line)
        value = _Builder(prog).build(form.items[2])
        if isinstance(value, Construction) and all(d.value is not value for d in prog.definitions.values()):
            value.name = name.text
        prog.definitions[name.text] = Definition(name.text, value, form.line)
    return prog


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*")


def _is_atom(x, text=None) -> bool:
    return isinstance(x, Atom) and (text is None or x.text == text)


def _line(x) -> int:
    return x.line


_ATOMS = {
    "succ": prims.prim_succ,
    "add": prims.prim_add,
    "dup": prims.prim_dup,
    "ackermann": fn.build_ackermann,
}


class _Builder:
    def __init__(self, prog: Program):
        self.prog = prog

    def build(self, x):
        try:
            return self._build(x)
        except ProgramError:
            raise
        except CalculusError as e:
            raise ProgramError(f"{type(e).__name__}: {e}", x.line) from e
        except ValueError as e:
            raise ProgramError(str(e), x.line) from e

    def _build(self, x):
        if isinstance(x, Atom):
            if x.text in _ATOMS:
                return _ATOMS[x.text]()
            if x.text in self.prog.definitions:
                return self.prog.definitions[x.text].value
            raise ProgramError(f"undefined name {x.text!r}", x.line)
        if not x.items or not isinstance(x.items[0], Atom):
            raise ProgramError("expected an operator", x.line)
        head, args = x.items[0].text, x.items[1:]
        handler = getattr(self, "op_" + head.replace("-", "_"), None)
        if handler is None:
            raise ProgramError(f"unknown operator {head!r}", x.line)
        return handler(x, args)

    # argument helpers

    def arity(self, x, args, *counts):
        if len(args) not in counts:
            want = " or ".join(map(str, counts))
            raise ProgramError(f"{x.items[0].text} takes {want} arguments, got {len(args)}", x.line)

    def nat(self, a, minimum=1) -> int:
        if not _is_atom(a) or not a.text.isdigit():
            raise ProgramError("expected a numeral literal", a.line)
        v = int(a.text)
        if v < minimum:
            raise ProgramError(f"expected an integer >= {minimum}, got {v}", a.line)
        return v

    def type_(self, a) -> TypeExpr:
        if not _is_atom(a):
            raise ProgramError("expected a type (N or a quoted type string)", a.line)
        text = a.text[1:-1] if a.text.startswith('"') else a.text
        try:
            return parse_type(text)
        except CalculusError as e:
            raise ProgramError(f"bad type {text!r}: {e}", a.line) from e

    def expr(self, a):
        return self.build(a)

    # forms

    def op_const(self, x, args):
        self.arity(x, args, 1)
        return prims.prim_const(self.nat(args[0]))

    def op_proj(self, x, args):
        self.arity(x, args, 2)
        return prims.prim_proj(self.nat(args[0]), self.nat(args[1]))

    def op_numeral(self, x, args):
        self.arity(x, args, 1)
        return prims.prim_numeral(self.nat(args[0]))

    def op_compose(self, x, args):
        self.arity(x, args, 2)
        return fn.compose_direct(self.expr(args[0]), self.expr(args[1]))

    def op_compose_at(self, x, args):
        self.arity(x, args, 4)
        f, i = self.expr(args[0]), self.nat(args[1], 0)
        g, j = self.expr(args[2]), self.nat(args[3], 0)
        return fn.compose_at(f, i, g, j)

    def op_product(self, x, args):
        self.arity(x, args, 2)
        return prims.product(as_construction(self.expr(args[0])), as_construction(self.expr(args[1])))

    def op_apply(self, x, args):
        if len(args) < 2:
            raise ProgramError("apply takes a functional and at least one argument", x.line)
        cur = as_construction(self.expr(args[0]))
        for a in args[1:]:
            cur = _discharge(cur, as_construction(self.expr(a)))
        return cur

    def op_comp(self, x, args):
        self.arity(x, args, 3)
        return fn.comp_gadget(*(self.type_(a) for a in args))

    def op_copy(self, x, args):
        self.arity(x, args, 1)
        return fn.copy(self.expr(args[0]))[1]

    def op_iter(self, x, args):
        self.arity(x, args, 1, 2)
        if len(args) == 1:
            return fn.iter_gadget(self.type_(args[0]))
        count, f = as_construction(self.expr(args[0])), as_construction(self.expr(args[1]))
        gadget = fn.iter_gadget(gather(fn._endo_ports(f)))
        return fn.apply(fn.compose_at(count, 0, gadget, 0), f)

    def op_rec(self, x, args):
        self.arity(x, args, 3, 4)
        t = self.type_(args[0])
        a, c = as_construction(self.expr(args[1])), as_construction(self.expr(args[2]))
        ports = fn._step_ports(c)
        if gather(ports) != t:
            raise ProgramError(
                f"step function works on {format_type(gather(ports))}, not {format_type(t)}", x.line)
        if len(ports) != 1:
            raise ProgramError("rec over several ports is only available from the Python API", x.line)
        k = as_construction(self.expr(args[3])) if len(args) == 4 else None
        return fn.rec_apply([a], c, k)

    def op_curry(self, x, args):
        self.arity(x, args, 1)
        return fn.curry(self.expr(args[0]))

    def op_uncurry(self, x, args):
        self.arity(x, args, 1)
        return fn.uncurry(self.expr(args[0]))

    def op_ackermann(self, x, args):
        self.arity(x, args, 2)
        m, n = self.nat(args[0]), self.nat(args[1])
        ack = fn.compose_at(prims.prim_numeral(m), 0, fn.build_ackermann(), 0)
        out = fn.compose_at(prims.prim_numeral(n), 0, ack, 0)
        out.name = f"ackermann({m},{n})"
        return out


def _discharge(F: Construction, g: Construction) -> Construction:
    """Feed ``g`` into the first socket of ``F`` it fits.

    A numeral source (``() -> N``) goes to the first N socket; anything else
    goes to the first compound socket.
    """
    gt = g.interface_type
    ft = F.interface_type
    if gt.inputs == () and gt.outputs == (NAT,):
        slot = next((i for i, t in enumerate(ft.inputs) if isinstance(t, Nat)), None)
        if slot is not None:
            return fn.compose_at(g, 0, F, slot)
    return fn.apply(F, g)


def load_program(path) -> Program:
    with open(path, encoding="utf-8") as fh:
        return parse_program(fh.read())


def expectations(text: str) -> list:
    """``# expect: 3;4 => 9`` lines as (inputs, outputs) pairs of integer lists."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        m = re.match(r"\s*#\s*expect:\s*(.*?)\s*=>\s*(.*?)\s*$", line)
        if m:
            out.append((parse_values(m.group(1), lineno), parse_values(m.group(2), lineno)))
    return out


def parse_values(text: str, line: Optional[int] = None) -> list:
    text = text.strip()
    if not text:
        return []
    values = []
    for part in text.split(";"):
        part = part.strip()
        if not part.isdigit() or int(part) < 1:
            raise ProgramError(f"expected positive integers separated by ';', got {text!r}", line)
        values.append(int(part))
    return values


def has_directive(text: str, name: str) -> bool:
    return re.search(rf"^\s*#\s*{re.escape(name)}\s*$", text, re.M) is not None

