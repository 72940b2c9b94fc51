"""Two semantics for constructions and the elaborator that links them.

``run_fast`` is a demand-driven denotational evaluator over arbitrary
constructions: a value arriving at a compound socket is a Python callable
realised by the graph region wired to that socket.  ``run_tokens`` pushes
unary spike bursts through an elaborated first-order circuit, firing each
board once all of its input bursts have arrived.  ``elaborate`` turns a
construction into such a circuit by inlining composites and unfolding every
Iter/recursor board whose count is a literal numeral.
"""

from __future__ import annotations

import heapq
import re
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .errors import (
    DanglingReceiver,
    ElaborationError,
    InputMismatch,
    MissingNumeral,
    NonClosedRegion,
    UnresolvedFunctional,
)
from .netgraph import (
    SHELL,
    Board,
    Composite,
    Construction,
    Functional,
    Numeral,
    Prim,
    canonical,
    embed,
    end_text,
    flatten,
    validate,
)
from .spikecodec import DEFAULT_CONFIG, BurstConfig, decode, encode
from .types import Arrow, Nat, Orientation, Product, TypeExpr, format_type, is_first_order, iter_leaves, subtype

_RECURSION_FLOOR = 20000


@contextmanager
def _deep_stack():
    old = sys.getrecursionlimit()
    if old < _RECURSION_FLOOR:
        sys.setrecursionlimit(_RECURSION_FLOOR)
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


def prim_apply(kind, args: Sequence[int]) -> list:
    if isinstance(kind, Numeral):
        return [kind.value]
    name = kind.name
    if name == "succ":
        return [args[0] + 1]
    if name == "add":
        return [args[0] + args[1]]
    if name == "dup":
        return [args[0], args[0]]
    if name == "const":
        return [kind.args[0]]
    if name == "proj":
        return [args[kind.args[0] - 1]]
    raise ElaborationError(f"unknown primitive {name!r}")


# --- denotational evaluator ---------------------------------------------------


@dataclass(frozen=True)
class Closure:
    """A function value returned by ``run_fast``; call it with one value per socket."""

    type: Arrow
    fn: Callable

    def __call__(self, *args):
        return [_wrap(t, v) for t, v in zip(self.type.outputs, self.fn([_unwrap(a) for a in args]))]

    def __repr__(self):
        return f"<fn : {format_type(self.type)}>"


def _wrap(t, v):
    if isinstance(t, Arrow):
        return Closure(t, v)
    if isinstance(t, Product):
        return tuple(_wrap(c, x) for c, x in zip(t.components, v))
    return v


def _unwrap(v):
    if isinstance(v, Closure):
        return v.fn
    if isinstance(v, tuple):
        return tuple(_unwrap(x) for x in v)
    return v


class _Frame:
    __slots__ = ("parent", "bindings", "cache")

    def __init__(self, parent, bindings):
        self.parent = parent
        self.bindings = bindings
        self.cache = {}


class _Denotation:
    """Callable denotation of one construction."""

    def __init__(self, c: Construction):
        self.c = c
        self.fns = {}

    def __call__(self, args: list) -> list:
        t = self.c.interface_type
        frame = _Frame(None, {(SHELL, (("in", i),)): a for i, a in enumerate(args)})
        return [self.receive(SHELL, (("out", j),), o, frame) for j, o in enumerate(t.outputs)]

    def receive(self, board: str, path: tuple, t: TypeExpr, frame: _Frame):
        if isinstance(t, Nat):
            src = self.c.feeder((board, path))
            if src is None:
                raise DanglingReceiver(f"{end_text((board, path))} has no feeder")
            return self.emit(src, frame)
        if isinstance(t, Product):
            return tuple(self.receive(board, path + (("p", i),), x, frame) for i, x in enumerate(t.components))

        def fn(args, board=board, path=path, t=t, frame=frame):
            if len(args) != len(t.inputs):
                raise InputMismatch(f"{format_type(t)} takes {len(t.inputs)} arguments, got {len(args)}")
            inner = _Frame(frame, {(board, path + (("in", i),)): a for i, a in enumerate(args)})
            return [self.receive(board, path + (("out", j),), o, inner) for j, o in enumerate(t.outputs)]

        return fn

    def emit(self, end, frame: _Frame):
        board, path = end
        hit = _lookup(board, path, frame)
        if hit is not None:
            depth, value = hit
            return self.project(board, path[:depth], value, path[depth:], frame)
        if board == SHELL or path[0][0] != "out":
            raise ElaborationError(f"{end_text(end)} carries no value outside a call")
        outs = self.outputs(board, frame)
        return self.project(board, path[:1], outs[path[0][1]], path[1:], frame)

    def project(self, board, base, value, rest, frame):
        btype = self.c.boards[board].type
        while rest:
            side, i = rest[0]
            if side == "p":
                value = value[i]
            elif side == "out":
                t = subtype(btype, base)
                key = ("call", board, base)
                if key not in frame.cache:
                    args = [self.receive(board, base + (("in", k),), x, frame) for k, x in enumerate(t.inputs)]
                    frame.cache[key] = value(args)
                value = frame.cache[key][i]
            else:
                raise ElaborationError(f"{end_text((board, base + rest))} carries no value outside a call")
            base = base + (rest[0],)
            rest = rest[1:]
        return value

    def outputs(self, board: str, frame: _Frame) -> list:
        key = ("board", board)
        if key not in frame.cache:
            b = self.c.boards[board]
            args = [self.receive(board, (("in", i),), t, frame) for i, t in enumerate(b.type.inputs)]
            frame.cache[key] = self.board_fn(b)(args)
        return frame.cache[key]

    def board_fn(self, b: Board):
        fn = self.fns.get(b.id)
        if fn is None:
            fn = self.fns[b.id] = _board_fn(b)
        return fn


def _lookup(board, path, frame):
    best = None
    f = frame
    while f is not None:
        for depth in range(len(path), -1, -1):
            if best is not None and depth <= best[0]:
                break
            key = (board, path[:depth])
            if key in f.bindings:
                best = (depth, f.bindings[key])
                break
        f = f.parent
    return best


def _board_fn(b: Board):
    kind = b.kind
    if isinstance(kind, (Prim, Numeral)):
        return lambda args, kind=kind: prim_apply(kind, args)
    if isinstance(kind, Composite):
        return _Denotation(kind.body)
    if isinstance(kind, Functional) and kind.name == "iter":
        return _iterate
    if isinstance(kind, Functional) and kind.name == "rec":
        return _recurse
    raise ElaborationError(f"board {b.id} has no denotation")


def _iterate(args):
    n, f = args

    def iterated(xs):
        for _ in range(n):
            xs = f(xs)
        return xs

    return [iterated]


def _recurse(a):
    def with_step(cs):
        (c,) = cs

        def at(ks):
            (k,) = ks
            acc = list(a)
            for i in range(1, k):
                acc = c([i])[0](acc)
            return acc

        return [at]

    return [with_step]


def _check_value(t: TypeExpr, v, where: str):
    if isinstance(t, Nat):
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise InputMismatch(f"{where}: expected a positive numeral, got {v!r}")
    elif isinstance(t, Product):
        if not isinstance(v, tuple) or len(v) != len(t.components):
            raise InputMismatch(f"{where}: expected a {len(t.components)}-tuple for {format_type(t)}")
        for i, (c, x) in enumerate(zip(t.components, v)):
            _check_value(c, x, f"{where}.{i}")
    elif not callable(v):
        raise InputMismatch(f"{where}: expected a function of type {format_type(t)}")


def run_fast(c: Construction, inputs: Sequence) -> list:
    t = c.interface_type
    inputs = list(inputs)
    if len(inputs) != len(t.inputs):
        raise InputMismatch(f"{format_type(t)} takes {len(t.inputs)} inputs, got {len(inputs)}")
    for i, (it, v) in enumerate(zip(t.inputs, inputs)):
        _check_value(it, v, f"input {i}")
    with _deep_stack():
        outs = _Denotation(c)([_unwrap(v) for v in inputs])
    return [_wrap(o, v) for o, v in zip(t.outputs, outs)]


def denotation(c: Construction) -> Closure:
    return Closure(c.interface_type, _Denotation(c))


# --- elaboration ---------------------------------------------------------------


def elaborate(c: Construction) -> Construction:
    if not is_first_order(c.interface_type):
        raise UnresolvedFunctional(f"interface {format_type(c.interface_type)} is not first-order")
    problems = validate(c)
    if problems:
        raise ElaborationError(f"invalid construction: {problems[0]}")
    g = flatten(c)
    while True:
        pending = g.functionals()
        if not pending:
            break
        ready = [b for b in pending if _count_numeral(g, b) is not None]
        if not ready:
            b = pending[0]
            raise MissingNumeral(
                f"{g.boards[b].kind.name} board {b}: count socket {end_text(_count_end(g, b))} "
                "is not fed by a numeral")
        g = _expand(g, ready[0])
    g = _prune(g)
    for bid, board in g.boards.items():
        for r in board.layout.paths():
            end = (bid, r)
            if g.orientation_of(end) is Orientation.RECEIVER and g.feeder(end) is None:
                raise DanglingReceiver(f"{end_text(end)} has no feeder")
    out = canonical(g)
    out.name = c.name
    return out


def _count_end(g: Construction, bid: str):
    kind = g.boards[bid].kind
    if kind.name == "iter":
        return (bid, (("in", 0),))
    return (bid, (("out", 0), ("out", 0), ("in", 0)))


def _count_numeral(g: Construction, bid: str) -> Optional[int]:
    src = g.feeder(_count_end(g, bid))
    if src is None:
        return None
    kind = g.boards[src[0]].kind
    return kind.value if isinstance(kind, Numeral) else None


def extract_region(g: Construction, bid: str, group: tuple):
    """The argument wired to compound socket ``group`` of ``bid``, as a construction."""
    from .netgraph import Construction as _C

    t = subtype(g.boards[bid].type, group)
    n = len(group)

    def inside(end):
        return end[0] == bid and end[1][:n] == group

    region = set()
    frontier = []

    def visit(end):
        other = g.feeder(end) or g.target(end)
        if other is None:
            return
        if other[0] == bid:
            if not inside(other):
                raise NonClosedRegion(f"argument at {end_text((bid, group))} feeds the functional elsewhere")
            return
        if other[0] == SHELL:
            raise NonClosedRegion(f"argument at {end_text((bid, group))} reaches the construction interface")
        if other[0] not in region:
            region.add(other[0])
            frontier.append(other[0])

    for q in iter_leaves(t):
        visit((bid, group + q))
    while frontier:
        y = frontier.pop()
        for p in g.boards[y].layout.paths():
            visit((y, p))

    r = _C(t, "arg")
    for y in sorted(region):
        b = g.boards[y]
        r.boards[y] = Board(y, b.kind, b.type)
    r._touch()

    def local(end):
        return (SHELL, end[1][n:]) if inside(end) else end

    for link in g.links:
        if link.src[0] in region or link.dst[0] in region or (inside(link.src) and inside(link.dst)):
            r.add_link(local(link.src), local(link.dst), check=False)
    return r, region


def _expand(g: Construction, bid: str) -> Construction:
    from .functionals import iter_unfold, rec_unfold

    board = g.boards[bid]
    count_src = g.feeder(_count_end(g, bid))
    count = g.boards[count_src[0]].kind.value
    t = board.type
    if board.kind.name == "iter":
        fn, region = extract_region(g, bid, (("in", 1),))
        unfolded = iter_unfold(count, fn)
        moves = [((("out", 0),), ())]
    else:
        fn, region = extract_region(g, bid, (("out", 0), ("in", 0)))
        unfolded = rec_unfold(count, fn)
        ports = t.inputs
        moves = [((("in", i),), (("in", i),)) for i in range(len(ports))]
        moves += [((("out", 0), ("out", 0), ("out", j)), (("out", j),)) for j in range(len(ports))]
    h = flatten(g, depth=0)
    zid = embed(h, unfolded, "unfold")
    for xgroup, zgroup in moves:
        for q in iter_leaves(subtype(t, xgroup)):
            h.rewire((bid, xgroup + q), (zid, zgroup + q))
    for y in sorted(region) + [count_src[0], bid]:
        if y in h.boards:
            h.remove_board(y)
    return flatten(h)


def _live_boards(g: Construction) -> set:
    live = set()
    shell = g.shell()
    stack = [(SHELL, r) for r in shell.layout.paths() if g.orientation_of((SHELL, r)) is Orientation.RECEIVER]
    seen = set()
    while stack:
        end = stack.pop()
        src = g.feeder(end)
        if src is None or src[0] == SHELL:
            continue
        if src[0] not in live:
            live.add(src[0])
            deps = g.board_deps(src[0])
            for r, es in deps.items():
                if src[1] in es and (src[0], r) not in seen:
                    seen.add((src[0], r))
                    stack.append((src[0], r))
        else:
            deps = g.board_deps(src[0])
            for r, es in deps.items():
                if src[1] in es and (src[0], r) not in seen:
                    seen.add((src[0], r))
                    stack.append((src[0], r))
    return live


def _prune(g: Construction) -> Construction:
    live = _live_boards(g)
    for bid in sorted(set(g.boards) - live - {SHELL}):
        g.remove_board(bid)
    return g


# --- token semantics --------------------------------------------------------------


@dataclass(frozen=True)
class TraceEvent:
    step: int
    board: str
    inputs: tuple
    outputs: tuple

    def text(self) -> str:
        ins = ",".join(map(str, self.inputs))
        outs = ",".join(map(str, self.outputs))
        return f"step={self.step} board={self.board} in={ins} out={outs}"


@dataclass
class Trace:
    events: list = field(default_factory=list)

    def __len__(self):
        return len(self.events)

    def to_text(self) -> str:
        return "".join(e.text() + "\n" for e in self.events)


_fire = prim_apply


def _natural_key(s: str):
    return [int(x) if x.isdigit() else x for x in re.split(r"(\d+)", s)]


def _check_circuit(circ: Construction):
    if not is_first_order(circ.interface_type):
        raise UnresolvedFunctional(f"interface {format_type(circ.interface_type)} is not first-order")
    for bid, b in circ.boards.items():
        if bid != SHELL and not isinstance(b.kind, (Prim, Numeral)):
            raise UnresolvedFunctional(f"board {bid} ({type(b.kind).__name__}) must be elaborated first")


def run_tokens(circ: Construction, inputs: Sequence[int], cfg: BurstConfig = DEFAULT_CONFIG):
    """Fire every live board once its input bursts are present; returns (outputs, trace)."""
    _check_circuit(circ)
    shell = circ.shell()
    sources = [p for p in shell.layout.paths() if circ.orientation_of((SHELL, p)) is Orientation.EMITTER]
    sinks = [p for p in shell.layout.paths() if circ.orientation_of((SHELL, p)) is Orientation.RECEIVER]
    inputs = list(inputs)
    if len(inputs) != len(sources):
        raise InputMismatch(f"circuit takes {len(sources)} numerals, got {len(inputs)}")
    for v in inputs:
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise InputMismatch(f"expected a positive numeral, got {v!r}")

    live = _live_boards(circ)
    for bid in sorted(live, key=_natural_key):
        for r in circ.boards[bid].layout.receivers():
            if circ.feeder((bid, r)) is None:
                raise DanglingReceiver(f"{end_text((bid, r))} has no feeder")
    for p in sinks:
        if circ.feeder((SHELL, p)) is None:
            raise DanglingReceiver(f"{end_text((SHELL, p))} has no feeder")

    tokens = {}
    waiting = {bid: len(circ.boards[bid].layout.receivers()) for bid in live}
    ready = []

    def deliver(src, value):
        dst = circ.target(src)
        if dst is None:
            return
        tokens[dst] = encode([value], cfg)
        if dst[0] in waiting:
            waiting[dst[0]] -= 1
            if waiting[dst[0]] == 0:
                heapq.heappush(ready, (_natural_key(dst[0]), dst[0]))

    for bid, n in waiting.items():
        if n == 0:
            heapq.heappush(ready, (_natural_key(bid), bid))
    for p, v in zip(sources, inputs):
        deliver((SHELL, p), v)

    trace = Trace()
    while ready:
        _, bid = heapq.heappop(ready)
        board = circ.boards[bid]
        args = []
        for r in board.layout.receivers():
            (value,) = decode(tokens.pop((bid, r)), cfg)
            args.append(value)
        outs = _fire(board.kind, args)
        trace.events.append(TraceEvent(len(trace.events) + 1, bid, tuple(args), tuple(outs)))
        for e, v in zip(board.layout.emitters(), outs):
            deliver((bid, e), v)

    outputs = []
    for p in sinks:
        (value,) = decode(tokens[(SHELL, p)], cfg)
        outputs.append(value)
    return outputs, trace


def flat_values(values: Sequence) -> list:
    out = []
    for v in values:
        if isinstance(v, tuple):
            out.extend(flat_values(v))
        else:
            out.append(v)
    return out


def agree(c: Construction, inputs: Sequence, circuit: Optional[Construction] = None,
          cfg: BurstConfig = DEFAULT_CONFIG) -> bool:
    """True iff both semantics give the same outputs on ``inputs``."""
    fast = flat_values(run_fast(c, inputs))
    circ = circuit if circuit is not None else elaborate(c)
    tok, _ = run_tokens(circ, flat_values(inputs), cfg)
    return fast == tok
