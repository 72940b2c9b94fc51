"""Boards, links and constructions.

A :class:`Construction` is a set of boards joined by directed links between
Nat leaf ports.  Its own type is materialised as the ``shell`` board, whose
inner face has every orientation flipped: an input socket of the construction
is an emitter on the inside.  Acyclicity is checked on the port graph (links
plus each board's internal input-to-output dependencies), which is what lets
a functional's compound socket be wired both ways to its argument.
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from .errors import (
    CycleError,
    InvalidPort,
    OrientationError,
    PortOccupied,
    SerializationError,
    TypeMismatch,
)
from .types import (
    NAT,
    Arrow,
    Nat,
    Orientation,
    TypeExpr,
    arrow,
    format_path,
    format_type,
    iter_leaves,
    layout,
    leaf_orientations,
    parse_path,
    parse_type,
    subtype,
)

SHELL = "shell"
FORMAT_VERSION = "1"

End = tuple  # (board id, port path)


# --- board kinds -------------------------------------------------------------


@dataclass(frozen=True)
class Prim:
    name: str  # succ | add | dup | const | proj
    args: tuple = ()


@dataclass(frozen=True)
class Numeral:
    value: int


@dataclass(frozen=True)
class Functional:
    name: str  # iter | rec


@dataclass(frozen=True, eq=False)
class Composite:
    name: str
    body: "Construction"


@dataclass(frozen=True)
class Shell:
    pass


def iter_type(ports: tuple) -> Arrow:
    """(N; (A -> A)) -> (A -> A) with A given as its port list."""
    endo = Arrow(tuple(ports), tuple(ports))
    return Arrow((NAT, endo), (endo,))


def rec_step_type(ports: tuple) -> Arrow:
    return Arrow((NAT,), (Arrow(tuple(ports), tuple(ports)),))


def rec_type(ports: tuple) -> Arrow:
    """A -> ((N -> (A -> A)) -> (N -> A)) with A given as its port list."""
    inner = Arrow((rec_step_type(ports),), (Arrow((NAT,), tuple(ports)),))
    return Arrow(tuple(ports), (inner,))


# path of the group a functional finally hands back to its caller
FINAL_GROUP = {"iter": (("out", 0),), "rec": (("out", 0), ("out", 0))}


def kind_type(kind) -> TypeExpr:
    if isinstance(kind, Numeral):
        return Arrow((), (NAT,))
    if isinstance(kind, Prim):
        if kind.name == "add":
            return arrow([NAT, NAT], [NAT])
        if kind.name == "dup":
            return arrow([NAT], [NAT, NAT])
        if kind.name == "proj":
            return Arrow((NAT,) * kind.args[1], (NAT,))
        return arrow([NAT], [NAT])
    raise TypeError(f"kind {kind!r} has no intrinsic type")


def kind_string(kind) -> str:
    if isinstance(kind, Prim):
        return ":".join(["primitive", kind.name, *map(str, kind.args)])
    if isinstance(kind, Numeral):
        return f"numeral:{kind.value}"
    if isinstance(kind, Functional):
        return f"functional:{kind.name}"
    if isinstance(kind, Composite):
        return f"composite:{kind.name}"
    return "shell"


def kind_stem(kind) -> str:
    if isinstance(kind, Prim):
        return kind.name
    if isinstance(kind, Numeral):
        return "num"
    if isinstance(kind, Functional):
        return kind.name
    if isinstance(kind, Composite):
        return "c_" + (re.sub(r"[^A-Za-z0-9_]", "", kind.name) or "box")
    return SHELL


def _check_prim(kind: Prim):
    arity = {"succ": 0, "add": 0, "dup": 0, "const": 1, "proj": 2}
    if kind.name not in arity or len(kind.args) != arity[kind.name]:
        raise ValueError(f"unknown primitive {kind_string(kind)!r}")
    if kind.name == "const" and kind.args[0] < 1:
        raise ValueError("constants are positive numerals")
    if kind.name == "proj" and not 1 <= kind.args[0] <= kind.args[1]:
        raise ValueError(f"projection index {kind.args[0]} outside 1..{kind.args[1]}")


# --- graph -------------------------------------------------------------------


@dataclass(frozen=True)
class Board:
    id: str
    kind: object
    type: TypeExpr

    @cached_property
    def layout(self):
        return layout(self.type)

    @cached_property
    def orientations(self) -> dict:
        return leaf_orientations(self.type)


@dataclass(frozen=True)
class Link:
    src: End
    dst: End

    def text(self) -> tuple:
        return (end_text(self.src), end_text(self.dst))


def end_text(end: End) -> str:
    return f"{end[0]}/{format_path(end[1])}"


@dataclass
class Violation:
    kind: str
    message: str
    endpoints: tuple = ()

    def __str__(self):
        return f"{self.kind}: {self.message}"


class Construction:
    def __init__(self, interface_type: TypeExpr, name: Optional[str] = None):
        if not isinstance(interface_type, Arrow):
            raise TypeMismatch(f"a construction interface must be an arrow, got {format_type(interface_type)}")
        self.interface_type = interface_type
        self.name = name
        self.boards: dict = {SHELL: Board(SHELL, Shell(), interface_type)}
        self.links: list = []
        self._feeder: dict = {}
        self._target: dict = {}
        self._version = 0
        self._deps_cache: dict = {}

    def __repr__(self):
        return (
            f"Construction({self.name!r}, {format_type(self.interface_type)}, "
            f"boards={len(self.boards)}, links={len(self.links)})"
        )

    # building

    def add_board(self, kind, board_type: Optional[TypeExpr] = None, board_id: Optional[str] = None) -> str:
        if isinstance(kind, Prim):
            _check_prim(kind)
        if isinstance(kind, Numeral) and kind.value < 1:
            raise ValueError("numerals are positive")
        if isinstance(kind, Shell):
            raise ValueError("a construction has exactly one shell")
        if board_type is None:
            board_type = kind.body.interface_type if isinstance(kind, Composite) else kind_type(kind)
        if not isinstance(board_type, Arrow):
            raise TypeMismatch(f"board type must be an arrow, got {format_type(board_type)}")
        if board_id is None:
            stem = kind_stem(kind)
            n = 1
            # skip ids that an earlier flatten used as a scope prefix
            while f"{stem}{n}" in self.boards or any(b.startswith(f"{stem}{n}/") for b in self.boards):
                n += 1
            board_id = f"{stem}{n}"
        elif board_id in self.boards:
            raise ValueError(f"board id {board_id!r} already used")
        self.boards[board_id] = Board(board_id, kind, board_type)
        self._touch()
        return board_id

    def remove_board(self, board_id: str):
        if board_id == SHELL:
            raise ValueError("the shell cannot be removed")
        del self.boards[board_id]
        for link in [l for l in self.links if l.src[0] == board_id or l.dst[0] == board_id]:
            self._drop(link)
        self._touch()

    def add_link(self, src: End, dst: End, check: bool = True) -> "Construction":
        src = (src[0], tuple(src[1]))
        dst = (dst[0], tuple(dst[1]))
        if check:
            so = self.orientation_of(src)
            do = self.orientation_of(dst)
            if so is not Orientation.EMITTER or do is not Orientation.RECEIVER:
                raise OrientationError(
                    f"links run emitter to receiver; got {so.value} to {do.value}", src, dst)
            if dst in self._feeder:
                raise PortOccupied("receiver already fed", self._feeder[dst], dst)
            if src in self._target:
                raise PortOccupied("emitter already linked; duplicate values with dup/copy", src, self._target[src])
            if self._reaches(dst, src):
                raise CycleError("link would close a feedback loop", src, dst)
        link = Link(src, dst)
        self.links.append(link)
        self._feeder.setdefault(dst, src)
        self._target.setdefault(src, dst)
        self._touch()
        return self

    def connect_groups(self, b1: str, g1, b2: str, g2):
        """Link every leaf of group ``g1`` on ``b1`` with the same leaf of ``g2`` on ``b2``."""
        g1, g2 = tuple(g1), tuple(g2)
        t1 = self.group_type(b1, g1)
        t2 = self.group_type(b2, g2)
        if t1 != t2:
            raise TypeMismatch(
                f"cannot join {format_type(t1)} with {format_type(t2)}", (b1, g1), (b2, g2))
        for q in iter_leaves(t1):
            e1, e2 = (b1, g1 + q), (b2, g2 + q)
            if self.orientation_of(e1) is Orientation.EMITTER:
                self.add_link(e1, e2)
            else:
                self.add_link(e2, e1)

    def rewire(self, old: End, new: End):
        """Move the link attached to ``old`` so that it attaches to ``new``."""
        old = (old[0], tuple(old[1]))
        for link in [l for l in self.links if old in (l.src, l.dst)]:
            self._drop(link)
            src = new if link.src == old else link.src
            dst = new if link.dst == old else link.dst
            self.add_link(src, dst, check=False)

    def _drop(self, link: Link):
        self.links.remove(link)
        if self._feeder.get(link.dst) == link.src:
            del self._feeder[link.dst]
        if self._target.get(link.src) == link.dst:
            del self._target[link.src]
        self._touch()

    def _touch(self):
        self._version += 1

    # queries

    def shell(self) -> Board:
        return self.boards[SHELL]

    def feeder(self, end: End) -> Optional[End]:
        return self._feeder.get((end[0], tuple(end[1])))

    def target(self, end: End) -> Optional[End]:
        return self._target.get((end[0], tuple(end[1])))

    def group_type(self, board_id: str, path) -> TypeExpr:
        board = self.boards.get(board_id)
        if board is None:
            raise InvalidPort(f"no board {board_id!r}", (board_id, tuple(path)))
        try:
            return subtype(board.type, tuple(path))
        except InvalidPort as e:
            raise InvalidPort(str(e), (board_id, tuple(path))) from None

    def orientation_of(self, end: End) -> Orientation:
        """Orientation of a leaf as seen from inside this construction."""
        board = self.boards.get(end[0])
        if board is not None:
            o = board.orientations.get(tuple(end[1]))
            if o is not None:
                return o.flipped() if end[0] == SHELL else o
        t = self.group_type(*end)
        if not isinstance(t, Nat):
            raise TypeMismatch(f"port is a {format_type(t)} group, not an N leaf", end)
        o = layout_orientation(end[1])
        return o.flipped() if end[0] == SHELL else o

    def composites(self) -> list:
        return sorted(b for b, brd in self.boards.items() if isinstance(brd.kind, Composite))

    def functionals(self) -> list:
        return sorted(b for b, brd in self.boards.items() if isinstance(brd.kind, Functional))

    def board_deps(self, board_id: str) -> dict:
        """Receiver leaf -> emitter leaves it feeds inside the board (outside view)."""
        board = self.boards[board_id]
        kind = board.kind
        lay = board.layout
        if isinstance(kind, Shell):
            return {}
        if isinstance(kind, Composite):
            deps = {r: [] for r in lay.receivers()}
            for r, es in kind.body.interface_dependencies().items():
                deps[r] = sorted(es)
            return deps
        if isinstance(kind, Functional):
            final = FINAL_GROUP[kind.name]
            inside = [e for e in lay.emitters() if e[: len(final)] == final]
            return {
                r: lay.emitters() if r[: len(final)] == final else inside
                for r in lay.receivers()
            }
        return {r: lay.emitters() for r in lay.receivers()}

    def successors(self, end: End) -> list:
        board = self.boards[end[0]]
        if self.orientation_of(end) is Orientation.EMITTER:
            t = self._target.get(end)
            return [t] if t is not None else []
        if isinstance(board.kind, Shell):
            return []
        return [(end[0], e) for e in self._deps_of(end[0]).get(end[1], [])]

    def _deps_of(self, board_id):
        # internal dependencies depend only on the board, never on links
        board = self.boards[board_id]
        hit = self._deps_cache.get(board_id)
        if hit is None or hit[0] is not board:
            hit = self._deps_cache[board_id] = (board, self.board_deps(board_id))
        return hit[1]

    def _reaches(self, start: End, goal: End) -> bool:
        seen = {start}
        stack = [start]
        while stack:
            node = stack.pop()
            if node == goal:
                return True
            for nxt in self.successors(node):
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
        return False

    def interface_dependencies(self) -> dict:
        """Outside receiver leaf -> set of outside emitter leaves it can influence."""
        key = ("iface", self._version)
        cached = getattr(self, "_iface_cache", None)
        if cached is not None and cached[0] == key:
            return cached[1]
        shell = self.shell()
        result = {}
        for r in shell.layout.receivers():
            reached = set()
            start = (SHELL, r)
            seen = {start}
            stack = [start]
            while stack:
                node = stack.pop()
                for nxt in self.successors(node):
                    if nxt[0] == SHELL:
                        reached.add(nxt[1])
                    elif nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
            result[r] = reached
        self._iface_cache = (key, result)
        return result

    def validate(self) -> list:
        return validate(self)


def layout_orientation(path) -> Orientation:
    flips = sum(1 for side, _ in path if side == "in")
    return Orientation.RECEIVER if flips % 2 else Orientation.EMITTER


def new_construction(interface_type: TypeExpr, name: Optional[str] = None) -> Construction:
    return Construction(interface_type, name)


def add_board(c: Construction, kind, board_type: Optional[TypeExpr] = None) -> str:
    return c.add_board(kind, board_type)


def add_link(c: Construction, src: End, dst: End) -> Construction:
    return c.add_link(src, dst)


def wrap_board(kind, board_type: Optional[TypeExpr] = None, name: Optional[str] = None) -> Construction:
    """A construction holding one board whose every port is wired to the shell."""
    if board_type is None:
        board_type = kind.body.interface_type if isinstance(kind, Composite) else kind_type(kind)
    c = Construction(board_type, name)
    bid = c.add_board(kind, board_type)
    c.connect_groups(SHELL, (), bid, ())
    return c


# --- validation --------------------------------------------------------------


def _arrow_text(link: Link) -> str:
    return " -> ".join(link.text())


def validate(c: Construction) -> list:
    out = []
    good = []
    for link in sorted(c.links, key=Link.text):
        ends = (link.src, link.dst)
        bad = False
        for end in ends:
            if end[0] not in c.boards:
                out.append(Violation("UnknownBoard", f"no board {end[0]!r} for link {_arrow_text(link)}", ends))
                bad = True
                break
            try:
                c.orientation_of(end)
            except TypeMismatch:
                out.append(Violation("TypeMismatch", f"{end_text(end)} is not an N leaf", ends))
                bad = True
                break
            except InvalidPort:
                out.append(Violation("InvalidPort", f"{end_text(end)} does not exist", ends))
                bad = True
                break
        if bad:
            continue
        if c.orientation_of(link.src) is not Orientation.EMITTER or c.orientation_of(link.dst) is not Orientation.RECEIVER:
            out.append(Violation("OrientationError", f"link {_arrow_text(link)} is not emitter to receiver", ends))
            continue
        good.append(link)

    fan_in, fan_out = {}, {}
    for link in good:
        fan_in.setdefault(link.dst, []).append(link.src)
        fan_out.setdefault(link.src, []).append(link.dst)
    for dst in sorted(fan_in, key=end_text):
        if len(fan_in[dst]) > 1:
            out.append(Violation("FanInViolation", f"{end_text(dst)} fed {len(fan_in[dst])} times",
                                 tuple(fan_in[dst]) + (dst,)))
    for src in sorted(fan_out, key=end_text):
        if len(fan_out[src]) > 1:
            out.append(Violation("FanOutViolation", f"{end_text(src)} drives {len(fan_out[src])} receivers",
                                 (src,) + tuple(fan_out[src])))

    cyc = _cycle_boards(c, good)
    if cyc:
        out.append(Violation("CycleError", "feedback loop through " + ", ".join(cyc), tuple(cyc)))
    return out


_VIOLATION_ERRORS = {
    "UnknownBoard": InvalidPort,
    "InvalidPort": InvalidPort,
    "TypeMismatch": TypeMismatch,
    "OrientationError": OrientationError,
    "FanInViolation": PortOccupied,
    "FanOutViolation": PortOccupied,
    "CycleError": CycleError,
}


def check(c: Construction, where: Optional[str] = None) -> Construction:
    """Raise the error class of the first violation, if any."""
    problems = validate(c)
    if problems:
        v = problems[0]
        raise _VIOLATION_ERRORS[v.kind](f"{where}: {v.message}" if where else v.message)
    return c


def _cycle_boards(c: Construction, links: list) -> list:
    succ = {}
    nodes = set()
    for link in links:
        succ.setdefault(link.src, []).append(link.dst)
        nodes.update((link.src, link.dst))
    for bid, board in c.boards.items():
        for r, es in c.board_deps(bid).items():
            for e in es:
                succ.setdefault((bid, r), []).append((bid, e))
                nodes.update(((bid, r), (bid, e)))
    indeg = {n: 0 for n in nodes}
    for n, vs in succ.items():
        for v in vs:
            indeg[v] += 1
    queue = deque(n for n, d in indeg.items() if d == 0)
    while queue:
        n = queue.popleft()
        for v in succ.get(n, []):
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    return sorted({n[0] for n, d in indeg.items() if d > 0})


# --- structural transforms ---------------------------------------------------


def flatten(c: Construction, depth: Optional[int] = None) -> Construction:
    """Inline composite boards, resolving wires that pass through their shells.

    ``depth=1`` inlines only the composites that sit directly in ``c``.
    Inlined boards are renamed ``<composite id>/<inner id>``.
    """
    scopes = {}  # scope (tuple of composite ids) -> construction
    real = []
    link_next = {}  # (scope, board, path) -> (scope, board, path)

    def walk(con: Construction, scope: tuple, level: int):
        scopes[scope] = con
        for link in con.links:
            link_next[(scope, *link.src)] = (scope, *link.dst)
        for bid, board in con.boards.items():
            if bid == SHELL:
                continue
            if isinstance(board.kind, Composite) and (depth is None or level < depth):
                walk(board.kind.body, scope + (bid,), level + 1)
            else:
                real.append(("/".join(scope + (bid,)), board))

    walk(c, (), 0)
    out = Construction(c.interface_type, c.name)
    for new_id, board in real:
        if new_id in out.boards:
            raise ValueError(f"flattening produced the board id {new_id!r} twice")
        out.boards[new_id] = Board(new_id, board.kind, board.type)
    out._touch()

    def name(scope, bid):
        return SHELL if (bid == SHELL and not scope) else "/".join(scope + (bid,))

    for start in sorted(link_next, key=lambda k: (k[0], k[1], k[2])):
        scope, bid, path = start
        if bid == SHELL and scope:
            continue  # inner face of an inlined body: reached through its composite
        if scope + (bid,) in scopes:
            continue  # outer face of an inlined composite: a pass-through
        node = link_next[start]
        for _ in range(len(link_next) + 1):
            s, b, p = node
            if b == SHELL and s:
                nxt = link_next.get((s[:-1], s[-1], p))
            elif s + (b,) in scopes:
                nxt = link_next.get((s + (b,), SHELL, p))
            else:
                out.add_link((name(scope, bid), path), (name(s, b), p), check=False)
                break
            if nxt is None:
                break  # wire ends in a dangling port
            node = nxt
    return out


def canonical(c: Construction) -> Construction:
    """Relabel boards in depth-first discovery order from the shell."""
    order = []
    seen = {SHELL}

    def dfs(start):
        # preorder over ports in layout order, so chains are numbered in sequence
        stack = [iter(c.boards[start].layout.paths())]
        owners = [start]
        while stack:
            path = next(stack[-1], None)
            if path is None:
                stack.pop()
                owners.pop()
                continue
            end = (owners[-1], path)
            other = c.feeder(end) or c.target(end)
            if other is not None and other[0] not in seen and other[0] in c.boards:
                seen.add(other[0])
                order.append(other[0])
                stack.append(iter(c.boards[other[0]].layout.paths()))
                owners.append(other[0])

    dfs(SHELL)
    rest = sorted(
        (b for b in c.boards if b not in seen),
        key=lambda b: (kind_string(c.boards[b].kind), format_type(c.boards[b].type), b),
    )
    for bid in rest:
        if bid not in seen:
            seen.add(bid)
            order.append(bid)
            dfs(bid)
    mapping = {SHELL: SHELL}
    counts = {}
    used = {SHELL}
    for bid in order:
        stem = kind_stem(c.boards[bid].kind)
        counts[stem] = counts.get(stem, 0) + 1
        while f"{stem}{counts[stem]}" in used:
            counts[stem] += 1
        mapping[bid] = f"{stem}{counts[stem]}"
        used.add(mapping[bid])
    return _relabel(c, mapping, recurse=True)


def fresh_copy(c: Construction) -> Construction:
    """Structurally identical construction whose board ids share nothing with ``c``."""
    primes = 1 + max((len(b) - len(b.rstrip("'")) for b in c.boards if b != SHELL), default=0)
    mapping = {b: (b if b == SHELL else b + "'" * primes) for b in c.boards}
    return _relabel(c, mapping, recurse=False)


def _relabel(c: Construction, mapping: dict, recurse: bool) -> Construction:
    out = Construction(c.interface_type, c.name)
    for bid, board in c.boards.items():
        if bid == SHELL:
            continue
        kind = board.kind
        if recurse and isinstance(kind, Composite):
            kind = Composite(kind.name, canonical(kind.body))
        out.boards[mapping[bid]] = Board(mapping[bid], kind, board.type)
    for link in c.links:
        out.add_link((mapping[link.src[0]], link.src[1]), (mapping[link.dst[0]], link.dst[1]), check=False)
    out._touch()
    return out


def embed(parent: Construction, child: Construction, name: Optional[str] = None) -> str:
    """Add a snapshot of ``child`` to ``parent`` as a composite board and return its id."""
    snapshot = _relabel(child, {b: b for b in child.boards}, recurse=False)
    snapshot._iface_cache = (("iface", snapshot._version), child.interface_dependencies())
    return parent.add_board(Composite(name or child.name or "box", snapshot))


def board_count(c: Construction, kind_filter=None) -> int:
    return sum(1 for b in c.boards.values() if kind_filter is None or kind_filter(b))


# --- serialization -----------------------------------------------------------


def to_document(c: Construction) -> dict:
    boards = []
    for bid in sorted(c.boards):
        board = c.boards[bid]
        rec = {"id": bid, "kind": kind_string(board.kind), "type": format_type(board.type)}
        if isinstance(board.kind, Composite):
            rec["body"] = to_document(board.kind.body)
        boards.append(rec)
    links = sorted({l.text() for l in c.links})
    return {
        "format_version": FORMAT_VERSION,
        "name": c.name,
        "interface_type": format_type(c.interface_type),
        "boards": boards,
        "links": [{"from": a, "to": b} for a, b in links],
    }


def serialize(c: Construction) -> str:
    return json.dumps(to_document(c), indent=2, ensure_ascii=False) + "\n"


def deserialize(text: str) -> Construction:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SerializationError(f"not a JSON document: {e}") from None
    return check(from_document(doc, "document"), "document")


def from_document(doc: dict, where: str) -> Construction:
    def need(rec, key, loc):
        if not isinstance(rec, dict) or key not in rec:
            raise SerializationError(f"{loc}: missing field {key!r}")
        return rec[key]

    if need(doc, "format_version", where) != FORMAT_VERSION:
        raise SerializationError(f"{where}: unsupported format_version {doc['format_version']!r}")
    try:
        iface = parse_type(need(doc, "interface_type", where))
    except Exception as e:
        raise SerializationError(f"{where}.interface_type: {e}") from None
    c = Construction(iface, doc.get("name"))
    for i, rec in enumerate(need(doc, "boards", where)):
        loc = f"{where}.boards[{i}]"
        bid = need(rec, "id", loc)
        try:
            btype = parse_type(need(rec, "type", loc))
            kind = _parse_kind(need(rec, "kind", loc), rec, loc)
        except SerializationError:
            raise
        except Exception as e:
            raise SerializationError(f"{loc}: {e}") from None
        if isinstance(kind, Shell):
            if bid != SHELL or btype != iface:
                raise SerializationError(f"{loc}: shell must be id {SHELL!r} with the interface type")
            continue
        if bid in c.boards:
            raise SerializationError(f"{loc}: duplicate board id {bid!r}")
        _check_kind_type(kind, btype, loc)
        c.boards[bid] = Board(bid, kind, btype)
    c._touch()
    for i, rec in enumerate(need(doc, "links", where)):
        loc = f"{where}.links[{i}]"
        try:
            src = _parse_end(need(rec, "from", loc))
            dst = _parse_end(need(rec, "to", loc))
        except InvalidPort as e:
            raise SerializationError(f"{loc}: {e}") from None
        for end in (src, dst):
            if end[0] not in c.boards:
                raise SerializationError(f"{loc}: unknown board {end[0]!r}")
        c.add_link(src, dst, check=False)
    return c


def _parse_end(text: str) -> End:
    if "/" not in text:
        raise InvalidPort(f"malformed endpoint {text!r}")
    board, path = text.rsplit("/", 1)
    return (board, parse_path(path))


def _parse_kind(text: str, rec: dict, loc: str):
    parts = text.split(":")
    head = parts[0]
    if head == "shell" and len(parts) == 1:
        return Shell()
    if head == "primitive" and len(parts) >= 2:
        kind = Prim(parts[1], tuple(int(x) for x in parts[2:]))
        _check_prim(kind)
        return kind
    if head == "numeral" and len(parts) == 2:
        value = int(parts[1])
        if value < 1:
            raise ValueError("numerals are positive")
        return Numeral(value)
    if head == "functional" and len(parts) == 2 and parts[1] in FINAL_GROUP:
        return Functional(parts[1])
    if head == "composite" and len(parts) >= 2:
        if "body" not in rec:
            raise SerializationError(f"{loc}: composite board without body")
        return Composite(":".join(parts[1:]), from_document(rec["body"], loc + ".body"))
    raise ValueError(f"unknown board kind {text!r}")


def _check_kind_type(kind, btype: TypeExpr, loc: str):
    if isinstance(kind, (Prim, Numeral)):
        expected = kind_type(kind)
    elif isinstance(kind, Composite):
        expected = kind.body.interface_type
    else:
        try:
            ports = btype.inputs[1].inputs if kind.name == "iter" else btype.inputs
        except (AttributeError, IndexError):
            raise SerializationError(f"{loc}: {format_type(btype)} is not a {kind.name} type") from None
        expected = iter_type(ports) if kind.name == "iter" else rec_type(ports)
    if btype != expected:
        raise SerializationError(
            f"{loc}: kind {kind_string(kind)} needs type {format_type(expected)}, got {format_type(btype)}")


# --- DOT ---------------------------------------------------------------------


def _port_id(path) -> str:
    return "p_" + (format_path(path).replace(".", "_") or "root")


def to_dot(c: Construction) -> str:
    lines = [f'digraph "{_dot_escape(c.name or "construction")}" {{', "  rankdir=LR;", "  node [shape=record];"]
    for bid in sorted(c.boards):
        board = c.boards[bid]
        lay = board.layout
        if bid == SHELL:
            # inner face: emitters carry the construction's inputs
            left = [p for p in lay.paths() if c.orientation_of((bid, p)) is Orientation.EMITTER]
            right = [p for p in lay.paths() if c.orientation_of((bid, p)) is Orientation.RECEIVER]
        else:
            left, right = lay.receivers(), lay.emitters()
        title = f"{bid}\\n{_dot_escape(kind_string(board.kind))}\\n{_dot_escape(format_type(board.type))}"
        fields = [
            "{" + "|".join(f"<{_port_id(p)}> {format_path(p) or '.'}" for p in left) + "}" if left else None,
            title,
            "{" + "|".join(f"<{_port_id(p)}> {format_path(p) or '.'}" for p in right) + "}" if right else None,
        ]
        label = "|".join(f for f in fields if f is not None)
        lines.append(f'  "{bid}" [label="{{{label}}}"];')
    for a, b in sorted({(l.src, l.dst) for l in c.links}, key=lambda ab: (end_text(ab[0]), end_text(ab[1]))):
        lines.append(f'  "{a[0]}":{_port_id(a[1])} -> "{b[0]}":{_port_id(b[1])};')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_escape(s: str) -> str:
    return re.sub(r'([{}|<>"])', r"\\\1", s).replace(";", "\\;")
