"""Random first-order programs paired with direct Python reference functions.

Every sample carries the graph construction and an independently written
callable on integer lists, so the differential suites can compare the graph
semantics against plain Python.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from . import functionals as fn
from . import primitives as prims
from .netgraph import Construction
from .types import NAT


@dataclass
class Sample:
    construction: Construction
    fn: Callable  # list of ints -> list of ints
    n_in: int
    n_out: int
    label: str
    # upper bound on every value inside the program when all inputs are <= b
    bound: Callable = lambda b: b

    def __call__(self, *xs):
        return self.fn(list(xs))


def succ() -> Sample:
    return Sample(prims.prim_succ(), lambda xs: [xs[0] + 1], 1, 1, "succ", lambda b: b + 1)


def const(k: int) -> Sample:
    return Sample(prims.prim_const(k), lambda xs: [k], 1, 1, f"const:{k}", lambda b: max(b, k))


def proj(i: int, n: int) -> Sample:
    return Sample(prims.prim_proj(i, n), lambda xs: [xs[i - 1]], n, 1, f"proj:{i}:{n}")


def add() -> Sample:
    return Sample(prims.prim_add(), lambda xs: [xs[0] + xs[1]], 2, 1, "add", lambda b: 2 * b)


def dup() -> Sample:
    return Sample(prims.prim_dup(), lambda xs: [xs[0], xs[0]], 1, 2, "dup")


def numeral(k: int) -> Sample:
    return Sample(prims.prim_numeral(k), lambda xs: [k], 0, 1, f"#{k}", lambda b: max(b, k))


def leaf(rng: random.Random) -> Sample:
    pick = rng.randrange(6)
    if pick == 1:
        return const(rng.randint(1, 5))
    if pick == 2:
        n = rng.randint(1, 3)
        return proj(rng.randint(1, n), n)
    if pick == 3:
        return add()
    if pick == 4:
        return dup()
    return succ()


def unary_leaf(rng: random.Random) -> Sample:
    pick = rng.randrange(3)
    if pick == 0:
        return succ()
    if pick == 1:
        return const(rng.randint(1, 6))
    return proj(1, 1)


def compose_at(f: Sample, i: int, g: Sample, j: int) -> Sample:
    def run(xs):
        fo = f.fn(xs[:f.n_in])
        rest = xs[f.n_in:]
        gin = rest[:j] + [fo[i]] + rest[j:]
        return fo[:i] + fo[i + 1:] + g.fn(gin)

    c = fn.compose_at(f.construction, i, g.construction, j)
    return Sample(c, run, f.n_in + g.n_in - 1, f.n_out + g.n_out - 1, f"at({f.label},{i},{g.label},{j})",
                  lambda b: g.bound(f.bound(b)))


def compose(f: Sample, g: Sample) -> Sample:
    c = fn.compose_direct(f.construction, g.construction)
    return Sample(c, lambda xs: g.fn(f.fn(xs)), f.n_in, g.n_out, f"({f.label};{g.label})",
                  lambda b: g.bound(f.bound(b)))


def product(f: Sample, g: Sample) -> Sample:
    def run(xs):
        return f.fn(xs[:f.n_in]) + g.fn(xs[f.n_in:])

    c = prims.product(f.construction, g.construction)
    return Sample(c, run, f.n_in + g.n_in, f.n_out + g.n_out, f"<{f.label}|{g.label}>",
                  lambda b: max(f.bound(b), g.bound(b)))


def fan(n: int) -> Sample:
    """N -> N^n by repeated dup."""
    s = proj(1, 1)
    for _ in range(n - 1):
        s = compose_at(s, 0, dup(), 0)
    return s


def summation(n: int) -> Sample:
    """N^n -> N by repeated add."""
    s = proj(1, 1)
    for _ in range(n - 1):
        s = compose_at(add(), 0, s, 0)
    return s


def unary(s: Sample) -> Sample:
    """Fan one input out to every socket and sum every plug."""
    if s.n_in == 0:
        s = compose_at(s, 0, add(), 0)
    if s.n_in != 1:
        s = compose(fan(s.n_in), s)
    if s.n_out != 1:
        s = compose(s, summation(s.n_out))
    return s


def iterate(n: int, f: Sample) -> Sample:
    def run(xs):
        for _ in range(n):
            xs = f.fn(xs)
        return xs

    def bound(b):
        b = max(b, n)
        for _ in range(n):
            b = f.bound(b)
        return b

    counted = fn.compose_at(prims.prim_numeral(n), 0, fn.iter_gadget(NAT), 0)
    c = fn.apply(counted, f.construction)
    return Sample(c, run, 1, 1, f"iter({n},{f.label})", bound)


def recurse(a: int, h: Sample, k: int) -> Sample:
    """The numeral R(a)(curry h)(k) for a binary ``h``."""

    def run(xs):
        acc = a
        for i in range(1, k):
            acc = h.fn([i, acc])[0]
        return [acc]

    def bound(b):
        b = max(b, a, k)
        for _ in range(1, k):
            b = h.bound(b)
        return b

    c = fn.rec_apply(a, fn.curry(h.construction), k)
    return Sample(c, run, 0, 1, f"rec({a},{h.label},{k})", bound)


def binary(rng: random.Random, depth: int, functionals: bool = True) -> Sample:
    """A random (N;N) -> N built around add or a projection."""
    u = unary(program(rng, depth, functionals))
    pick = rng.randrange(3)
    tail = add() if pick == 0 else proj(pick, 2)
    return compose_at(u, 0, tail, rng.randrange(2))


MAX_PORTS = 4


def program(rng: random.Random, depth: int, functionals: bool = True) -> Sample:
    """A random first-order program of nesting depth at most ``depth``."""
    if depth <= 0 or rng.random() < 0.25:
        return leaf(rng)
    pick = rng.random()
    if functionals and pick < 0.12:
        return iterate(rng.randint(1, 3), unary(program(rng, depth - 1, functionals)))
    if functionals and pick < 0.22:
        src = recurse(rng.randint(1, 4), binary(rng, depth - 1), rng.randint(1, 4))
        g = program(rng, depth - 1, functionals)
        return compose_at(src, 0, g, rng.randrange(g.n_in)) if g.n_in else g
    f = program(rng, depth - 1, functionals)
    g = program(rng, depth - 1, functionals)
    if pick < 0.4 and f.n_in + g.n_in <= MAX_PORTS and f.n_out + g.n_out <= MAX_PORTS:
        return product(f, g)
    if pick < 0.5 and f.n_out == g.n_in:
        return compose(f, g)
    if g.n_in == 0:
        return g
    out = compose_at(f, rng.randrange(f.n_out), g, rng.randrange(g.n_in))
    if out.n_in > MAX_PORTS or out.n_out > MAX_PORTS:
        return unary(out)
    return out


def endo(rng: random.Random, depth: int = 2) -> Sample:
    """A random N -> N made from unary primitives."""
    s = unary_leaf(rng)
    for _ in range(rng.randint(0, depth)):
        s = compose(s, unary_leaf(rng))
    return s


def step(rng: random.Random) -> Sample:
    """A random binary step h(k, x) over first-order primitives, for the recursor."""
    return binary(rng, 2, functionals=False) if rng.random() < 0.5 else _affine(rng)


def _affine(rng: random.Random) -> Sample:
    left = endo(rng, 1)
    right = endo(rng, 1)
    return compose(product(left, right), add())


VALUE_LIMIT = 2000


def bounded_program(rng: random.Random, depth: int, max_input: int = 8, limit: int = VALUE_LIMIT) -> Sample:
    """Like :func:`program`, resampled until no value can exceed ``limit``.

    Unary spike trains grow linearly with the value they carry, so the token
    simulator is only practical on programs with moderate intermediates.
    """
    while True:
        s = program(rng, depth)
        if s.bound(max_input) <= limit:
            return s
