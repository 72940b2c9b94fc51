"""Differential suites that check the graph calculus against the oracles.

``run_selftest`` prints one ``<law>: PASS (<scope>)`` or ``<law>: FAIL (...)``
line per suite.  ``mutation`` deliberately breaks one component first so the
suites can be shown to catch it.
"""

from __future__ import annotations

import random
from contextlib import ExitStack, contextmanager
from dataclasses import dataclass
from typing import Optional
from unittest import mock

from . import evaluation, functionals, pool, spikecodec
from .evaluation import elaborate, flat_values, run_fast, run_tokens
from .functionals import build_ackermann, comp_gadget, compose_direct, curry, iter_unfold, rec_eval
from .netgraph import SHELL, Construction
from .oracle import ack1, oracle_compose, oracle_iter, oracle_rec
from .types import NAT, Arrow


@dataclass
class SuiteResult:
    law: str
    scope: str
    checked: int
    failure: str = ""

    @property
    def passed(self) -> bool:
        return not self.failure

    def line(self) -> str:
        if self.passed:
            return f"{self.law}: PASS ({self.scope})"
        return f"{self.law}: FAIL ({self.failure})"


def recursor_suite(seed: int = 0, pairs: int = 100, max_k: int = 10) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("recursor equations", f"k≤{max_k}", 0)
    for _ in range(pairs):
        h = pool.step(rng)
        a = rng.randint(1, 8)
        c = curry(h.construction)

        def c_ref(j, h=h):
            return lambda x: h.fn([j, x])[0]

        for k in range(1, max_k + 1):
            got = rec_eval(a, c, k)
            res.checked += 1
            if k == 1 and got != a:
                res.failure = f"R(a)(c)(1) = a violated: a={a}, got {got}"
                return res
            want = oracle_rec(a, c_ref, k)
            if got != want:
                res.failure = (f"R(a)(c)(k+1) = c(k)(R(a)(c)(k)) violated at "
                               f"a={a}, c={h.label}, k={k}: {got} != {want}")
                return res
    return res


def _endos(rng: random.Random) -> list:
    fixed = [pool.unary_leaf(random.Random(i)) for i in range(3)]
    return fixed + [pool.endo(rng) for _ in range(5)]


def iteration_suite(seed: int = 0, max_n: int = 16) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("iteration", f"n≤{max_n}", 0)
    for f in _endos(rng):
        for n in range(1, max_n + 1):
            unfolded = iter_unfold(n, f.construction)
            ref = oracle_iter(n, lambda x, f=f: f.fn([x])[0])
            for x in range(1, 13):
                res.checked += 1
                got = run_fast(unfolded, [x])[0]
                if got != ref(x):
                    res.failure = f"Iter(n, f)(x) = f^n(x) violated: f={f.label}, n={n}, x={x}: {got} != {ref(x)}"
                    return res
    return res


def composition_suite(seed: int = 0, pairs: int = 100) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("composition law", f"{pairs} pairs", 0)
    gadget = comp_gadget(NAT, NAT, NAT)
    for _ in range(pairs):
        f, g = pool.endo(rng), pool.endo(rng)
        direct = compose_direct(f.construction, g.construction)
        applied = functionals.apply(gadget, [f.construction, g.construction])
        ref = oracle_compose(lambda x: f.fn([x])[0], lambda x: g.fn([x])[0])
        for x in range(1, 13):
            res.checked += 1
            a, b = run_fast(direct, [x])[0], run_fast(applied, [x])[0]
            if a != ref(x):
                res.failure = f"compose(f, g)(x) = g(f(x)) violated: f={f.label}, g={g.label}, x={x}"
                return res
            if b != a:
                res.failure = f"Comp(f; g) = compose(f, g) violated: f={f.label}, g={g.label}, x={x}"
                return res
    return res


def ackermann_suite(max_m: int = 4, max_n: int = 6) -> SuiteResult:
    res = SuiteResult("ackermann", f"m≤{max_m}, n≤{max_n}", 0)
    ack = build_ackermann()
    for m in range(1, max_m + 1):
        for n in range(1, max_n + 1):
            res.checked += 1
            got = run_fast(ack, [m, n])[0]
            if got != ack1(m, n):
                res.failure = f"Ack1(m, n) = Ack(m-1, n-1) + 1 violated at ({m}, {n}): {got} != {ack1(m, n)}"
                return res
    return res


def differential_suite(seed: int = 0, programs: int = 200, depth: int = 5) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("differential semantics", f"{programs} programs", 0)
    for _ in range(programs):
        s = pool.bounded_program(rng, depth)
        xs = [rng.randint(1, 8) for _ in range(s.n_in)]
        fast = flat_values(run_fast(s.construction, xs))
        tokens, _ = run_tokens(elaborate(s.construction), xs)
        res.checked += 1
        if fast != tokens:
            res.failure = f"run_tokens(elaborate(c)) = run_fast(c) violated: c={s.label}, xs={xs}"
            return res
    return res


def codec_suite(seed: int = 0, lists: int = 1000) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("spike codec", f"{lists} lists", 0)
    for _ in range(lists):
        vs = [rng.randint(1, 1000) for _ in range(rng.randint(1, 6))]
        res.checked += 1
        if spikecodec.decode(spikecodec.encode(vs)) != vs:
            res.failure = f"decode(encode(vs)) = vs violated: vs={vs[:4]}..."
            return res
    return res


SUITES = [recursor_suite, iteration_suite, composition_suite, ackermann_suite, differential_suite, codec_suite]


# --- mutations -----------------------------------------------------------------


def _recurse_off_by_one(a):
    def with_step(cs):
        (c,) = cs

        def at(ks):
            acc = list(a)
            for i in range(1, ks[0] + 1):
                acc = c([i])[0](acc)
            return acc

        return [at]

    return [with_step]


def _iter(n, f):
    def run(xs):
        for _ in range(n):
            xs = f(xs)
        return xs

    return [run]


def _swap_comp(sa, sb, sc):
    ab, bc, ac = Arrow(sa, sb), Arrow(sb, sc), Arrow(sa, sc)
    c = Construction(Arrow((ab, bc), (ac,)), "comp")
    # runs the second function first
    for k in range(len(sa)):
        c.connect_groups(SHELL, (("out", 0), ("in", k)), SHELL, (("in", 1), ("in", k)))
    for k in range(len(sb)):
        c.connect_groups(SHELL, (("in", 1), ("out", k)), SHELL, (("in", 0), ("in", k)))
    for k in range(len(sc)):
        c.connect_groups(SHELL, (("in", 0), ("out", k)), SHELL, (("out", 0), ("out", k)))
    return c



def _fire_succ_twice(kind, args):
    out = evaluation.prim_apply(kind, args)
    if getattr(kind, "name", None) == "succ":
        out = [v + 1 for v in out]
    return out


def _decode_drop_spike(train, cfg=spikecodec.DEFAULT_CONFIG):
    return _real_decode(spikecodec.SpikeTrain(train.timestamps[:-1]), cfg) if len(train) > 1 else [0]


_real_decode = spikecodec.decode

MUTATIONS = {
    "recursor": [("plugboard.evaluation._recurse", _recurse_off_by_one)],
    "iter": [("plugboard.evaluation._iterate", lambda args: _iter(args[0] + 1, args[1]))],
    "comp": [("plugboard.functionals._comp_construction", _swap_comp)],
    "tokens": [("plugboard.evaluation._fire", _fire_succ_twice)],
    "codec": [("plugboard.spikecodec.decode", _decode_drop_spike)],
}


@contextmanager
def mutated(name: Optional[str]):
    """Temporarily break one component; ``None`` leaves everything intact."""
    if name is not None and name not in MUTATIONS:
        raise ValueError(f"unknown mutation {name!r}; choose from {', '.join(sorted(MUTATIONS))}")
    with ExitStack() as stack:
        for target, replacement in MUTATIONS.get(name, []):
            stack.enter_context(mock.patch(target, replacement))
        yield


def run_selftest(mutation: Optional[str] = None, out=print) -> list:
    results = []
    with mutated(mutation):
        for suite in SUITES:
            try:
                r = suite()
            except Exception as e:  # a broken component may also crash a suite
                r = SuiteResult(suite.__name__.replace("_suite", ""), "", 0, f"{type(e).__name__}: {e}")
            results.append(r)
            out(r.line())
    return results
