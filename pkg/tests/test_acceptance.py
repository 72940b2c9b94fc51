"""One test per acceptance criterion; each prints a PASS/FAIL line with its timing."""

import json
import random
import time
from collections import Counter
from contextlib import contextmanager

import pytest

from plugboard import pool
from plugboard.bundled import PROGRAM_DIR, golden_files, program_files
from plugboard.errors import AmbiguousSpacing, CycleError, OrientationError, PortOccupied, TypeMismatch
from plugboard.evaluation import elaborate, run_fast, run_tokens
from plugboard.functionals import iter_unfold
from plugboard.netgraph import SHELL, Composite, Prim, add_board, add_link, canonical, deserialize, new_construction, serialize, to_dot, validate
from plugboard.program import load_program
from plugboard.selftest import (
    ackermann_suite,
    codec_suite,
    composition_suite,
    differential_suite,
    iteration_suite,
    recursor_suite,
)
from plugboard.spikecodec import SpikeTrain, decode
from plugboard.types import NAT, arrow

N = NAT
IN0, IN1, OUT0 = (("in", 0),), (("in", 1),), (("out", 0),)
# spacings strictly between the intra-burst interval (2 ms) and the gap (20 ms)
CRAFTED_TRAINS = [(0, 5), (0, 2, 4, 11), (0, "3.5"), (0, 2, 22, 30)]


@pytest.fixture
def report(capsys):
    @contextmanager
    def criterion(label, limit_s=None):
        start = time.perf_counter()
        failure = None
        try:
            yield
        except AssertionError as e:
            failure = str(e).splitlines()[0] if str(e) else "assertion failed"
        elapsed = time.perf_counter() - start
        if failure is None and limit_s is not None and elapsed >= limit_s:
            failure = f"took {elapsed:.2f} s, limit {limit_s} s"
        status = "PASS" if failure is None else f"FAIL ({failure})"
        with capsys.disabled():
            print(f"\n[acceptance] {label}: {status} [{elapsed:.2f} s]")
        assert failure is None, failure

    return criterion


def test_criterion_1_recursor_equations(report):
    with report("1 recursor equations", 5):
        res = recursor_suite(seed=1, pairs=100, max_k=10)
        assert res.passed, res.failure
        assert res.checked == 100 * 10


def _prim_counts(c):
    return Counter(b.kind for bid, b in c.boards.items() if bid != SHELL)


def test_criterion_2_iteration(report):
    with report("2 iteration", 5):
        res = iteration_suite(seed=2, max_n=16)
        assert res.passed, res.failure
        rng = random.Random(2)
        for f in [pool.succ(), pool.const(3)] + [pool.endo(rng) for _ in range(5)]:
            unfolded = iter_unfold(4, f.construction)
            instances = [b for b in unfolded.boards.values()
                         if isinstance(b.kind, Composite) and b.kind.body.name == f.construction.name]
            assert len(instances) == 4, f"{f.label}: {len(instances)} instances"
            per_f = _prim_counts(elaborate(f.construction))
            assert _prim_counts(elaborate(unfolded)) == Counter({k: 4 * v for k, v in per_f.items()}), f.label


def test_criterion_3_composition_law(report):
    with report("3 composition law", 5):
        res = composition_suite(seed=3, pairs=100)
        assert res.passed, res.failure
        assert res.checked == 100 * 12


def test_criterion_4_ackermann(report):
    with report("4 ackermann", 30):
        res = ackermann_suite(max_m=4, max_n=6)
        assert res.passed, res.failure
        assert res.checked == 24


def test_criterion_5_differential_semantics(report):
    with report("5 differential semantics", 60):
        res = differential_suite(seed=5, programs=200, depth=5)
        assert res.passed, res.failure
        assert res.checked == 200


@pytest.mark.parametrize("times", CRAFTED_TRAINS)
def test_criterion_6_ambiguous_trains(times):
    with pytest.raises(AmbiguousSpacing):
        decode(SpikeTrain(times))


def test_criterion_6_spike_codec(report):
    with report("6 spike codec", 5):
        res = codec_suite(seed=6, lists=1000)
        assert res.passed, res.failure
        for times in CRAFTED_TRAINS:
            try:
                decode(SpikeTrain(times))
            except AmbiguousSpacing:
                continue
            raise AssertionError(f"no AmbiguousSpacing for {times}")


def _graph_cases():
    """(label, thunk, expected class) for built and stored invalid graphs."""

    def type_mismatch():
        c = new_construction(arrow([arrow([N], [N])], [N]))
        a = add_board(c, Prim("add"))
        c.connect_groups(SHELL, IN0, a, ())

    def wrong_direction():
        c = new_construction(arrow([N], [N]))
        a = add_board(c, Prim("succ"))
        add_link(c, (a, OUT0), (SHELL, IN0))

    def double_fed():
        c = new_construction(arrow([N, N], [N]))
        a = add_board(c, Prim("succ"))
        add_link(c, (SHELL, IN0), (a, IN0))
        add_link(c, (SHELL, IN1), (a, IN0))

    def two_board_cycle():
        c = new_construction(arrow([N], [N]))
        a = add_board(c, Prim("succ"))
        b = add_board(c, Prim("succ"))
        add_link(c, (a, OUT0), (b, IN0))
        add_link(c, (b, OUT0), (a, IN0))

    cases = [
        ("built type mismatch", type_mismatch, TypeMismatch),
        ("built wrong direction", wrong_direction, OrientationError),
        ("built double-fed receiver", double_fed, PortOccupied),
        ("built two-board cycle", two_board_cycle, CycleError),
    ]
    stored = {
        "orientation.pbg": OrientationError,
        "type_mismatch.pbg": TypeMismatch,
        "double_fed.pbg": PortOccupied,
        "double_used.pbg": PortOccupied,
        "cycle.pbg": CycleError,
    }
    negative = PROGRAM_DIR / "negative"
    assert {p.name for p in negative.glob("*.pbg")} == set(stored)
    for name, cls in sorted(stored.items()):
        text = (negative / name).read_text(encoding="utf-8")
        cases.append((name, lambda text=text: deserialize(text), cls))
    return cases


def test_criterion_7_validator(report):
    with report("7 validator negative corpus"):
        cases = _graph_cases()
        hits = 0
        for label, thunk, cls in cases:
            try:
                thunk()
            except Exception as e:
                assert type(e) is cls, f"{label}: {type(e).__name__} instead of {cls.__name__}"
                hits += 1
                continue
            raise AssertionError(f"{label}: accepted")
        assert hits == len(cases), f"{hits}/{len(cases)}"


def test_criterion_8_serialization(report):
    with report("8 serialization"):
        programs = program_files()
        assert programs
        for path in programs:
            for d in load_program(path).definitions.values():
                text = serialize(canonical(load_program(path).get(d.name)))
                assert serialize(deserialize(text)) == text, f"{path.name}:{d.name}"
        goldens = golden_files()
        assert len(goldens) >= len(programs)
        for path in goldens:
            text = path.read_text(encoding="utf-8")
            c = deserialize(text)
            assert validate(c) == [], path.name
            assert serialize(c) == text, path.name
            json.loads(text)


def test_criterion_9_h_example(report):
    with report("9 h(3,4) example"):
        h = load_program(PROGRAM_DIR / "h.pbc").get()
        assert run_fast(h, [3, 4]) == [9]
        out, trace = run_tokens(elaborate(h), [3, 4])
        assert out == [9]
        assert len(trace) == 3
        dots = {to_dot(load_program(PROGRAM_DIR / "h.pbc").get()) for _ in range(5)}
        assert len(dots) == 1
        assert to_dot(elaborate(h)) == to_dot(elaborate(h))
