"""The bundled example programs and their golden graph files.

Each ``<name>.pbc`` program may carry ``# expect: <inputs> => <outputs>``
lines, checked against ``main`` under the fast semantics and, unless the file
is marked ``# fast-only``, under the token semantics after elaboration.
``<name>.pbg`` holds the serialized ``main``; ``<name>.circuit.pbg`` holds its
elaborated circuit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import CalculusError
from .evaluation import elaborate, flat_values, run_fast, run_tokens
from .netgraph import deserialize, serialize
from .program import expectations, has_directive, parse_program

PROGRAM_DIR = Path(__file__).parent / "programs"


@dataclass
class CaseResult:
    name: str
    checks: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def line(self) -> str:
        if self.passed:
            return f"{self.name}: PASS ({self.checks} checks)"
        return f"{self.name}: FAIL ({'; '.join(self.failures)})"


def program_files(directory: Optional[Path] = None) -> list:
    return sorted(Path(directory or PROGRAM_DIR).glob("*.pbc"))


def golden_files(directory: Optional[Path] = None) -> list:
    return sorted(Path(directory or PROGRAM_DIR).glob("*.pbg"))


def _golden(case: CaseResult, path: Path, graph, write: bool):
    text = serialize(graph)
    if write:
        path.write_text(text, encoding="utf-8")
    case.checks += 1
    if not path.exists():
        case.failures.append(f"missing golden {path.name}")
        return
    stored = path.read_text(encoding="utf-8")
    if stored != text:
        case.failures.append(f"{path.name} differs from the freshly built graph")
        return
    case.checks += 1
    if serialize(deserialize(stored)) != stored:
        case.failures.append(f"{path.name} does not round-trip byte for byte")


def run_case(path: Path, write_goldens: bool = False) -> CaseResult:
    path = Path(path)
    case = CaseResult(path.stem)
    text = path.read_text(encoding="utf-8")
    try:
        main = parse_program(text).get("main")
    except CalculusError as e:
        case.failures.append(str(e))
        return case
    fast_only = has_directive(text, "fast-only")
    circuit = None
    if not fast_only:
        try:
            circuit = elaborate(main)
        except CalculusError as e:
            case.failures.append(f"elaboration failed: {e}")
            return case
    for inputs, want in expectations(text):
        case.checks += 1
        got = flat_values(run_fast(main, inputs))
        if got != want:
            case.failures.append(f"fast {inputs} gave {got}, expected {want}")
        if circuit is not None:
            case.checks += 1
            tok, _ = run_tokens(circuit, inputs)
            if tok != want:
                case.failures.append(f"tokens {inputs} gave {tok}, expected {want}")
    _golden(case, path.with_suffix(".pbg"), main, write_goldens)
    if circuit is not None:
        _golden(case, path.with_suffix(".circuit.pbg"), circuit, write_goldens)
    return case


def run_corpus(directory: Optional[Path] = None, write_goldens: bool = False) -> list:
    return [run_case(p, write_goldens) for p in program_files(directory)]
