import pytest

from plugboard.errors import ProgramError
from plugboard.evaluation import run_fast
from plugboard.program import expectations, has_directive, parse_program, parse_values, read
from plugboard.types import format_type


def main_of(text):
    return parse_program(text).get("main")


@pytest.mark.parametrize(
    "expr, inputs, outputs",
    [
        ("(compose (product succ succ) add)", [3, 4], [9]),
        ("(compose-at succ 0 add 1)", [3, 4], [8]),
        ("(compose dup add)", [5], [10]),
        ("(iter (numeral 3) succ)", [2], [5]),
        ("(apply (comp N N N) succ (const 4))", [1], [4]),
        ("(uncurry (curry add))", [2, 5], [7]),
        ("(rec N (numeral 1) (curry add) (numeral 4))", [], [7]),
        ("(ackermann 2 3)", [], [5]),
        ("(apply (iter N) (numeral 2) succ)", [7], [9]),
    ],
)
def test_expressions(expr, inputs, outputs):
    assert run_fast(main_of(f"(define main {expr})"), inputs) == outputs


def test_report_lists_every_definition():
    prog = parse_program("(define f succ)\n(define main (compose f f))\n")
    assert prog.report() == ["f : N -> N", "main : N -> N"]


def test_quoted_types():
    c = main_of('(define main (comp "(N;N)" N N))')
    assert format_type(c.interface_type) == "((N;N) -> N;N -> N) -> (N;N) -> N"


@pytest.mark.parametrize(
    "text, line",
    [
        ("(define main (compose succ add))", 1),
        ("\n(define main undefined_thing)", 2),
        ("(define main (frobnicate succ))", 1),
        ("(define main succ", 1),
        ("(define main succ))", 1),
        ("(define f succ)\n(define f succ)", 2),
        ("(define main (const 0))", 1),
        ('(define main (comp "N ->" N N))', 1),
        ("(define succ add)", 1),
        ("\n\n(define main (proj 1))", 3),
    ],
)
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(ProgramError) as err:
        parse_program(text)
    assert err.value.line == line
    assert str(err.value).startswith(f"line {line}: ")


def test_missing_definition():
    with pytest.raises(ProgramError):
        parse_program("(define f succ)").get("main")


def test_reader_ignores_comments():
    forms = read("# (define x y)\n(define a b) # trailing\n")
    assert len(forms) == 1 and forms[0].line == 2


def test_directives():
    text = "# fast-only\n# expect: 3;4 => 9\n# expect:  => 7\n(define main add)"
    assert has_directive(text, "fast-only")
    assert not has_directive(text, "slow")
    assert expectations(text) == [([3, 4], [9]), ([], [7])]


def test_parse_values():
    assert parse_values("3;4") == [3, 4]
    assert parse_values("") == []
    with pytest.raises(ProgramError):
        parse_values("3;x")
    with pytest.raises(ProgramError):
        parse_values("0")
