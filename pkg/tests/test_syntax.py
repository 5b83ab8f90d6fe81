import random

import pytest
from hypothesis import given, settings, strategies as st

from locsym.logic import INPUT, Problem
from locsym.syntax import ParseError, format_problem, parse_formula, parse_problem, tokenize

import randgen

GOOD = """
vocab { pred P/1 output }
domain = { a }
theory { }
structure { }
"""


def test_empty_theory_is_valid():
    p = parse_problem(GOOD)
    assert p.theory == ()
    assert [s.name for s in p.output_symbols] == ["P"]


def test_round_trip_colouring(gc):
    text = format_problem(gc)
    assert parse_problem(text) == gc
    assert format_problem(parse_problem(text)) == text


@pytest.mark.parametrize(
    "text, fragment",
    [
        (GOOD.replace("P/1", "P#1/1"), "reserved"),
        (GOOD.replace("theory { }", "theory { ! x : Q(x). }"), "Q"),
        (GOOD.replace("theory { }", "theory { ! x : P(x, x). }"), "expects 1"),
        ("vocab { pred E/2 input } domain = { t } theory { } structure { E = { (t, x) } }", "x"),
        ("vocab { func f/1 input } domain = { a b } theory { } structure { f = { a -> b } }", "total"),
        ("vocab { pred P/1 input } domain = { a } theory { } structure { }", "P"),
        (GOOD + "order = { a a }", "duplicate"),
        ("vocab { pred P/1 output } domain = { a } theory { ! x : P(x) } structure { }", "."),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError) as info:
        parse_problem(text)
    assert fragment in str(info.value)


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse_problem("vocab {\n  pred P/1 output\n}\ndomain = { a }\ntheory {\n  ! x : P(x) @ P(x).\n}\nstructure { }")
    assert info.value.line == 6


def test_comments_and_operators():
    kinds = [t.text for t in tokenize("a <=> b => c ~= d % comment\n!")]
    assert kinds[:7] == ["a", "<=>", "b", "=>", "c", "~=", "d"]
    assert "comment" not in kinds


def test_precedence(gc):
    phi = parse_formula("! x : V(x) | V(x) & C(x) => C(x) <=> C(x)", gc.symbols).body
    from locsym.logic import And, Iff, Implies, Or

    assert isinstance(phi, Iff)
    assert isinstance(phi.left, Implies)
    assert isinstance(phi.left.left, Or)
    assert isinstance(phi.left.left.parts[1], And)


def test_order_declaration():
    p = parse_problem(GOOD.replace("{ a }", "{ a b }") + "order = { b a }")
    assert p.order == ("b", "a")
    assert "order = { b a }" in format_problem(p)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_round_trip_random(seed):
    p = randgen.random_problem(random.Random(seed))
    text = format_problem(p)
    again = parse_problem(text)
    assert again == p
    assert format_problem(again) == text
