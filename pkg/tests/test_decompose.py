import random

from hypothesis import given, settings, strategies as st

from locsym.decompose import decompose, original_name
from locsym.logic import INPUT
from locsym.syntax import format_theory, parse_problem
from locsym.transform import mx_solutions

import randgen


def test_colouring_copies(gc_star):
    assert format_theory(gc_star.theory_star).splitlines() == [
        "! x1 y1 : Edge#1(x1, y1) => Color(x1) ~= Color(y1).",
        "! x2 y2 : Edge#2(x2, y2) => (V#1(x2) & V#2(y2)).",
        "! x3 : C#1(Color(x3)).",
    ]
    assert gc_star.copies_of("Edge") == ["Edge#1", "Edge#2"]
    assert gc_star.copies_of("Color") == []


def test_copies_share_interpretation(gc, gc_star):
    for copy, occ in gc_star.copy_map.items():
        assert original_name(copy) == occ.original
        assert gc_star.struct_star.interp[copy] is gc.structure.interp[occ.original]


def test_two_constants():
    p = parse_problem(
        "vocab { pred P/1 input func f/0 output func g/0 output } domain = { a b }"
        " theory { P(f) | P(g). } structure { P = { a } }"
    )
    star = decompose(p)
    assert format_theory(star.theory_star) == "P#1(f) | P#2(g).\n"
    assert [s.name for s in star.problem.input_symbols] == ["P#1", "P#2"]


def test_no_input_occurrence():
    p = parse_problem("vocab { pred P/1 output pred Q/1 input } domain = { a } theory { ! x : P(x). } structure { Q = { } }")
    star = decompose(p)
    assert star.theory_star == p.theory
    assert star.problem.input_symbols == ()
    assert star.copy_map == {}


def test_repeated_occurrence_in_one_atom():
    p = parse_problem(
        "vocab { pred E/2 input func c/0 input pred P/0 output } domain = { a b }"
        " theory { E(c, c) => P. } structure { E = { (a, a) } c = { () -> a } }"
    )
    star = decompose(p)
    assert format_theory(star.theory_star) == "E#1(c#1, c#2) => P.\n"


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_solution_preservation(seed):
    p = randgen.random_problem(random.Random(seed))
    star = decompose(p)
    before = {s.key() for s in mx_solutions(p)}
    after = {s.key() for s in mx_solutions(star.problem)}
    assert before == after
    for sym in p.symbols:
        if sym.io == INPUT:
            occurrences = format_theory(p.theory).count(sym.name + "(") + _bare(p, sym)
            assert len(star.copies_of(sym.name)) == occurrences


def _bare(p, sym) -> int:
    """Occurrences of 0-ary symbols, which print without parentheses."""
    if sym.arity:
        return 0
    import re

    return len(re.findall(rf"\b{sym.name}\b(?!\()", format_theory(p.theory)))
