import random

import pytest
from hypothesis import given, settings, strategies as st

from locsym import bench
from locsym.ground import (
    Cnf,
    GroundAtom,
    GroundingError,
    emit_dimacs,
    exactly_one,
    ground_theory,
    parse_dimacs,
)
from locsym.solve import UNSAT, count_models, projected_models, sat_solve
from locsym.syntax import parse_problem
from locsym.transform import mx_solutions

import randgen


def test_forall_gives_units():
    p = parse_problem("vocab { pred P/1 output } domain = { a b } theory { ! x : P(x). } structure { }")
    cnf, catalog = ground_theory(p)
    a, b = catalog.id(GroundAtom("P", ("a",))), catalog.id(GroundAtom("P", ("b",)))
    assert sorted(map(sorted, cnf.clauses)) == [[a], [b]]


def test_colouring_size_and_count(gc):
    cnf, catalog = ground_theory(gc)
    assert len(catalog) == 49
    assert count_models(cnf, range(1, len(catalog) + 1)) == 486


def test_small_pigeonhole_unsat():
    cnf, _ = ground_theory(bench.generate_pigeonhole(3))
    assert sat_solve(cnf).status == UNSAT


def test_dimacs_format():
    assert emit_dimacs(Cnf(0, [])) == "p cnf 0 0"
    assert emit_dimacs(Cnf(2, [(1, -2)])) == "p cnf 2 1\n1 -2 0"
    with pytest.raises(ValueError):
        Cnf(1, []).add((2,))


def test_dimacs_round_trip(gc):
    cnf, _ = ground_theory(gc)
    back = parse_dimacs(emit_dimacs(cnf))
    assert back.num_vars == cnf.num_vars
    assert sorted(map(sorted, back.clauses)) == sorted(map(sorted, cnf.clauses))


def test_dimacs_parses_external_style():
    cnf = parse_dimacs("c hello\np cnf 3 2\n1 -3\n 0 2 3 0\n")
    assert cnf.num_vars == 3
    assert [tuple(c) for c in cnf.clauses] == [(1, -3), (2, 3)]


def test_false_sentence_is_recorded_or_raised():
    text = "vocab { pred Q/1 input pred P/0 output } domain = { a } theory { ! x : Q(x). } structure { Q = { } }"
    p = parse_problem(text)
    cnf, _ = ground_theory(p)
    assert () in [tuple(c) for c in cnf.clauses]
    assert cnf.notes and cnf.notes[0].endswith("at x=a")
    with pytest.raises(GroundingError):
        ground_theory(p, strict=True)


@pytest.mark.parametrize("n", [1, 2, 5, 12, 13, 20])
def test_exactly_one(n):
    cnf = Cnf(n, [])
    exactly_one(cnf, list(range(1, n + 1)))
    models = projected_models(cnf, range(1, n + 1))
    assert sorted(len(m) for m in models) == [1] * n


def test_catalog_encode_decode(gc, gc_solutions):
    _, catalog = ground_theory(gc)
    for s in gc_solutions[:20]:
        lits = catalog.encode(s)
        assert catalog.decode([v for v in lits if v > 0], gc).key() == s.key()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_grounding_matches_enumeration(seed):
    p = randgen.random_problem(random.Random(seed))
    cnf, catalog = ground_theory(p)
    got = {catalog.decode(sorted(m), p).key() for m in projected_models(cnf, range(1, len(catalog) + 1))}
    assert got == {s.key() for s in mx_solutions(p)}
