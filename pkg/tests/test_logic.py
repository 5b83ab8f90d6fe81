import random

import pytest
from hypothesis import given, settings, strategies as st

from locsym.logic import (
    FUNC,
    INPUT,
    OUTPUT,
    PRED,
    And,
    Apply,
    Atom,
    BudgetExceeded,
    EvaluationError,
    Evaluator,
    Forall,
    Problem,
    Structure,
    StructureError,
    Symbol,
    Var,
    check_models,
    count_candidates,
    enumerate_expansions,
    enumerate_structures,
    eval_term,
    merge_structures,
    rename_apart,
    solutions,
)
from locsym.syntax import parse_formula, parse_problem

import randgen

COLOR_OUT = {"t": "r", "u": "g", "v": "b", "w": "g", "r": "r", "g": "g", "b": "b"}


def color_structure(gc, table=COLOR_OUT):
    sym = gc.vocabulary["Color"]
    return Structure(gc.domain, (sym,), {"Color": {(d,): e for d, e in table.items()}})


def test_colouring_edge_relation(gc):
    assert gc.structure.relation("Edge") == {("t", "u"), ("u", "v"), ("v", "w"), ("w", "t")}
    assert gc.domain == ("t", "u", "v", "w", "r", "g", "b")
    assert [s.name for s in gc.output_symbols] == ["Color"]


def test_colouring_variables_renamed(gc):
    names = [v for phi in gc.theory for v in _bound(phi)]
    assert names == ["x1", "y1", "x2", "y2", "x3"]


def _bound(phi):
    from locsym.logic import bound_variables

    return list(bound_variables(phi))


def test_rename_apart_splits_shared_names():
    syms = [Symbol("P", 1, PRED), Symbol("Q", 1, PRED)]
    theory = (Forall(("x",), Atom("P", (Var("x"),))), Forall(("x",), Atom("Q", (Var("x"),))))
    out = rename_apart(theory)
    assert out[0] == Forall(("x1",), Atom("P", (Var("x1"),)))
    assert out[1] == Forall(("x2",), Atom("Q", (Var("x2"),)))
    assert rename_apart(out) == out
    assert syms  # vocabulary unused by renaming


def test_eval_term_color_of_t(gc):
    full = merge_structures(gc.structure, color_structure(gc))
    assert eval_term(Apply("Color", (Var("x"),)), full, {"x": "t"}) == "r"


def test_eval_term_constant_and_nesting():
    dom = ("a", "b")
    f = Symbol("f", 1, FUNC)
    g = Symbol("g", 1, FUNC)
    c = Symbol("c", 0, FUNC)
    s = Structure(dom, (f, g, c), {"f": {("a",): "b", ("b",): "b"}, "g": {("a",): "b", ("b",): "a"}, "c": {(): "a"}})
    assert eval_term(Apply("c"), s) == "a"
    # g(c) = b, f(b) = b
    assert eval_term(Apply("f", (Apply("g", (Apply("c"),)),)), s) == "b"
    with pytest.raises(EvaluationError):
        eval_term(Apply("h"), s)


def test_check_models_colouring(gc):
    full = merge_structures(gc.structure, color_structure(gc))
    assert check_models(full, gc.theory)
    assert check_models(full, ())
    bad = dict(COLOR_OUT, u="r")
    assert not check_models(merge_structures(gc.structure, color_structure(gc, bad)), gc.theory)


def test_merge_structures_errors(gc):
    empty = Structure(gc.domain, (), {})
    assert merge_structures(gc.structure, empty) == gc.structure
    with pytest.raises(StructureError):
        merge_structures(gc.structure, gc.structure)
    other = Structure(("a",), (), {})
    with pytest.raises(StructureError):
        merge_structures(gc.structure, other)


def test_enumerate_small_and_color_counts(gc, gc_solutions):
    p = parse_problem("vocab { pred P/1 output } domain = { a b } theory { } structure { }")
    assert len(list(enumerate_expansions(p))) == 4
    assert count_candidates(gc.output_symbols, 7) == 7 ** 7 == 823543
    assert len(gc_solutions) == 486
    assert next(iter(solutions(gc))) == gc_solutions[0]


def test_enumeration_budget():
    syms = [Symbol("P", 2, PRED)]
    with pytest.raises(BudgetExceeded):
        list(enumerate_structures(syms, ("a", "b", "c"), budget=100))


def test_enumeration_each_once():
    syms = [Symbol("f", 1, FUNC), Symbol("P", 0, PRED)]
    keys = [s.key() for s in enumerate_structures(syms, ("a", "b"))]
    assert len(keys) == len(set(keys)) == 8


def test_structure_validation():
    with pytest.raises(StructureError):
        Structure(("a",), (Symbol("f", 1, FUNC),), {"f": {}}).validate()
    with pytest.raises(StructureError):
        Structure(("a",), (Symbol("P", 1, PRED),), {"P": frozenset({("z",)})}).validate()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_evaluator_compositional(seed):
    rng = random.Random(seed)
    syms, dom, theory = randgen.random_model_theory(rng, slot_budget=1 << 8)
    whole = Evaluator(theory, dom)
    head, tail = Evaluator(theory[:1], dom), Evaluator(theory[1:], dom)
    for s in enumerate_structures(syms, dom):
        assert whole.models(s.interp) == (head.models(s.interp) and tail.models(s.interp))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_rename_apart_preserves_models(seed):
    rng = random.Random(seed)
    syms, dom, theory = randgen.random_model_theory(rng, slot_budget=1 << 8)
    clashing = tuple(_rename_all(phi, "z") for phi in theory)
    fixed = rename_apart(clashing)
    a, b = Evaluator(theory, dom), Evaluator(fixed, dom)
    for s in enumerate_structures(syms, dom):
        assert a.models(s.interp) == b.models(s.interp)


def _rename_all(phi, name):
    """Reuse one variable name everywhere (shadowing keeps the meaning)."""
    from locsym.logic import Equals, Exists, Quantifier, rebuild, subformulas

    def term(t, env):
        if isinstance(t, Var):
            return Var(env.get(t.name, t.name))
        return Apply(t.symbol, tuple(term(a, env) for a in t.args))

    def walk(f, env, depth):
        if isinstance(f, Atom):
            return Atom(f.symbol, tuple(term(a, env) for a in f.args))
        if isinstance(f, Equals):
            return Equals(term(f.left, env), term(f.right, env))
        if isinstance(f, Quantifier):
            inner = dict(env)
            names = []
            for i, v in enumerate(f.variables):
                inner[v] = f"{name}{depth}_{i}" if depth else f"{name}_{i}"
                names.append(inner[v])
            return type(f)(tuple(names), walk(f.body, inner, depth + 1))
        return rebuild(f, [walk(s, env, depth) for s in subformulas(f)])

    return walk(phi, {}, 0)


def test_problem_defaults(gc):
    assert gc.order == gc.domain
    assert [s.name for s in gc.input_symbols] == ["V", "C", "Edge"]
    p = Problem(gc.symbols, gc.domain, gc.theory, gc.structure)
    assert p == gc
    assert INPUT != OUTPUT
