"""Occurrence-wise copying of input symbols.

Every syntactic occurrence of an input symbol ``S`` is replaced by a fresh
copy ``S#k`` (``k`` counts occurrences of ``S`` from 1, left to right through
the sentences). Each copy is interpreted exactly like ``S``; the underlying
frozenset/dict is shared, not duplicated.
"""

from __future__ import annotations

from dataclasses import dataclass

from .logic import (
    INPUT,
    Apply,
    Atom,
    Equals,
    Formula,
    Problem,
    Structure,
    Symbol,
    Term,
    Var,
    rebuild,
    subformulas,
)
from .syntax import RESERVED_SEPARATOR


@dataclass(frozen=True)
class Occurrence:
    original: str
    sentence: int
    path: tuple  # child indices from the sentence root down to the symbol


@dataclass(frozen=True, eq=False)
class Decomposition:
    problem: Problem  # theory over outputs and copies, structure over copies
    copy_map: dict  # copy name -> Occurrence

    @property
    def theory_star(self) -> tuple:
        return self.problem.theory

    @property
    def struct_star(self) -> Structure:
        return self.problem.structure

    def copies_of(self, original: str) -> list[str]:
        return [c for c, occ in self.copy_map.items() if occ.original == original]


def copy_name(original: str, k: int) -> str:
    return f"{original}{RESERVED_SEPARATOR}{k}"


def original_name(name: str) -> str:
    return name.split(RESERVED_SEPARATOR, 1)[0]


def decompose(problem: Problem) -> Decomposition:
    vocab = problem.vocabulary
    inputs = {s.name for s in problem.symbols if s.io == INPUT}
    counters: dict[str, int] = {}
    copy_map: dict[str, Occurrence] = {}
    copies: list[Symbol] = []
    interp: dict = {}

    def fresh(name: str, sentence: int, path: tuple) -> str:
        counters[name] = counters.get(name, 0) + 1
        new = copy_name(name, counters[name])
        copy_map[new] = Occurrence(name, sentence, path)
        sym = vocab[name]
        copies.append(Symbol(new, sym.arity, sym.kind, INPUT))
        interp[new] = problem.structure.interp[name]
        return new

    def term(t: Term, sentence: int, path: tuple) -> Term:
        if isinstance(t, Var):
            return t
        name = fresh(t.symbol, sentence, path) if t.symbol in inputs else t.symbol
        return Apply(name, tuple(term(a, sentence, path + (i,)) for i, a in enumerate(t.args)))

    def walk(phi: Formula, sentence: int, path: tuple) -> Formula:
        if isinstance(phi, Atom):
            name = fresh(phi.symbol, sentence, path) if phi.symbol in inputs else phi.symbol
            return Atom(name, tuple(term(a, sentence, path + (i,)) for i, a in enumerate(phi.args)))
        if isinstance(phi, Equals):
            return Equals(term(phi.left, sentence, path + (0,)), term(phi.right, sentence, path + (1,)))
        return rebuild(phi, [walk(s, sentence, path + (i,)) for i, s in enumerate(subformulas(phi))])

    theory = tuple(walk(phi, n, ()) for n, phi in enumerate(problem.theory))
    symbols = tuple(s for s in problem.symbols if s.io != INPUT) + tuple(copies)
    structure = Structure(problem.domain, tuple(copies), interp)
    star = Problem(symbols, problem.domain, theory, structure, problem.order)
    return Decomposition(star, copy_map)
