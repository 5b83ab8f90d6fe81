"""Grounding a theory over a finite domain into CNF over output atoms.

Input symbols are evaluated away. Output predicates become propositional
atoms; an output function ``f`` becomes its graph atoms ``f(d)=e`` with an
exactly-one constraint per argument tuple. Terms are represented by their
value cases (condition, element); conditions are NNF circuits that are
clausified with one-sided Tseitin definitions.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

from .logic import (
    DEFAULT_ENUMERATION_BUDGET,
    And,
    Apply,
    Atom,
    BudgetExceeded,
    Equals,
    Exists,
    Forall,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Problem,
    Structure,
    Symbol,
    Term,
    Var,
    all_tuples,
)
from .syntax import format_formula

PAIRWISE_LIMIT = 12


class GroundingError(ValueError):
    pass


class GroundAtom(NamedTuple):
    symbol: str
    args: tuple
    value: str | None = None  # set for function-graph atoms

    @property
    def row(self) -> tuple:
        return self.args if self.value is None else self.args + (self.value,)

    def label(self) -> str:
        inner = f"({','.join(self.args)})" if self.args else ""
        return f"{self.symbol}{inner}" if self.value is None else f"{self.symbol}{inner}={self.value}"


def output_atoms(symbols: Iterable[Symbol], order: Sequence[str]) -> list[GroundAtom]:
    """Ground atoms of ``symbols`` in declaration order, rows lex by ``order``."""
    atoms = []
    for sym in symbols:
        if sym.is_function:
            for row in all_tuples(order, sym.arity + 1):
                atoms.append(GroundAtom(sym.name, row[:-1], row[-1]))
        else:
            atoms.extend(GroundAtom(sym.name, row) for row in all_tuples(order, sym.arity))
    return atoms


class AtomCatalog:
    """Dense ids 1..n for the ground output atoms."""

    def __init__(self, atoms: Iterable[GroundAtom]):
        self.atoms = list(atoms)
        self.ids = {a: i for i, a in enumerate(self.atoms, start=1)}
        if len(self.ids) != len(self.atoms):
            raise ValueError("duplicate atoms in catalog")

    @classmethod
    def for_problem(cls, problem: Problem) -> "AtomCatalog":
        return cls(output_atoms(problem.output_symbols, problem.order))

    def __len__(self) -> int:
        return len(self.atoms)

    def id(self, atom: GroundAtom) -> int:
        return self.ids[atom]

    def atom(self, var: int) -> GroundAtom:
        return self.atoms[var - 1]

    def as_json(self) -> dict:
        return {str(i): a.label() for i, a in enumerate(self.atoms, start=1)}

    def decode(self, assignment: Sequence[int] | set, problem: Problem) -> Structure:
        """Output structure from the positive literals among catalog ids."""
        true = {v for v in assignment if 0 < v <= len(self.atoms)}
        interp: dict = {}
        for sym in problem.output_symbols:
            interp[sym.name] = {} if sym.is_function else set()
        for v in sorted(true):
            a = self.atoms[v - 1]
            if a.value is None:
                interp[a.symbol].add(a.args)
            else:
                interp[a.symbol][a.args] = a.value
        for sym in problem.output_symbols:
            if not sym.is_function:
                interp[sym.name] = frozenset(interp[sym.name])
        return Structure(problem.domain, problem.output_symbols, interp)

    def encode(self, structure: Structure) -> list[int]:
        """Full assignment (signed ids) describing an output structure."""
        out = []
        for i, a in enumerate(self.atoms, start=1):
            value = structure.interp[a.symbol]
            if a.value is None:
                true = a.args in value
            else:
                true = value.get(a.args) == a.value
            out.append(i if true else -i)
        return out


@dataclass
class Cnf:
    num_vars: int = 0
    clauses: list = field(default_factory=list)
    comments: dict = field(default_factory=dict)  # var id -> label
    notes: list = field(default_factory=list)

    def new_var(self, label: str | None = None) -> int:
        self.num_vars += 1
        if label is not None:
            self.comments[self.num_vars] = label
        return self.num_vars

    def add(self, clause: Iterable[int]) -> None:
        c = tuple(clause)
        for lit in c:
            if lit == 0 or abs(lit) > self.num_vars:
                raise ValueError(f"literal {lit} outside 1..{self.num_vars}")
        self.clauses.append(c)

    def extend(self, clauses: Iterable[Iterable[int]]) -> None:
        for c in clauses:
            self.add(c)

    def copy(self) -> "Cnf":
        return Cnf(self.num_vars, list(self.clauses), dict(self.comments), list(self.notes))


def emit_dimacs(cnf: Cnf) -> str:
    """DIMACS text without a trailing newline."""
    lines = [f"c {v} {label}" for v, label in sorted(cnf.comments.items())]
    lines.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    lines += [" ".join(map(str, c)) + " 0" for c in cnf.clauses]
    return "\n".join(lines)


def parse_dimacs(text: str) -> Cnf:
    cnf = Cnf()
    declared = None
    current: list = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("c"):
            parts = line.split(None, 2)
            if len(parts) == 3 and parts[1].isdigit():
                cnf.comments[int(parts[1])] = parts[2]
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad header: {line!r}")
            cnf.num_vars, declared = int(parts[2]), int(parts[3])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                cnf.clauses.append(tuple(current))
                current = []
            else:
                current.append(lit)
    if current:
        cnf.clauses.append(tuple(current))
    if declared is not None and declared != len(cnf.clauses):
        raise ValueError(f"header declares {declared} clauses, found {len(cnf.clauses)}")
    return cnf


def catalog_json(catalog: AtomCatalog, extra: dict | None = None) -> str:
    return json.dumps({"atoms": catalog.as_json(), **(extra or {})}, indent=2)


# --- NNF circuits ------------------------------------------------------------
# A node is True, False, a nonzero int literal, or ("and"|"or", frozenset).

TRUE, FALSE = True, False


def mk_and(parts: Iterable) -> object:
    items = set()
    for p in parts:
        if p is FALSE:
            return FALSE
        if p is TRUE:
            continue
        if isinstance(p, tuple) and p[0] == "and":
            items.update(p[1])
        else:
            items.add(p)
    if not items:
        return TRUE
    if any(isinstance(i, int) and not isinstance(i, bool) and -i in items for i in items):
        return FALSE
    return next(iter(items)) if len(items) == 1 else ("and", frozenset(items))


def mk_or(parts: Iterable) -> object:
    items = set()
    for p in parts:
        if p is TRUE:
            return TRUE
        if p is FALSE:
            continue
        if isinstance(p, tuple) and p[0] == "or":
            items.update(p[1])
        else:
            items.add(p)
    if not items:
        return FALSE
    if any(isinstance(i, int) and not isinstance(i, bool) and -i in items for i in items):
        return TRUE
    return next(iter(items)) if len(items) == 1 else ("or", frozenset(items))


def neg(node: object) -> object:
    if node is TRUE:
        return FALSE
    if node is FALSE:
        return TRUE
    if isinstance(node, int):
        return -node
    kind, parts = node
    return (mk_or if kind == "and" else mk_and)(neg(p) for p in parts)


class _Grounder:
    def __init__(self, problem: Problem, catalog: AtomCatalog, budget: int):
        self.problem = problem
        self.domain = tuple(problem.order)
        self.catalog = catalog
        self.vocab = problem.vocabulary
        self.outputs = {s.name for s in problem.output_symbols}
        self.interp = problem.structure.interp
        self.budget = budget
        self.steps = 0
        self.witness: dict | None = None  # first universal instantiation found false

    def tick(self, n: int = 1) -> None:
        self.steps += n
        if self.steps > self.budget:
            raise BudgetExceeded(f"grounding exceeds {self.budget} instantiations")

    def cases(self, t: Term, env: dict) -> dict:
        """Map element -> condition under which ``t`` denotes it."""
        if isinstance(t, Var):
            return {env[t.name]: TRUE}
        out: dict = {}
        arg_cases = [list(self.cases(a, env).items()) for a in t.args]
        output = t.symbol in self.outputs
        table = None if output else self.interp[t.symbol]
        for combo in itertools.product(*arg_cases):
            self.tick()
            args = tuple(v for v, _ in combo)
            cond = mk_and(c for _, c in combo)
            if cond is FALSE:
                continue
            if output:
                for e in self.domain:
                    lit = self.catalog.id(GroundAtom(t.symbol, args, e))
                    c = mk_and((cond, lit))
                    out[e] = mk_or((out[e], c)) if e in out else c
            else:
                e = table[args]
                out[e] = mk_or((out[e], cond)) if e in out else cond
        return out

    def formula(self, phi: Formula, env: dict) -> object:
        if isinstance(phi, Atom):
            arg_cases = [list(self.cases(a, env).items()) for a in phi.args]
            output = phi.symbol in self.outputs
            rel = None if output else self.interp[phi.symbol]
            parts = []
            for combo in itertools.product(*arg_cases):
                self.tick()
                args = tuple(v for v, _ in combo)
                if output:
                    truth = self.catalog.id(GroundAtom(phi.symbol, args))
                else:
                    truth = args in rel
                parts.append(mk_and([c for _, c in combo] + [truth]))
            return mk_or(parts)
        if isinstance(phi, Equals):
            left = self.cases(phi.left, env)
            right = self.cases(phi.right, env)
            return mk_or(mk_and((c, right[e])) for e, c in left.items() if e in right)
        if isinstance(phi, Not):
            return neg(self.formula(phi.body, env))
        if isinstance(phi, And):
            return mk_and(self._lazy(phi.parts, env, FALSE))
        if isinstance(phi, Or):
            return mk_or(self._lazy(phi.parts, env, TRUE))
        if isinstance(phi, Implies):
            left = self.formula(phi.left, env)
            if left is FALSE:
                return TRUE
            return mk_or((neg(left), self.formula(phi.right, env)))
        if isinstance(phi, Iff):
            a, b = self.formula(phi.left, env), self.formula(phi.right, env)
            return mk_and((mk_or((neg(a), b)), mk_or((a, neg(b)))))
        if isinstance(phi, (Forall, Exists)):
            universal = isinstance(phi, Forall)
            stop = FALSE if universal else TRUE
            parts = []
            for values in itertools.product(self.domain, repeat=len(phi.variables)):
                self.tick()
                inner = dict(env)
                inner.update(zip(phi.variables, values))
                node = self.formula(phi.body, inner)
                if node is stop:
                    if universal and self.witness is None:
                        self.witness = inner
                    return stop
                parts.append(node)
            return (mk_and if universal else mk_or)(parts)
        raise TypeError(f"not a formula: {phi!r}")

    def _lazy(self, parts, env, stop):
        for p in parts:
            node = self.formula(p, env)
            yield node
            if node is stop:
                return


class _Clausifier:
    """Plaisted-Greenbaum: an auxiliary literal only implies its subcircuit."""

    def __init__(self, cnf: Cnf):
        self.cnf = cnf
        self.cache: dict = {}
        self.seen: set = set()

    def emit(self, clause: Iterable[int]) -> None:
        key = tuple(sorted(set(clause)))
        if any(-l in key for l in key):
            return
        if key not in self.seen:
            self.seen.add(key)
            self.cnf.add(key)

    def top(self, node: object) -> None:
        if node is TRUE:
            return
        if node is FALSE:
            self.emit(())
        elif isinstance(node, int):
            self.emit((node,))
        elif node[0] == "and":
            for p in sorted(node[1], key=_node_key):
                self.top(p)
        else:
            self.emit(self.literal(p) for p in sorted(node[1], key=_node_key))

    def literal(self, node: object) -> int:
        if isinstance(node, int) and not isinstance(node, bool):
            return node
        if node in self.cache:
            return self.cache[node]
        z = self.cnf.new_var()
        self.cache[node] = z
        kind, parts = node
        ordered = sorted(parts, key=_node_key)
        if kind == "and":
            for p in ordered:
                self.emit((-z, self.literal(p)))
        else:
            self.emit([-z] + [self.literal(p) for p in ordered])
        return z


def _node_key(node: object) -> tuple:
    if isinstance(node, int):
        return (0, abs(node), node)
    return (1, node[0], sorted(map(_node_key, node[1])))


def exactly_one(cnf: Cnf, lits: Sequence[int], emit=None) -> None:
    """At-least-one plus pairwise (small) or sequential-counter (large) at-most-one."""
    add = emit or cnf.add
    add(tuple(lits))
    n = len(lits)
    if n <= PAIRWISE_LIMIT:
        for i in range(n):
            for j in range(i + 1, n):
                add((-lits[i], -lits[j]))
        return
    s = [cnf.new_var() for _ in range(n - 1)]
    add((-lits[0], s[0]))
    for i in range(1, n - 1):
        add((-lits[i], s[i]))
        add((-s[i - 1], s[i]))
        add((-lits[i], -s[i - 1]))
    add((-lits[n - 1], -s[n - 2]))


def ground_theory(
    problem: Problem,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    strict: bool = False,
) -> tuple[Cnf, AtomCatalog]:
    """CNF whose models, restricted to catalog ids, are the MX solutions.

    A sentence that grounds to false yields the empty clause and a note
    naming it; with ``strict`` it raises instead.
    """
    catalog = AtomCatalog.for_problem(problem)
    cnf = Cnf(num_vars=len(catalog), comments={i: a.label() for i, a in enumerate(catalog.atoms, 1)})
    clausifier = _Clausifier(cnf)
    domain = tuple(problem.order)
    for sym in problem.output_symbols:
        if sym.is_function:
            for args in all_tuples(domain, sym.arity):
                lits = [catalog.id(GroundAtom(sym.name, args, e)) for e in domain]
                exactly_one(cnf, lits, clausifier.emit)
    grounder = _Grounder(problem, catalog, budget)
    for n, phi in enumerate(problem.theory):
        grounder.witness = None
        node = grounder.formula(phi, {})
        if node is FALSE:
            message = f"sentence {n + 1} is false under the input structure: {format_formula(phi)}"
            if grounder.witness:
                message += " at " + ", ".join(f"{k}={v}" for k, v in grounder.witness.items())
            if strict:
                raise GroundingError(message)
            cnf.notes.append(message)
        clausifier.top(node)
    return cnf, catalog
