"""First-order core: vocabularies, formulas, finite structures and evaluation.

Domain elements are plain strings. Variables and constants are both treated
as 0-ary function symbols, so a variable contributes an argument position
``x|0`` just like a constant does.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence, Union

PRED = "pred"
FUNC = "func"
INPUT = "input"
OUTPUT = "output"

DEFAULT_ENUMERATION_BUDGET = 2 ** 24


class EvaluationError(KeyError):
    """A symbol is not interpreted by the structure being evaluated."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "uninterpreted symbol"


class StructureError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    kind: str = PRED
    io: str = OUTPUT

    @property
    def is_function(self) -> bool:
        return self.kind == FUNC

    def positions(self) -> range:
        """Argument position indices; functions also own the output slot 0."""
        return range(0 if self.kind == FUNC else 1, self.arity + 1)


# --- terms -----------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Apply:
    symbol: str
    args: tuple = ()


Term = Union[Var, Apply]


# --- formulas --------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    symbol: str
    args: tuple = ()


@dataclass(frozen=True)
class Equals:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Or:
    parts: tuple


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    variables: tuple
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    variables: tuple
    body: "Formula"


Formula = Union[Atom, Equals, Not, And, Or, Implies, Iff, Forall, Exists]
Quantifier = (Forall, Exists)


def subformulas(phi: Formula) -> tuple:
    if isinstance(phi, Not):
        return (phi.body,)
    if isinstance(phi, (And, Or)):
        return phi.parts
    if isinstance(phi, (Implies, Iff)):
        return (phi.left, phi.right)
    if isinstance(phi, (Forall, Exists)):
        return (phi.body,)
    return ()


def rebuild(phi: Formula, children: Sequence[Formula]) -> Formula:
    """Return ``phi`` with its immediate subformulas replaced."""
    if isinstance(phi, Not):
        return Not(children[0])
    if isinstance(phi, And):
        return And(tuple(children))
    if isinstance(phi, Or):
        return Or(tuple(children))
    if isinstance(phi, Implies):
        return Implies(children[0], children[1])
    if isinstance(phi, Iff):
        return Iff(children[0], children[1])
    if isinstance(phi, Forall):
        return Forall(phi.variables, children[0])
    if isinstance(phi, Exists):
        return Exists(phi.variables, children[0])
    return phi


def term_symbols(t: Term) -> Iterator[tuple[str, int]]:
    if isinstance(t, Apply):
        yield t.symbol, len(t.args)
        for a in t.args:
            yield from term_symbols(a)


def formula_symbols(phi: Formula) -> Iterator[tuple[str, int]]:
    """Yield ``(name, arity)`` for every non-variable symbol occurrence."""
    if isinstance(phi, Atom):
        yield phi.symbol, len(phi.args)
        for a in phi.args:
            yield from term_symbols(a)
    elif isinstance(phi, Equals):
        yield from term_symbols(phi.left)
        yield from term_symbols(phi.right)
    else:
        for sub in subformulas(phi):
            yield from formula_symbols(sub)


def bound_variables(phi: Formula) -> Iterator[str]:
    if isinstance(phi, Quantifier):
        yield from phi.variables
    for sub in subformulas(phi):
        yield from bound_variables(sub)


# --- renaming apart --------------------------------------------------------


def _is_apart(theory: Sequence[Formula], reserved: set) -> bool:
    seen: set = set()
    for phi in theory:
        for v in bound_variables(phi):
            if v in seen or v in reserved:
                return False
            seen.add(v)
    return True


def _base_name(name: str) -> str:
    stripped = name.rstrip("0123456789")
    return stripped or name


def rename_apart(theory: Sequence[Formula], reserved: Sequence[str] = ()) -> tuple:
    """Give every quantifier its own variable.

    A theory that is already apart is returned unchanged. Otherwise each bound
    variable is renamed to its base name (trailing digits stripped) plus a
    per-base counter, in left-to-right sentence order, so ``!x:P(x)`` and a
    later ``!x:Q(x)`` become ``x1`` and ``x2``. Names in ``reserved`` (the
    vocabulary) are never produced.
    """
    reserved_set = set(reserved)
    theory = tuple(theory)
    if _is_apart(theory, reserved_set):
        return theory
    counters: dict[str, int] = {}

    def fresh(name: str) -> str:
        base = _base_name(name)
        while True:
            counters[base] = counters.get(base, 0) + 1
            candidate = f"{base}{counters[base]}"
            if candidate not in reserved_set:
                return candidate

    def term(t: Term, env: Mapping[str, str]) -> Term:
        if isinstance(t, Var):
            return Var(env.get(t.name, t.name))
        return Apply(t.symbol, tuple(term(a, env) for a in t.args))

    def walk(phi: Formula, env: Mapping[str, str]) -> Formula:
        if isinstance(phi, Atom):
            return Atom(phi.symbol, tuple(term(a, env) for a in phi.args))
        if isinstance(phi, Equals):
            return Equals(term(phi.left, env), term(phi.right, env))
        if isinstance(phi, Quantifier):
            inner = dict(env)
            names = []
            for v in phi.variables:
                inner[v] = fresh(v)
                names.append(inner[v])
            return type(phi)(tuple(names), walk(phi.body, inner))
        return rebuild(phi, [walk(s, env) for s in subformulas(phi)])

    return tuple(walk(phi, {}) for phi in theory)


# --- structures ------------------------------------------------------------


def all_tuples(domain: Sequence[str], arity: int) -> list[tuple]:
    return list(itertools.product(domain, repeat=arity))


@dataclass(frozen=True, eq=False)
class Structure:
    """A finite structure.

    ``interp`` maps a predicate name to a frozenset of tuples and a function
    name to a dict from argument tuples to an element. Treat both as
    immutable; transformations build new structures and share untouched
    interpretations.
    """

    domain: tuple
    symbols: tuple = ()
    interp: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        names = [s.name for s in self.symbols]
        if len(set(names)) != len(names):
            raise StructureError("duplicate symbol in structure vocabulary")

    @property
    def vocabulary(self) -> dict[str, Symbol]:
        return {s.name: s for s in self.symbols}

    def relation(self, name: str) -> frozenset:
        return self.interp[name]  # type: ignore[return-value]

    def function(self, name: str) -> Mapping[tuple, str]:
        return self.interp[name]  # type: ignore[return-value]

    def key(self) -> tuple:
        """Canonical hashable form, used for equality and set membership."""
        parts = []
        for s in sorted(self.symbols, key=lambda s: s.name):
            value = self.interp[s.name]
            if s.is_function:
                parts.append((s.name, tuple(sorted(value.items()))))
            else:
                parts.append((s.name, tuple(sorted(value))))
        return (self.domain, tuple(parts))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Structure):
            return NotImplemented
        if self.domain != other.domain or set(self.symbols) != set(other.symbols):
            return False
        return all(self.interp[s.name] == other.interp[s.name] for s in self.symbols)

    def __hash__(self) -> int:
        return hash(self.key())

    def validate(self) -> None:
        members = set(self.domain)
        for s in self.symbols:
            value = self.interp.get(s.name)
            if value is None:
                raise StructureError(f"{s.name} is not interpreted")
            if s.is_function:
                for args in all_tuples(self.domain, s.arity):
                    if args not in value:
                        raise StructureError(f"{s.name} is not total: missing {args}")
                for args, out in value.items():
                    if len(args) != s.arity or out not in members or not set(args) <= members:
                        raise StructureError(f"bad entry {args}->{out} for {s.name}")
            else:
                for tup in value:
                    if len(tup) != s.arity:
                        raise StructureError(f"arity mismatch in {s.name}{tup}")
                    if not set(tup) <= members:
                        raise StructureError(f"{s.name}{tup} leaves the domain")


def merge_structures(first: Structure, second: Structure) -> Structure:
    """Disjoint union of two structures over the same domain."""
    if first.domain != second.domain:
        raise StructureError("domain mismatch")
    overlap = {s.name for s in first.symbols} & {s.name for s in second.symbols}
    if overlap:
        raise StructureError(f"overlapping symbols: {sorted(overlap)}")
    return Structure(
        first.domain,
        first.symbols + second.symbols,
        {**first.interp, **second.interp},
    )


@dataclass(frozen=True, eq=False)
class Problem:
    """A model expansion instance: theory, vocabulary and input structure."""

    symbols: tuple
    domain: tuple
    theory: tuple
    structure: Structure
    order: tuple = ()

    def __post_init__(self) -> None:
        if not self.order:
            object.__setattr__(self, "order", tuple(self.domain))

    @property
    def vocabulary(self) -> dict[str, Symbol]:
        return {s.name: s for s in self.symbols}

    @property
    def input_symbols(self) -> tuple:
        return tuple(s for s in self.symbols if s.io == INPUT)

    @property
    def output_symbols(self) -> tuple:
        return tuple(s for s in self.symbols if s.io == OUTPUT)

    @property
    def rank(self) -> dict[str, int]:
        """Position of each element in the total order used for breaking."""
        return {d: i for i, d in enumerate(self.order)}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Problem):
            return NotImplemented
        return (
            self.symbols == other.symbols
            and self.domain == other.domain
            and self.theory == other.theory
            and self.order == other.order
            and self.structure == other.structure
        )

    __hash__ = None  # type: ignore[assignment]


# --- evaluation ------------------------------------------------------------

Env = dict
Compiled = Callable[[Mapping[str, object], Env], bool]


def _compile_term(t: Term) -> Callable[[Mapping[str, object], Env], str]:
    if isinstance(t, Var):
        name = t.name

        def var(itp, env):
            try:
                return env[name]
            except KeyError:
                raise EvaluationError(f"unbound variable {name}") from None

        return var
    symbol = t.symbol
    args = [_compile_term(a) for a in t.args]

    def app(itp, env):
        try:
            table = itp[symbol]
        except KeyError:
            raise EvaluationError(f"uninterpreted symbol {symbol}") from None
        return table[tuple(a(itp, env) for a in args)]

    return app


def compile_formula(phi: Formula, domain: Sequence[str]) -> Compiled:
    """Turn ``phi`` into a closure over (interpretation dict, variable env)."""
    domain = tuple(domain)
    if isinstance(phi, Atom):
        symbol = phi.symbol
        args = [_compile_term(a) for a in phi.args]

        def atom(itp, env):
            try:
                rel = itp[symbol]
            except KeyError:
                raise EvaluationError(f"uninterpreted symbol {symbol}") from None
            return tuple(a(itp, env) for a in args) in rel

        return atom
    if isinstance(phi, Equals):
        left, right = _compile_term(phi.left), _compile_term(phi.right)
        return lambda itp, env: left(itp, env) == right(itp, env)
    if isinstance(phi, Not):
        body = compile_formula(phi.body, domain)
        return lambda itp, env: not body(itp, env)
    if isinstance(phi, And):
        parts = [compile_formula(p, domain) for p in phi.parts]
        return lambda itp, env: all(p(itp, env) for p in parts)
    if isinstance(phi, Or):
        parts = [compile_formula(p, domain) for p in phi.parts]
        return lambda itp, env: any(p(itp, env) for p in parts)
    if isinstance(phi, Implies):
        left, right = compile_formula(phi.left, domain), compile_formula(phi.right, domain)
        return lambda itp, env: (not left(itp, env)) or right(itp, env)
    if isinstance(phi, Iff):
        left, right = compile_formula(phi.left, domain), compile_formula(phi.right, domain)
        return lambda itp, env: left(itp, env) == right(itp, env)
    if isinstance(phi, Quantifier):
        body = compile_formula(phi.body, domain)
        names = phi.variables
        universal = isinstance(phi, Forall)

        def quant(itp, env):
            saved = [env.get(v) for v in names]
            try:
                for values in itertools.product(domain, repeat=len(names)):
                    env.update(zip(names, values))
                    if body(itp, env) != universal:
                        return not universal
                return universal
            finally:
                for v, old in zip(names, saved):
                    if old is None:
                        env.pop(v, None)
                    else:
                        env[v] = old

        return quant
    raise TypeError(f"not a formula: {phi!r}")


class Evaluator:
    """A theory compiled once and checked against many structures."""

    def __init__(self, theory: Sequence[Formula], domain: Sequence[str]):
        self.domain = tuple(domain)
        self._sentences = [compile_formula(phi, self.domain) for phi in theory]

    def models(self, interp: Mapping[str, object]) -> bool:
        return all(s(interp, {}) for s in self._sentences)


def eval_term(t: Term, structure: Structure, env: Mapping[str, str] | None = None) -> str:
    return _compile_term(t)(structure.interp, dict(env or {}))


def eval_formula(phi: Formula, structure: Structure, env: Mapping[str, str] | None = None) -> bool:
    return compile_formula(phi, structure.domain)(structure.interp, dict(env or {}))


def check_models(structure: Structure, theory: Sequence[Formula]) -> bool:
    """True iff ``structure`` satisfies every sentence of ``theory``."""
    return Evaluator(theory, structure.domain).models(structure.interp)


# --- brute-force enumeration -----------------------------------------------


def count_candidates(symbols: Sequence[Symbol], domain_size: int) -> int:
    total = 1
    for s in symbols:
        slots = domain_size ** s.arity
        total *= domain_size ** slots if s.is_function else 2 ** slots
    return total


def _symbol_interpretations(symbol: Symbol, domain: tuple) -> Iterator[object]:
    tuples = all_tuples(domain, symbol.arity)
    if symbol.is_function:
        for values in itertools.product(domain, repeat=len(tuples)):
            yield dict(zip(tuples, values))
    else:
        for mask in range(2 ** len(tuples)):
            yield frozenset(t for i, t in enumerate(tuples) if mask >> i & 1)


def enumerate_structures(
    symbols: Sequence[Symbol],
    domain: Sequence[str],
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> Iterator[Structure]:
    """Every structure over ``domain`` for ``symbols``, each exactly once."""
    symbols = tuple(symbols)
    domain = tuple(domain)
    total = count_candidates(symbols, len(domain))
    if total > budget:
        raise BudgetExceeded(f"{total} candidate structures exceed budget {budget}")

    def rec(i: int, acc: dict) -> Iterator[Structure]:
        if i == len(symbols):
            yield Structure(domain, symbols, dict(acc))
            return
        for value in _symbol_interpretations(symbols[i], domain):
            acc[symbols[i].name] = value
            yield from rec(i + 1, acc)
        acc.pop(symbols[i].name, None)

    yield from rec(0, {})


def enumerate_expansions(problem: Problem, budget: int = DEFAULT_ENUMERATION_BUDGET) -> Iterator[Structure]:
    """Stream every output structure of ``problem``; no filtering."""
    return enumerate_structures(problem.output_symbols, problem.domain, budget)


def solutions(problem: Problem, budget: int = DEFAULT_ENUMERATION_BUDGET) -> Iterator[Structure]:
    """Output structures that expand the input structure to a model."""
    evaluator = Evaluator(problem.theory, problem.domain)
    base = dict(problem.structure.interp)
    for out in enumerate_expansions(problem, budget):
        if evaluator.models({**base, **out.interp}):
            yield out
