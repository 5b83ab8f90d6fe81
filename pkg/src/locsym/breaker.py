"""Lex-leader symmetry breaking clauses over ground output atoms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .argpos import ArgPos
from .ground import AtomCatalog, Cnf, GroundAtom, output_atoms
from .logic import Problem
from .transform import DomainPermutation, InducedTransform, transposition
from .unionfind import DisjointSet


class BreakingError(ValueError):
    pass


@dataclass(frozen=True)
class GroundAtomOrder:
    """Output atoms of the symbols touched by ``A``; false sorts before true."""

    atoms: tuple
    A: frozenset
    order: tuple  # the element order used for rows

    def index(self) -> dict:
        cached = self.__dict__.get("_index")
        if cached is None:
            cached = {a: i for i, a in enumerate(self.atoms)}
            object.__setattr__(self, "_index", cached)
        return cached

    def __len__(self) -> int:
        return len(self.atoms)


def atom_order(problem: Problem, A: Iterable[ArgPos]) -> GroundAtomOrder:
    A = frozenset(A)
    touched = [s for s in problem.output_symbols if any(ArgPos(s.name, i) in A for i in s.positions())]
    return GroundAtomOrder(tuple(output_atoms(touched, problem.order)), A, tuple(problem.order))


def map_atom(t: InducedTransform, atom: GroundAtom) -> GroundAtom:
    m = t.pi.mapping
    args = tuple(m[d] if ArgPos(atom.symbol, i) in t.positions else d for i, d in enumerate(atom.args, start=1))
    value = atom.value
    if value is not None and ArgPos(atom.symbol, 0) in t.positions:
        value = m[value]
    return GroundAtom(atom.symbol, args, value)


class VarPool:
    """Sequential allocator for auxiliary variables, starting after ``start``."""

    def __init__(self, start: int):
        self.top = start

    def new(self) -> int:
        self.top += 1
        return self.top


@dataclass
class LexLeaderConstraint:
    sigma: InducedTransform
    clauses: list = field(default_factory=list)
    aux: tuple = ()  # auxiliary variable ids
    positions: int = 0  # lex positions actually encoded
    partial: bool = False  # part of a breaking set that is sound but not complete

    @property
    def label(self) -> str:
        return str(self.sigma.pi)


def lex_leader(
    sigma: InducedTransform,
    order: GroundAtomOrder,
    catalog: AtomCatalog,
    pool: VarPool,
    cap: int | None = None,
) -> LexLeaderConstraint:
    """Clauses for ``(a_1..a_m) <=lex (sigma a_1..sigma a_m)``.

    ``e_j`` stands for equality of the first ``j`` encoded positions. A
    position is skipped when it is fixed by ``sigma`` or when the equalities
    of earlier positions already force ``a_i = sigma(a_i)``. ``cap`` keeps
    only the first ``cap`` encoded positions, which weakens but stays sound.
    """
    index = order.index()
    pairs = []
    for a in order.atoms:
        b = map_atom(sigma, a)
        if b not in index:
            raise BreakingError(f"{sigma.pi} maps {a.label()} outside the atom order")
        pairs.append((catalog.id(a), catalog.id(b)))
    linked = DisjointSet()
    emitted = []
    for a, b in pairs:
        if a == b:
            continue
        linked.add(a)
        linked.add(b)
        if linked.same(a, b):
            continue
        emitted.append((a, b))
        linked.union(a, b)
        if cap is not None and len(emitted) >= cap:
            break
    constraint = LexLeaderConstraint(sigma, positions=len(emitted))
    clauses, aux = constraint.clauses, []
    prev = None  # None stands for e_0 = true
    for j, (a, b) in enumerate(emitted):
        guard = [] if prev is None else [-prev]
        clauses.append(guard + [-a, b])
        if j + 1 < len(emitted):
            e = pool.new()
            aux.append(e)
            clauses.append(guard + [-a, e])
            clauses.append(guard + [b, e])
            prev = e
    constraint.aux = tuple(aux)
    return constraint


def completeness_condition(A: Iterable[ArgPos], problem: Problem) -> bool:
    """At most one position of ``A`` per output symbol."""
    outputs = {s.name for s in problem.output_symbols}
    counts: dict = {}
    for p in A:
        if p.symbol in outputs:
            counts[p.symbol] = counts.get(p.symbol, 0) + 1
    return all(c <= 1 for c in counts.values())


def consecutive_swaps(delta: Sequence[str], domain: Sequence[str]) -> list[DomainPermutation]:
    return [transposition(domain, a, b) for a, b in zip(delta, delta[1:])]


def break_interchangeable(
    delta: Sequence[str],
    A: Iterable[ArgPos],
    order: GroundAtomOrder,
    catalog: AtomCatalog,
    pool: VarPool,
    problem: Problem,
    cap: int | None = None,
) -> list[LexLeaderConstraint]:
    """One lex-leader per consecutive pair of ``delta``.

    Complete for the full symmetric group on ``delta`` when the completeness
    condition holds and no cap applies; otherwise flagged partial.
    """
    A = frozenset(A)
    if tuple(problem.order) != order.order:
        raise BreakingError("atom order and problem use different element orders")
    rank = problem.rank
    if any(rank[a] >= rank[b] for a, b in zip(delta, delta[1:])):
        raise BreakingError("delta must be sorted by the element order")
    partial = cap is not None or not completeness_condition(A, problem)
    out = []
    for pi in consecutive_swaps(delta, problem.domain):
        c = lex_leader(InducedTransform(A, pi), order, catalog, pool, cap)
        c.partial = partial
        out.append(c)
    return out


def break_generators(
    generators: Iterable[DomainPermutation],
    A: Iterable[ArgPos],
    order: GroundAtomOrder,
    catalog: AtomCatalog,
    pool: VarPool,
    cap: int | None = None,
) -> list[LexLeaderConstraint]:
    """One lex-leader per generator; sound, generally not complete."""
    A = frozenset(A)
    out = []
    for pi in generators:
        c = lex_leader(InducedTransform(A, pi), order, catalog, pool, cap)
        c.partial = True
        out.append(c)
    return out


def append_constraints(cnf: Cnf, constraints: Iterable[LexLeaderConstraint], pool: VarPool) -> Cnf:
    """A copy of ``cnf`` with the breaking clauses and their auxiliaries."""
    out = cnf.copy()
    out.num_vars = max(out.num_vars, pool.top)
    for c in constraints:
        for v in c.aux:
            out.comments.setdefault(v, f"lex[{c.label}]")
        out.extend(c.clauses)
    return out
