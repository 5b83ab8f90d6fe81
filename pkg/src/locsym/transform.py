"""Domain permutations and the structure transformations they induce."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .argpos import ArgPos
from .logic import (
    DEFAULT_ENUMERATION_BUDGET,
    Evaluator,
    Problem,
    Structure,
    StructureError,
    Symbol,
    enumerate_expansions,
    enumerate_structures,
)


class DomainMismatch(StructureError):
    pass


@dataclass(frozen=True)
class DomainPermutation:
    """A bijection on the domain stored as an element-indexed image array."""

    domain: tuple
    images: tuple  # images[i] is the index of the image of domain[i]

    def __post_init__(self) -> None:
        if sorted(self.images) != list(range(len(self.domain))):
            raise ValueError("not a bijection on the domain")

    @classmethod
    def identity(cls, domain: Sequence[str]) -> "DomainPermutation":
        return cls(tuple(domain), tuple(range(len(domain))))

    @classmethod
    def from_mapping(cls, domain: Sequence[str], mapping: Mapping[str, str]) -> "DomainPermutation":
        domain = tuple(domain)
        index = {d: i for i, d in enumerate(domain)}
        return cls(domain, tuple(index[mapping.get(d, d)] for d in domain))

    @classmethod
    def from_cycles(cls, text: str, domain: Sequence[str]) -> "DomainPermutation":
        """Parse cycle notation such as ``"(t u v w)(r g)"``; ``"()"`` is the identity."""
        domain = tuple(domain)
        members = set(domain)
        stripped = text.strip()
        if not re.fullmatch(r"(\(\s*[^()]*\)\s*)*", stripped):
            raise ValueError(f"malformed cycle notation: {text!r}")
        mapping: dict = {}
        for body in re.findall(r"\(([^()]*)\)", stripped):
            cycle = body.split()
            for d in cycle:
                if d not in members:
                    raise ValueError(f"{d!r} is not a domain element")
                if d in mapping:
                    raise ValueError(f"{d!r} appears in two cycles")
            if len(set(cycle)) != len(cycle):
                raise ValueError(f"repeated element in cycle ({body.strip()})")
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                mapping[a] = b
        return cls.from_mapping(domain, mapping)

    def __call__(self, d: str) -> str:
        return self.mapping[d]

    @property
    def mapping(self) -> dict:
        cached = self.__dict__.get("_mapping")
        if cached is None:
            cached = {d: self.domain[j] for d, j in zip(self.domain, self.images)}
            object.__setattr__(self, "_mapping", cached)
        return cached

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def compose(self, other: "DomainPermutation") -> "DomainPermutation":
        """``self ∘ other``: apply ``other`` first."""
        if self.domain != other.domain:
            raise DomainMismatch("permutations over different domains")
        return DomainPermutation(self.domain, tuple(self.images[j] for j in other.images))

    def inverse(self) -> "DomainPermutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return DomainPermutation(self.domain, tuple(inv))

    def support(self) -> list[str]:
        return [d for i, d in enumerate(self.domain) if self.images[i] != i]

    def cycles(self) -> list[list[str]]:
        seen, out = set(), []
        for i in range(len(self.domain)):
            if i in seen or self.images[i] == i:
                continue
            cycle, j = [], i
            while j not in seen:
                seen.add(j)
                cycle.append(self.domain[j])
                j = self.images[j]
            out.append(cycle)
        return out

    def __str__(self) -> str:
        cycles = self.cycles()
        return "".join("(" + " ".join(c) + ")" for c in cycles) if cycles else "()"


def transposition(domain: Sequence[str], a: str, b: str) -> DomainPermutation:
    return DomainPermutation.from_mapping(domain, {a: b, b: a})


@dataclass(frozen=True)
class InducedTransform:
    """The transformation applying ``pi`` exactly at the positions in ``positions``."""

    positions: frozenset
    pi: DomainPermutation

    def __init__(self, positions: Iterable[ArgPos], pi: DomainPermutation):
        object.__setattr__(self, "positions", frozenset(positions))
        object.__setattr__(self, "pi", pi)

    def moved_indices(self, symbol: Symbol) -> list[int]:
        return [i for i in symbol.positions() if ArgPos(symbol.name, i) in self.positions]

    def inverse(self) -> "InducedTransform":
        return InducedTransform(self.positions, self.pi.inverse())


def all_positions(symbols: Iterable[Symbol]) -> frozenset:
    return frozenset(ArgPos(s.name, i) for s in symbols for i in s.positions())


def _map_tuple(t: tuple, moved: Sequence[int], m: Mapping[str, str]) -> tuple:
    out = list(t)
    for i in moved:
        out[i - 1] = m[out[i - 1]]
    return tuple(out)


def transform_interpretation(symbol: Symbol, value: object, moved: Sequence[int], m: Mapping[str, str]) -> object:
    if not moved:
        return value
    if symbol.is_function:
        arg_moved = [i for i in moved if i > 0]
        out_moved = 0 in moved
        return {
            _map_tuple(args, arg_moved, m): (m[v] if out_moved else v)
            for args, v in value.items()  # type: ignore[union-attr]
        }
    return frozenset(_map_tuple(t, moved, m) for t in value)  # type: ignore[union-attr]


def apply_induced(t: InducedTransform, structure: Structure) -> Structure:
    """Apply ``pi`` to tuple components at positions in ``t.positions``.

    Positions over symbols that ``structure`` does not interpret are ignored.
    Untouched interpretations are shared with the input.
    """
    if t.pi.domain != structure.domain:
        raise DomainMismatch("permutation and structure have different domains")
    m = t.pi.mapping
    interp = dict(structure.interp)
    for sym in structure.symbols:
        moved = t.moved_indices(sym)
        if moved:
            interp[sym.name] = transform_interpretation(sym, interp[sym.name], moved, m)
    return Structure(structure.domain, structure.symbols, interp)


def fixes_structure(t: InducedTransform, structure: Structure) -> bool:
    return apply_induced(t, structure) == structure


# --- brute-force oracles ---------------------------------------------------


def model_keys(evaluator: Evaluator, structures: Iterable[Structure], base: Mapping[str, object]) -> set:
    return {s.key() for s in structures if evaluator.models({**base, **s.interp})}


def is_theory_symmetry_oracle(
    t: InducedTransform,
    theory: Sequence,
    symbols: Sequence[Symbol],
    domain: Sequence[str],
    budget: int = DEFAULT_ENUMERATION_BUDGET,
) -> bool:
    """Check I |= T iff t(I) |= T over every structure of ``symbols``.

    The transformation is a bijection on the finite set of structures, so it
    suffices that it maps the model set into itself.
    """
    evaluator = Evaluator(theory, domain)
    models = [s for s in enumerate_structures(symbols, domain, budget) if evaluator.models(s.interp)]
    keys = {s.key() for s in models}
    return all(apply_induced(t, s).key() in keys for s in models)


def mx_solutions(problem: Problem, budget: int = DEFAULT_ENUMERATION_BUDGET) -> list[Structure]:
    evaluator = Evaluator(problem.theory, problem.domain)
    base = dict(problem.structure.interp)
    return [s for s in enumerate_expansions(problem, budget) if evaluator.models({**base, **s.interp})]


def is_mx_symmetry_oracle(
    t: InducedTransform,
    problem: Problem,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    solutions: Sequence[Structure] | None = None,
) -> bool:
    """Full-enumeration check that ``t`` (acting on outputs only) preserves solutions."""
    if t.pi.domain != problem.domain:
        raise DomainMismatch("permutation and problem have different domains")
    sols = list(solutions) if solutions is not None else mx_solutions(problem, budget)
    keys = {s.key() for s in sols}
    return all(apply_induced(t, s).key() in keys for s in sols)
