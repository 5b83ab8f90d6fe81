"""Argument positions, direct connections and connectively closed sets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .logic import (
    Apply,
    Atom,
    Equals,
    Formula,
    Symbol,
    Term,
    Var,
    bound_variables,
    formula_symbols,
    subformulas,
)
from .unionfind import DisjointSet


class ArgPos(NamedTuple):
    symbol: str
    index: int

    def __str__(self) -> str:
        return f"{self.symbol}|{self.index}"


def parse_argpos(text: str) -> ArgPos:
    symbol, sep, index = text.strip().rpartition("|")
    if not sep or not symbol or not index.isdigit():
        raise ValueError(f"not an argument position: {text!r}")
    return ArgPos(symbol, int(index))


def parse_argpos_set(text: str) -> frozenset:
    return frozenset(parse_argpos(p) for p in text.replace(";", ",").split(",") if p.strip())


def _head(t: Term) -> ArgPos:
    return ArgPos(t.name if isinstance(t, Var) else t.symbol, 0)


def connectivity_pairs(theory: Sequence[Formula]) -> list[tuple[ArgPos, ArgPos]]:
    """Directly connected pairs, in order of first occurrence.

    A term ``f(...)`` (or variable) sitting at argument ``i`` of ``S`` links
    ``f|0`` with ``S|i``; an equality links the output positions of both
    sides, whatever their shape.
    """
    seen: dict = {}

    def add(a: ArgPos, b: ArgPos) -> None:
        seen.setdefault((a, b), None)

    def term(t: Term) -> None:
        if isinstance(t, Apply):
            for i, arg in enumerate(t.args, start=1):
                add(_head(arg), ArgPos(t.symbol, i))
                term(arg)

    def walk(phi: Formula) -> None:
        if isinstance(phi, Atom):
            for i, arg in enumerate(phi.args, start=1):
                add(_head(arg), ArgPos(phi.symbol, i))
                term(arg)
        elif isinstance(phi, Equals):
            add(_head(phi.left), _head(phi.right))
            term(phi.left)
            term(phi.right)
        else:
            for sub in subformulas(phi):
                walk(sub)

    for phi in theory:
        walk(phi)
    return list(seen)


def _term_heads(theory: Sequence[Formula]) -> set:
    heads = set()
    for a, b in connectivity_pairs(theory):
        heads.update(p.symbol for p in (a, b) if p.index == 0)
    return heads


def argument_positions(theory: Sequence[Formula], symbols: Sequence[Symbol] = ()) -> list[ArgPos]:
    """All positions of the vocabulary, the theory's symbols and its variables.

    Symbols absent from ``symbols`` are typed by use: anything occurring as a
    term owns an output slot ``|0``.
    """
    positions: dict = {}
    known = {s.name for s in symbols}
    for s in symbols:
        for i in s.positions():
            positions.setdefault(ArgPos(s.name, i), None)
    variables = [v for phi in theory for v in bound_variables(phi)]
    heads = _term_heads(theory)
    for phi in theory:
        for name, arity in formula_symbols(phi):
            if name in known:
                continue
            first = 0 if name in heads else 1
            for i in range(first, arity + 1):
                positions.setdefault(ArgPos(name, i), None)
    for v in variables:
        positions.setdefault(ArgPos(v, 0), None)
    return list(positions)


@dataclass(frozen=True)
class ArgPosPartition:
    blocks: tuple  # tuple of tuples of ArgPos
    variables: frozenset  # names of bound variables

    def block_of(self, pos: ArgPos) -> tuple:
        for block in self.blocks:
            if pos in block:
                return block
        raise KeyError(pos)

    def visible(self, block: Iterable[ArgPos]) -> list[ArgPos]:
        """Drop variable positions, which carry no interpretation."""
        return [p for p in block if p.symbol not in self.variables]

    def as_json(self) -> list[list[str]]:
        return [[str(p) for p in self.visible(b)] for b in self.blocks if self.visible(b)]


def closed_partition(theory: Sequence[Formula], symbols: Sequence[Symbol] = ()) -> ArgPosPartition:
    """Minimal connectively closed blocks via union-find over direct links."""
    universe = argument_positions(theory, symbols)
    dsu = DisjointSet(universe)
    for a, b in connectivity_pairs(theory):
        dsu.union(a, b)
    variables = frozenset(v for phi in theory for v in bound_variables(phi))
    return ArgPosPartition(tuple(tuple(c) for c in dsu.classes()), variables)


def is_connectively_closed(positions: Iterable[ArgPos], theory: Sequence[Formula]) -> bool:
    members = set(positions)
    return all((a in members) == (b in members) for a, b in connectivity_pairs(theory))


def positions_per_symbol(positions: Iterable[ArgPos], exclude: Iterable[str] = ()) -> dict[str, list[int]]:
    skip = set(exclude)
    out: dict[str, list[int]] = {}
    for p in positions:
        if p.symbol not in skip:
            out.setdefault(p.symbol, []).append(p.index)
    return out
