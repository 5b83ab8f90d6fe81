"""Interchangeable subdomains: maximal sets whose every permutation fixes a structure."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .argpos import ArgPos
from .logic import Structure
from .unionfind import DisjointSet


def _moved(structure: Structure, A: frozenset) -> list:
    """(symbol, zero-based tuple slots moved) for each interpreted symbol touched by A."""
    out = []
    for sym in structure.symbols:
        if sym.is_function:
            slots = [i - 1 if i > 0 else sym.arity for i in sym.positions() if ArgPos(sym.name, i) in A]
        else:
            slots = [i - 1 for i in sym.positions() if ArgPos(sym.name, i) in A]
        if slots:
            out.append((sym, sorted(slots)))
    return out


def _rows(sym, value) -> Iterable[tuple]:
    if sym.is_function:
        return (args + (v,) for args, v in value.items())
    return value


def swap_preserves(structure: Structure, A: Iterable[ArgPos], d1: str, d2: str) -> bool:
    """Whether swapping ``d1`` and ``d2`` at the positions ``A`` leaves ``structure`` unchanged.

    Only rows mentioning ``d1`` or ``d2`` at a moved slot are probed. The swap
    permutes each finite relation, so image-inside-original is enough.
    """
    A = frozenset(A)
    swap = {d1: d2, d2: d1}
    for sym, slots in _moved(structure, A):
        value = structure.interp[sym.name]
        for row in _rows(sym, value):
            if not any(row[s] in swap for s in slots):
                continue
            image = list(row)
            for s in slots:
                image[s] = swap.get(image[s], image[s])
            image = tuple(image)
            if sym.is_function:
                if value.get(image[:-1]) != image[-1]:
                    return False
            elif image not in value:
                return False
    return True


def occurrence_signature(structure: Structure, A: Iterable[ArgPos]) -> dict:
    """Per element, the counts of its appearances at each interpreted A-position."""
    A = frozenset(A)
    moved = _moved(structure, A)
    keys = [(sym.name, s) for sym, slots in moved for s in slots]
    index = {k: i for i, k in enumerate(keys)}
    counts = {d: [0] * len(keys) for d in structure.domain}
    for sym, slots in moved:
        for row in _rows(sym, structure.interp[sym.name]):
            for s in slots:
                counts[row[s]][index[(sym.name, s)]] += 1
    return {d: tuple(c) for d, c in counts.items()}


@dataclass(frozen=True)
class InterchangeablePartition:
    A: frozenset
    blocks: tuple  # tuples of elements, each sorted by the domain order

    @property
    def interchangeable(self) -> list[tuple]:
        return [b for b in self.blocks if len(b) > 1]

    def block_of(self, d: str) -> tuple:
        for b in self.blocks:
            if d in b:
                return b
        raise KeyError(d)

    def as_json(self) -> dict:
        return {
            "A": sorted(str(p) for p in self.A),
            "interchangeable": [list(b) for b in self.interchangeable],
        }


def interchangeable_partition(
    structure: Structure,
    A: Iterable[ArgPos],
    order: Sequence[str] | None = None,
) -> InterchangeablePartition:
    A = frozenset(A)
    order = tuple(order or structure.domain)
    signature = occurrence_signature(structure, A)
    dsu = DisjointSet(order)
    buckets: dict = {}
    for d in order:
        buckets.setdefault(signature[d], []).append(d)
    for bucket in buckets.values():
        for i, d1 in enumerate(bucket):
            for d2 in bucket[i + 1 :]:
                if not dsu.same(d1, d2) and swap_preserves(structure, A, d1, d2):
                    dsu.union(d1, d2)
    return InterchangeablePartition(A, tuple(tuple(c) for c in dsu.classes()))
