"""The colored domain permutation graph of a structure and an argument position set.

Three vertex layers: domain elements (DE), element/index pairs (AP) and
interpreted tuples (IT). Automorphisms of the graph correspond one-to-one
with domain permutations whose induced transformation fixes the structure.

By default two classes of vertices that every automorphism fixes are left
out: tuples of symbols without any position in ``A`` (isolated, uniquely
colored) and AP vertices for indices above the largest arity among the
symbols ``A`` touches. ``full=True`` builds the unabridged graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .argpos import ArgPos
from .logic import Structure

DE, AP, IT = "DE", "AP", "IT"


@dataclass(frozen=True)
class ColoredGraph:
    colors: tuple
    labels: tuple
    layers: tuple
    adjacency: tuple  # sorted neighbour tuples
    edges: frozenset = field(repr=False)

    @property
    def order(self) -> int:
        return len(self.colors)

    def dump(self) -> str:
        """Line format ``v <id> <color> <label>`` then ``e <id> <id>``."""
        lines = [f"v {i} {c} {lab}" for i, (c, lab) in enumerate(zip(self.colors, self.labels))]
        lines += [f"e {a} {b}" for a, b in sorted(self.edges)]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edges(cls, colors: Sequence[int], edges: Iterable[tuple[int, int]], labels=None, layers=None):
        n = len(colors)
        adj: list[set] = [set() for _ in range(n)]
        norm = set()
        for a, b in edges:
            if a == b:
                raise ValueError("self loops are not supported")
            adj[a].add(b)
            adj[b].add(a)
            norm.add((min(a, b), max(a, b)))
        return cls(
            tuple(colors),
            tuple(labels or (str(i) for i in range(n))),
            tuple(layers or ("",) * n),
            tuple(tuple(sorted(s)) for s in adj),
            frozenset(norm),
        )


@dataclass(frozen=True)
class DpgMapping:
    elements: tuple  # DE vertex i <-> elements[i]
    ap: dict  # vertex -> (element, index)
    it: dict  # vertex -> (symbol, tuple with output last for functions)

    def de_vertex(self, element: str) -> int:
        return self.elements.index(element)


def _positions_of(sym, value) -> list[tuple]:
    """Tuples of ``sym`` paired with their argument-position indices."""
    if sym.is_function:
        idx = tuple(range(1, sym.arity + 1)) + (0,)
        return [(tuple(args) + (out,), idx) for args, out in value.items()]
    idx = tuple(range(1, sym.arity + 1))
    return [(tuple(t), idx) for t in value]


def build_dpg(
    structure: Structure,
    positions: Iterable[ArgPos],
    order: Sequence[str] | None = None,
    full: bool = False,
) -> tuple[ColoredGraph, DpgMapping]:
    A = frozenset(positions)
    elements = tuple(order or structure.domain)
    rank = {d: i for i, d in enumerate(elements)}
    relevant = [s for s in structure.symbols if any(ArgPos(s.name, i) in A for i in s.positions())]
    if full:
        k = max((s.arity for s in structure.symbols), default=0)
        it_symbols = list(structure.symbols)
    else:
        k = max((s.arity for s in relevant), default=0)
        it_symbols = relevant
    indices = range(k + 1)

    colors, labels, layers = [], [], []
    edges = []
    for d in elements:
        colors.append(0)
        labels.append(d)
        layers.append(DE)
    ap_vertex = {}
    ap_map = {}
    for d in elements:
        for i in indices:
            v = len(colors)
            ap_vertex[(d, i)] = v
            ap_map[v] = (d, i)
            colors.append(1 + i)
            labels.append(f"{d}.{i}")
            layers.append(AP)
            edges.append((rank[d], v))

    interned: dict = {}
    it_map = {}
    for sym in it_symbols:
        moved = {i for i in sym.positions() if ArgPos(sym.name, i) in A}
        tuples = _positions_of(sym, structure.interp[sym.name])
        tuples.sort(key=lambda item: tuple(rank[d] for d in item[0]))
        for tup, idx in tuples:
            fixed = tuple(d if i not in moved else None for d, i in zip(tup, idx))
            color = interned.setdefault((sym.name, fixed), len(interned))
            v = len(colors)
            it_map[v] = (sym.name, tup)
            colors.append(2 + k + color)
            if sym.is_function:
                labels.append(f"{sym.name}({','.join(tup[:-1])})={tup[-1]}")
            else:
                labels.append(f"{sym.name}({','.join(tup)})")
            layers.append(IT)
            for d, i in zip(tup, idx):
                if i in moved:
                    edges.append((ap_vertex[(d, i)], v))

    graph = ColoredGraph.from_edges(colors, edges, labels, layers)
    return graph, DpgMapping(elements, ap_map, it_map)
