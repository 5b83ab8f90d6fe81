"""Automorphism generators of vertex-colored graphs.

Equitable refinement plus individualization, in the style of nauty/saucy but
without canonical labelling. The first path of the search tree fixes a
reference leaf; every other leaf that matches it yields an automorphism.
Working from the deepest level up, one automorphism per orbit of the target
cell is enough to generate the stabilizer chain, hence the whole group.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .dpg import ColoredGraph, DpgMapping
from .transform import DomainPermutation
from .unionfind import DisjointSet

DEFAULT_NODE_BUDGET = 200_000
DEFAULT_GROUP_BUDGET = 10 ** 6


class GroupTooLarge(RuntimeError):
    pass


@dataclass
class OrderedPartition:
    """Cells laid out contiguously in ``lab``; a cell is named by its start."""

    lab: list
    cell_end: dict  # start -> end (exclusive)
    cell_of: list  # vertex -> start of its cell

    @classmethod
    def from_cells(cls, cells: Sequence[Sequence[int]], n: int) -> "OrderedPartition":
        lab, cell_end, cell_of = [], {}, [0] * n
        for cell in cells:
            start = len(lab)
            lab.extend(cell)
            cell_end[start] = len(lab)
            for v in cell:
                cell_of[v] = start
        if len(lab) != n or len(set(lab)) != n:
            raise ValueError("cells must partition the vertex set")
        return cls(lab, cell_end, cell_of)

    @classmethod
    def by_color(cls, graph: ColoredGraph) -> "OrderedPartition":
        groups: dict = {}
        for v, c in enumerate(graph.colors):
            groups.setdefault(c, []).append(v)
        return cls.from_cells([groups[c] for c in sorted(groups)], graph.order)

    def copy(self) -> "OrderedPartition":
        return OrderedPartition(list(self.lab), dict(self.cell_end), list(self.cell_of))

    @property
    def cells(self) -> list[list[int]]:
        return [self.lab[s : self.cell_end[s]] for s in sorted(self.cell_end)]

    def shape(self) -> tuple:
        return tuple((s, self.cell_end[s]) for s in sorted(self.cell_end))

    def is_discrete(self) -> bool:
        return len(self.cell_end) == len(self.lab)

    def target_cell(self) -> int | None:
        """Start of the first smallest non-singleton cell."""
        best = None
        for s in sorted(self.cell_end):
            size = self.cell_end[s] - s
            if size > 1 and (best is None or size < best[1]):
                best = (s, size)
        return None if best is None else best[0]

    def individualize(self, start: int, v: int) -> "OrderedPartition":
        p = self.copy()
        end = p.cell_end[start]
        members = p.lab[start:end]
        members.remove(v)
        p.lab[start:end] = [v] + members
        p.cell_end[start] = start + 1
        p.cell_end[start + 1] = end
        for u in members:
            p.cell_of[u] = start + 1
        return p


def refine(
    graph: ColoredGraph,
    partition: OrderedPartition,
    splitters: Iterable[int] | None = None,
    trace: list | None = None,
) -> OrderedPartition:
    """Coarsest equitable refinement of ``partition``.

    Every decision depends only on cell positions and neighbour counts, so
    the result commutes with automorphisms. ``trace`` (if given) records the
    splits, which is an isomorphism invariant used to prune the search.
    """
    p = partition.copy()
    adj = graph.adjacency
    lab, cell_end, cell_of = p.lab, p.cell_end, p.cell_of
    queue = deque(sorted(cell_end) if splitters is None else splitters)
    queued = set(queue)
    while queue:
        s = queue.popleft()
        queued.discard(s)
        count: dict = {}
        for v in lab[s : cell_end[s]]:
            for u in adj[v]:
                count[u] = count.get(u, 0) + 1
        touched = sorted({cell_of[u] for u in count})
        for c in touched:
            e = cell_end[c]
            if e - c == 1:
                continue
            members = lab[c:e]
            keys = [count.get(v, 0) for v in members]
            if min(keys) == max(keys):
                continue
            members = [v for _, v in sorted(zip(keys, members))]
            lab[c:e] = members
            fragments = []
            fs = c
            for i in range(c, e + 1):
                if i == e or (i > fs and count.get(lab[i], 0) != count.get(lab[fs], 0)):
                    fragments.append((fs, i, count.get(lab[fs], 0)))
                    fs = i
            for fs, fe, _ in fragments:
                cell_end[fs] = fe
                for v in lab[fs:fe]:
                    cell_of[v] = fs
            if trace is not None:
                trace.append((s, c, tuple((fe - fs, k) for fs, fe, k in fragments)))
            for fs, _, _ in fragments:
                if fs not in queued:
                    queue.append(fs)
                    queued.add(fs)
    return p


def is_automorphism(graph: ColoredGraph, perm: Sequence[int]) -> bool:
    """Independent check: bijective, color- and edge-preserving."""
    n = graph.order
    if len(perm) != n or sorted(perm) != list(range(n)):
        return False
    if any(graph.colors[v] != graph.colors[perm[v]] for v in range(n)):
        return False
    edges = graph.edges
    for a, b in edges:
        x, y = perm[a], perm[b]
        if (min(x, y), max(x, y)) not in edges:
            return False
    return True


@dataclass(frozen=True)
class AutomorphismGenerator:
    perm: tuple

    def restrict(self, vertices: Sequence[int]) -> tuple:
        return tuple(self.perm[v] for v in vertices)


@dataclass
class GeneratorSet:
    generators: list
    complete: bool
    nodes: int


class _Search:
    def __init__(self, graph: ColoredGraph, budget: int):
        self.graph = graph
        self.budget = budget
        self.nodes = 0
        self.exhausted = False

    def node(self, p: OrderedPartition, start: int, v: int) -> tuple[OrderedPartition, list]:
        self.nodes += 1
        if self.nodes > self.budget:
            self.exhausted = True
        trace: list = []
        q = refine(self.graph, p.individualize(start, v), [start], trace)
        return q, trace

    def run(self) -> GeneratorSet:
        g = self.graph
        if g.order == 0:
            return GeneratorSet([], True, 0)
        root = refine(g, OrderedPartition.by_color(g))
        path = []  # (partition, target start, chosen vertex, child trace, child shape)
        p = root
        while not p.is_discrete():
            c = p.target_cell()
            v = min(p.lab[c : p.cell_end[c]])
            q, trace = self.node(p, c, v)
            path.append((p, c, v, trace, q.shape()))
            p = q
        self.leaf = p.lab
        self.path = path
        gens: list = []
        for level in range(len(path) - 1, -1, -1):
            p, c, v, _, _ = path[level]
            orbits = self._orbits(gens)
            for w in sorted(p.lab[c : p.cell_end[c]]):
                if w == v or orbits.same(v, w):
                    continue
                if self.exhausted:
                    return GeneratorSet(gens, False, self.nodes)
                found = self._descend(p, c, w, level)
                if found is not None:
                    gens.append(AutomorphismGenerator(found))
                    orbits = self._orbits(gens)
        return GeneratorSet(gens, not self.exhausted, self.nodes)

    def _orbits(self, gens: list) -> DisjointSet:
        dsu = DisjointSet(range(self.graph.order))
        for gen in gens:
            for a, b in enumerate(gen.perm):
                dsu.union(a, b)
        return dsu

    def _descend(self, p: OrderedPartition, c: int, w: int, level: int) -> tuple | None:
        q, trace = self.node(p, c, w)
        _, _, _, ref_trace, ref_shape = self.path[level]
        if trace != ref_trace or q.shape() != ref_shape:
            return None
        if q.is_discrete():
            perm = [0] * self.graph.order
            for a, b in zip(self.leaf, q.lab):
                perm[a] = b
            return tuple(perm) if is_automorphism(self.graph, perm) else None
        if self.exhausted:
            return None
        c2 = self.path[level + 1][1]
        for u in sorted(q.lab[c2 : q.cell_end[c2]]):
            found = self._descend(q, c2, u, level + 1)
            if found is not None:
                return found
            if self.exhausted:
                return None
        return None


def find_generators(graph: ColoredGraph, node_budget: int = DEFAULT_NODE_BUDGET) -> GeneratorSet:
    """Generators of the full automorphism group (``complete`` is False if the budget ran out)."""
    return _Search(graph, node_budget).run()


def group_elements(generators: Iterable[Sequence[int]], degree: int, budget: int = DEFAULT_GROUP_BUDGET) -> set:
    """All elements of the generated permutation group by breadth-first closure."""
    gens = [tuple(g) for g in generators]
    identity = tuple(range(degree))
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                composed = tuple(g[i] for i in h)
                if composed not in seen:
                    seen.add(composed)
                    if len(seen) > budget:
                        raise GroupTooLarge(f"group exceeds {budget} elements")
                    nxt.append(composed)
        frontier = nxt
    return seen


def group_order_small(generators: Iterable[Sequence[int]], degree: int | None = None,
                      budget: int = DEFAULT_GROUP_BUDGET) -> int:
    gens = [tuple(g.images) if isinstance(g, DomainPermutation) else tuple(g) for g in generators]
    if degree is None:
        degree = len(gens[0]) if gens else 0
    return len(group_elements(gens, degree, budget))


def to_domain_permutation(gen: AutomorphismGenerator, mapping: DpgMapping, domain=None) -> DomainPermutation:
    """DE restriction of ``gen``; ``domain`` fixes the element indexing (defaults to the DE order)."""
    elements = mapping.elements
    images = {elements[i]: elements[gen.perm[i]] for i in range(len(elements))}
    return DomainPermutation.from_mapping(domain or elements, images)
