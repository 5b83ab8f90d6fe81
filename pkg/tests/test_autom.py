import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from locsym.argpos import parse_argpos_set
from locsym.autom import (
    AutomorphismGenerator,
    GroupTooLarge,
    OrderedPartition,
    find_generators,
    group_elements,
    group_order_small,
    is_automorphism,
    refine,
    to_domain_permutation,
)
from locsym.dpg import ColoredGraph, build_dpg
from locsym.logic import INPUT, PRED, Structure, Symbol
from locsym.transform import DomainPermutation, InducedTransform, all_positions, fixes_structure

import randgen


def graph(n, edges, colors=None):
    return ColoredGraph.from_edges(colors or [0] * n, edges)


def test_refine_trivial_and_path():
    g = graph(4, [])
    assert refine(g, OrderedPartition.by_color(g)).cells == [[0, 1, 2, 3]]
    path = graph(3, [(0, 1), (1, 2)])
    cells = refine(path, OrderedPartition.by_color(path)).cells
    assert sorted(map(sorted, cells)) == [[0, 2], [1]]


def test_refine_separates_vertices_from_colours(gc_star):
    g, mapping = build_dpg(gc_star.struct_star, parse_argpos_set("Color|1, Edge#1|1, Edge#1|2"))
    p = refine(g, OrderedPartition.by_color(g))
    de = {mapping.de_vertex(d): d for d in gc_star.struct_star.domain}
    de_cells = [sorted(de[v] for v in cell if v in de) for cell in p.cells]
    assert sorted(c for c in de_cells if c) == [["b", "g", "r"], ["t", "u", "v", "w"]]


def _assert_equitable(g, cells):
    where = {v: i for i, cell in enumerate(cells) for v in cell}
    for cell in cells:
        profiles = {tuple(sorted(where[u] for u in g.adjacency[v])) for v in cell}
        assert len(profiles) == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_refinement_is_equitable(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 12)
    edges = {(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < 0.3}
    g = graph(n, edges, [rng.randrange(2) for _ in range(n)])
    p = refine(g, OrderedPartition.by_color(g))
    cells = p.cells
    assert sorted(v for c in cells for v in c) == list(range(n))
    for cell in cells:
        assert len({g.colors[v] for v in cell}) == 1
    _assert_equitable(g, cells)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_edgeless_graph_gives_symmetric_group(n):
    gens = find_generators(graph(n, []))
    assert gens.complete
    assert group_order_small([g.perm for g in gens.generators], n) == math.factorial(n)


def test_coloured_cycle_group(gc_star):
    g, mapping = build_dpg(gc_star.struct_star, parse_argpos_set("Color|1, Edge#1|1, Edge#1|2"))
    gens = find_generators(g)
    assert gens.complete
    for gen in gens.generators:
        assert is_automorphism(g, gen.perm)
        assert all(g.layers[v] == g.layers[w] for v, w in enumerate(gen.perm))
    pis = [to_domain_permutation(gen, mapping) for gen in gens.generators]
    assert group_order_small(pis) == 24


def test_directed_four_cycle():
    E = Symbol("Edge", 2, PRED, INPUT)
    dom = ("t", "u", "v", "w")
    s = Structure(dom, (E,), {"Edge": frozenset({("t", "u"), ("u", "v"), ("v", "w"), ("w", "t")})})
    g, mapping = build_dpg(s, parse_argpos_set("Edge|1, Edge|2"))
    pis = [to_domain_permutation(gen, mapping) for gen in find_generators(g).generators]
    group = group_elements([p.images for p in pis], 4)
    brute = {
        im for im in itertools.permutations(range(4))
        if fixes_structure(InducedTransform(parse_argpos_set("Edge|1, Edge|2"), DomainPermutation(dom, im)), s)
    }
    assert group == brute and len(group) == 4


def test_group_order_small_basics():
    assert group_order_small([]) == 1
    assert group_order_small([(1, 0)]) == 2
    ab = DomainPermutation.from_cycles("(a b)", ("a", "b", "c"))
    assert group_order_small([ab]) == 2
    with pytest.raises(GroupTooLarge):
        group_elements([(1, 2, 3, 4, 5, 0), (1, 0, 2, 3, 4, 5)], 6, budget=100)


def test_to_domain_permutation_examples(gc_star):
    _, mapping = build_dpg(gc_star.struct_star, parse_argpos_set("Color|1, Edge#1|1, Edge#1|2"))
    n = 7
    rot = AutomorphismGenerator(tuple([1, 2, 3, 0, 4, 5, 6]))
    assert str(to_domain_permutation(rot, mapping)) == "(t u v w)"
    gb = AutomorphismGenerator(tuple([0, 1, 2, 3, 4, 6, 5]))
    assert str(to_domain_permutation(gb, mapping)) == "(g b)"
    ident = AutomorphismGenerator(tuple(range(n)))
    assert to_domain_permutation(ident, mapping).is_identity()


def test_budget_marks_incomplete():
    gens = find_generators(graph(6, []), node_budget=2)
    assert not gens.complete


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_generators_are_automorphisms_and_generate_everything(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 7)
    edges = {(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < 0.4}
    g = graph(n, edges, [rng.randrange(2) for _ in range(n)])
    gens = find_generators(g)
    for gen in gens.generators:
        assert is_automorphism(g, gen.perm)
    brute = {p for p in itertools.permutations(range(n)) if is_automorphism(g, p)}
    assert group_elements([x.perm for x in gens.generators], n) == brute


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_fixing_group_matches_structures(seed):
    rng = random.Random(seed)
    dom = randgen.domain_of(rng.randint(2, 5))
    symbols = randgen.random_symbols(rng, 2, io=INPUT)
    s = randgen.random_structure(rng, symbols, dom, patterned=True)
    A = sorted(all_positions(symbols))
    g, mapping = build_dpg(s, A)
    for gen in find_generators(g).generators:
        assert fixes_structure(InducedTransform(A, to_domain_permutation(gen, mapping)), s)
