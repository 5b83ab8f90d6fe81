"""Generated benchmark problems."""

from __future__ import annotations

from importlib import resources

from .logic import Problem
from .syntax import parse_problem


def _set(items) -> str:
    return "{ " + ", ".join(items) + " }"


def pigeonhole_text(n: int) -> str:
    if n < 2:
        raise ValueError("need at least two pigeons")
    pigeons = [f"p{i}" for i in range(1, n + 1)]
    holes = [f"h{i}" for i in range(1, n)]
    return "\n".join(
        [
            f"% {n} pigeons, {n - 1} holes",
            "vocab {",
            "  pred Pigeon/1 input",
            "  pred Hole/1 input",
            "  func Place/1 output",
            "}",
            f"domain = {{ {' '.join(pigeons + holes)} }}",
            "theory {",
            "  ! x : Pigeon(x) => Hole(Place(x)).",
            "  ! x y : Pigeon(x) & Pigeon(y) & x ~= y => Place(x) ~= Place(y).",
            "}",
            "structure {",
            f"  Pigeon = {_set(pigeons)}",
            f"  Hole = {_set(holes)}",
            "}",
            "",
        ]
    )


def generate_pigeonhole(n: int) -> Problem:
    return parse_problem(pigeonhole_text(n))


def color_cycle_text(n: int, k: int) -> str:
    """The bundled colouring problem scaled to a directed n-cycle and k colours."""
    if n < 2 or k < 1:
        raise ValueError("need n >= 2 vertices and k >= 1 colours")
    nodes = [f"v{i}" for i in range(1, n + 1)]
    colors = [f"c{i}" for i in range(1, k + 1)]
    edges = [f"({a}, {b})" for a, b in zip(nodes, nodes[1:] + nodes[:1])]
    return "\n".join(
        [
            f"% directed {n}-cycle, {k} colours",
            "vocab {",
            "  pred V/1 input",
            "  pred C/1 input",
            "  pred Edge/2 input",
            "  func Color/1 output",
            "}",
            f"domain = {{ {' '.join(nodes + colors)} }}",
            "theory {",
            "  ! x y : Edge(x, y) => Color(x) ~= Color(y).",
            "  ! x y : Edge(x, y) => V(x) & V(y).",
            "  ! x : C(Color(x)).",
            "}",
            "structure {",
            f"  V = {_set(nodes)}",
            f"  C = {_set(colors)}",
            f"  Edge = {_set(edges)}",
            "}",
            "",
        ]
    )


def color_cycle(n: int, k: int) -> Problem:
    return parse_problem(color_cycle_text(n, k))


def queens_text(n: int = 5) -> str:
    """n-queens with rows as elements and diagonals through a capped addition table."""
    if n < 1:
        raise ValueError("need a positive board size")
    numbers = [f"n{i}" for i in range(2 * n - 1)]
    top = len(numbers) - 1
    add = [f"({numbers[a]}, {numbers[b]}) -> {numbers[min(a + b, top)]}" for a in range(top + 1) for b in range(top + 1)]
    return "\n".join(
        [
            f"% {n}-queens",
            "vocab {",
            "  pred Idx/1 input",
            "  func Add/2 input",
            "  func Col/1 output",
            "}",
            f"domain = {{ {' '.join(numbers)} }}",
            "theory {",
            "  ! r : Idx(r) => Idx(Col(r)).",
            "  ! r s : Idx(r) & Idx(s) & r ~= s => Col(r) ~= Col(s).",
            "  ! r s : Idx(r) & Idx(s) & r ~= s => Add(r, Col(r)) ~= Add(s, Col(s)).",
            "  ! r s : Idx(r) & Idx(s) & r ~= s => Add(r, Col(s)) ~= Add(s, Col(r)).",
            "}",
            "structure {",
            f"  Idx = {_set(numbers[:n])}",
            "  Add = { " + ", ".join(add) + " }",
            "}",
            "",
        ]
    )


def queens(n: int = 5) -> Problem:
    return parse_problem(queens_text(n))


def running_example_text() -> str:
    return resources.files("locsym").joinpath("data/graph_coloring.lsp").read_text()


def running_example() -> Problem:
    return parse_problem(running_example_text())


FAMILIES = ("pigeons", "color-cycle", "queens")
