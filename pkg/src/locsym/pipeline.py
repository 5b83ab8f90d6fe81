"""The end-to-end pipeline: analyze, detect, break, ground and solve."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Sequence

from .argpos import ArgPos, closed_partition
from .autom import DEFAULT_NODE_BUDGET, find_generators, to_domain_permutation
from .breaker import (
    VarPool,
    append_constraints,
    atom_order,
    break_generators,
    break_interchangeable,
    completeness_condition,
    consecutive_swaps,
)
from .decompose import Decomposition, decompose
from .dpg import build_dpg
from .ground import AtomCatalog, Cnf, ground_theory
from .interchange import interchangeable_partition
from .logic import Problem
from .solve import SolverResult, external_solve, sat_solve
from .transform import InducedTransform, is_mx_symmetry_oracle

SCHEMA_VERSION = 1
BREAK_MODES = ("interchange", "generators", "both", "none")


@dataclass
class BlockReport:
    A: tuple  # visible argument positions
    interchangeable: list  # element lists with at least two members
    generators: list  # DomainPermutation
    dpg_built: bool
    dpg_vertices: int = 0
    complete_search: bool = True
    completeness_condition: bool = True
    verified: bool | None = None

    def as_json(self) -> dict:
        return {
            "A": [str(p) for p in self.A],
            "interchangeable": [list(b) for b in self.interchangeable],
            "generators": [str(g) for g in self.generators],
            "dpg_built": self.dpg_built,
            "dpg_vertices": self.dpg_vertices,
            "complete_search": self.complete_search,
            "completeness_condition": self.completeness_condition,
            "verified": self.verified,
        }


@dataclass
class RunReport:
    timings: dict = field(default_factory=dict)
    blocks: list = field(default_factory=list)
    cnf_vars: int = 0
    cnf_clauses: int = 0
    breaking_clauses: int = 0
    result: SolverResult | None = None
    notes: list = field(default_factory=list)

    @contextmanager
    def timed(self, stage: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[stage] = self.timings.get(stage, 0.0) + time.perf_counter() - start

    @property
    def detection_time(self) -> float:
        keys = ("decompose", "analyze", "dpg", "automorphisms", "interchange")
        return sum(self.timings.get(k, 0.0) for k in keys)

    def as_json(self, timings: bool = True) -> dict:
        out: dict = {
            "schema": SCHEMA_VERSION,
            "blocks": [b.as_json() for b in self.blocks],
            "cnf": {"vars": self.cnf_vars, "clauses": self.cnf_clauses, "breaking_clauses": self.breaking_clauses},
            "notes": list(self.notes),
        }
        if self.result is not None:
            stats = {k: v for k, v in self.result.stats.items() if timings or k != "time"}
            out["result"] = {"status": self.result.status, "stats": stats}
        if timings:
            out["timings"] = {k: round(v, 6) for k, v in self.timings.items()}
        return out


def needs_dpg(A: Sequence[ArgPos]) -> bool:
    """Several positions of one symbol in A; otherwise interchangeability says it all."""
    seen = set()
    for p in A:
        if p.symbol in seen:
            return True
        seen.add(p.symbol)
    return False


def analyze(problem: Problem, report: RunReport | None = None) -> tuple[Decomposition, list]:
    """Decomposition plus the visible minimal closed blocks."""
    report = report or RunReport()
    with report.timed("decompose"):
        star = decompose(problem)
    with report.timed("analyze"):
        part = closed_partition(star.theory_star, star.problem.symbols)
        blocks = [tuple(part.visible(b)) for b in part.blocks if part.visible(b)]
    return star, blocks


def detect(
    problem: Problem,
    report: RunReport | None = None,
    force_dpg: bool = False,
    node_budget: int = DEFAULT_NODE_BUDGET,
    verify_oracle: bool = False,
    oracle_budget: int = 1 << 16,
    blocks: Sequence[Sequence[ArgPos]] | None = None,
) -> list[BlockReport]:
    report = report or RunReport()
    star, found = analyze(problem, report)
    struct = star.struct_star
    out = []
    for A in blocks if blocks is not None else found:
        A = tuple(A)
        with report.timed("interchange"):
            inter = interchangeable_partition(struct, A, problem.order)
        block = BlockReport(
            A,
            inter.interchangeable,
            [],
            dpg_built=False,
            completeness_condition=completeness_condition(A, problem),
        )
        if force_dpg or needs_dpg(A):
            with report.timed("dpg"):
                graph, mapping = build_dpg(struct, A, problem.order)
            with report.timed("automorphisms"):
                gens = find_generators(graph, node_budget)
            block.dpg_built = True
            block.dpg_vertices = graph.order
            block.complete_search = gens.complete
            block.generators = [to_domain_permutation(g, mapping, problem.domain) for g in gens.generators]
        else:
            for delta in inter.interchangeable:
                block.generators += consecutive_swaps(delta, problem.domain)
        if verify_oracle:
            block.verified = _verify(problem, A, block.generators, oracle_budget)
        out.append(block)
    report.blocks = out
    return out


def _verify(problem: Problem, A, generators, budget: int) -> bool | None:
    from .logic import BudgetExceeded
    from .transform import mx_solutions

    try:
        sols = mx_solutions(problem, budget)
    except BudgetExceeded:
        return None
    return all(is_mx_symmetry_oracle(InducedTransform(A, g), problem, solutions=sols) for g in generators)


def breaking_constraints(
    problem: Problem,
    blocks: Sequence[BlockReport],
    catalog: AtomCatalog,
    pool: VarPool,
    mode: str = "interchange",
    cap: int | None = None,
) -> list:
    if mode not in BREAK_MODES:
        raise ValueError(f"unknown breaking mode {mode!r}")
    out = []
    if mode == "none":
        return out
    for block in blocks:
        order = atom_order(problem, block.A)
        if not order.atoms:
            continue
        if mode in ("interchange", "both"):
            for delta in block.interchangeable:
                out += break_interchangeable(delta, block.A, order, catalog, pool, problem, cap)
        if mode in ("generators", "both") and block.dpg_built:
            out += break_generators(block.generators, block.A, order, catalog, pool, cap)
    return out


def ground_and_break(
    problem: Problem,
    mode: str = "interchange",
    cap: int | None = None,
    report: RunReport | None = None,
    force_dpg: bool = False,
) -> tuple[Cnf, AtomCatalog, RunReport]:
    report = report or RunReport()
    blocks = detect(problem, report, force_dpg=force_dpg or mode in ("generators", "both")) if mode != "none" else []
    with report.timed("grounding"):
        cnf, catalog = ground_theory(problem)
    report.notes += cnf.notes
    with report.timed("breaking"):
        pool = VarPool(cnf.num_vars)
        constraints = breaking_constraints(problem, blocks, catalog, pool, mode, cap)
        broken = append_constraints(cnf, constraints, pool)
    report.cnf_vars = broken.num_vars
    report.cnf_clauses = len(broken.clauses)
    report.breaking_clauses = len(broken.clauses) - len(cnf.clauses)
    return broken, catalog, report


def solve_problem(
    problem: Problem,
    mode: str = "interchange",
    cap: int | None = None,
    seed: int = 0,
    max_conflicts: int | None = None,
    time_limit: float | None = None,
    external: str | None = None,
) -> RunReport:
    cnf, catalog, report = ground_and_break(problem, mode, cap)
    with report.timed("solving"):
        if external:
            report.result = external_solve(cnf, external, timeout=time_limit)
        else:
            report.result = sat_solve(cnf, seed=seed, max_conflicts=max_conflicts, time_limit=time_limit)
    return report
