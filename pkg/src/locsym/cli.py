"""Command-line front end."""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import bench
from .argpos import closed_partition, parse_argpos_set
from .ground import catalog_json, emit_dimacs, ground_theory
from .logic import BudgetExceeded, Problem
from .pipeline import BREAK_MODES, RunReport, analyze, detect, ground_and_break, solve_problem
from .solve import SAT, UNSAT
from .syntax import format_theory, parse_problem
from .transform import DomainPermutation, InducedTransform, is_mx_symmetry_oracle


class StageError(Exception):
    def __init__(self, stage: str, error: Exception):
        super().__init__(str(error))
        self.stage = stage
        self.error = error


def load_problem(path: str, order: str | None) -> Problem:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        problem = parse_problem(text)
    except Exception as exc:
        raise StageError("parse", exc) from exc
    if order and order != "declared":
        elements = Path(order).read_text().split()
        if sorted(elements) != sorted(problem.domain):
            raise StageError("parse", ValueError("order file must list every domain element once"))
        problem = dataclasses.replace(problem, order=tuple(elements))
    return problem


def write_json(args, payload: dict) -> None:
    if args.json:
        Path(args.json).write_text(json.dumps(payload, indent=2) + "\n")


def cmd_analyze(args) -> int:
    problem = load_problem(args.file, args.order)
    star, blocks = analyze(problem)
    original = closed_partition(problem.theory, problem.symbols)
    payload = {
        "theory": original.as_json(),
        "decomposed": [[str(p) for p in b] for b in blocks],
        "theory_star": format_theory(star.theory_star).splitlines(),
    }
    print(json.dumps(payload, indent=2))
    write_json(args, payload)
    return 0


def _blocks_arg(args):
    if not args.positions:
        return None
    return [tuple(sorted(parse_argpos_set(text))) for text in args.positions]


def cmd_detect(args) -> int:
    problem = load_problem(args.file, args.order)
    report = RunReport()
    detect(
        problem,
        report,
        force_dpg=args.dpg,
        verify_oracle=args.verify_oracle,
        blocks=_blocks_arg(args),
    )
    payload = report.as_json(timings=not args.no_timings)
    print(json.dumps(payload, indent=2))
    write_json(args, payload)
    return 0


def cmd_ground(args) -> int:
    problem = load_problem(args.file, args.order)
    try:
        cnf, catalog = ground_theory(problem, strict=args.strict)
    except Exception as exc:
        raise StageError("ground", exc) from exc
    _emit(args, cnf, catalog)
    return 0


def cmd_break(args) -> int:
    problem = load_problem(args.file, args.order)
    try:
        cnf, catalog, report = ground_and_break(problem, args.mode, args.lex_cap)
    except Exception as exc:
        raise StageError("break", exc) from exc
    _emit(args, cnf, catalog)
    write_json(args, report.as_json(timings=not args.no_timings))
    return 0


def _emit(args, cnf, catalog) -> None:
    text = emit_dimacs(cnf) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if args.catalog:
        Path(args.catalog).write_text(catalog_json(catalog) + "\n")


def cmd_solve(args) -> int:
    problem = load_problem(args.file, args.order)
    try:
        report = solve_problem(
            problem,
            mode=args.mode,
            cap=args.lex_cap,
            seed=args.seed,
            max_conflicts=args.max_conflicts,
            time_limit=args.timeout,
            external=args.external_solver,
        )
    except Exception as exc:
        raise StageError("solve", exc) from exc
    result = report.result
    word = {SAT: "SATISFIABLE", UNSAT: "UNSATISFIABLE"}.get(result.status, "UNKNOWN")
    print(f"s {word}")
    if result.status == SAT:
        print(result.model_line())
    write_json(args, report.as_json(timings=not args.no_timings))
    return 0


def cmd_verify(args) -> int:
    problem = load_problem(args.file, args.order)
    try:
        A = parse_argpos_set(args.positions)
        pi = DomainPermutation.from_cycles(args.perm, problem.domain)
        ok = is_mx_symmetry_oracle(InducedTransform(A, pi), problem)
    except Exception as exc:
        raise StageError("verify", exc) from exc
    payload = {"A": sorted(str(p) for p in A), "perm": str(pi), "symmetry": ok}
    print(json.dumps(payload))
    write_json(args, payload)
    return 0


def _bench_problem(family: str, n: int, colors: int) -> Problem:
    if family == "pigeons":
        return bench.generate_pigeonhole(n)
    if family == "color-cycle":
        return bench.color_cycle(n, colors)
    return bench.queens(n)


def _bench_one(family: str, n: int, colors: int, mode: str, cap, seed: int, max_conflicts, timeout) -> dict:
    start = time.perf_counter()
    report = solve_problem(
        _bench_problem(family, n, colors),
        mode=mode,
        cap=cap,
        seed=seed,
        max_conflicts=max_conflicts,
        time_limit=timeout,
    )
    return {
        "family": family,
        "n": n,
        "status": report.result.status,
        "detection_time": report.detection_time,
        "total_time": time.perf_counter() - start,
        "conflicts": report.result.stats.get("conflicts", 0),
        "report": report.as_json(),
    }


def cmd_bench(args) -> int:
    first = 2 if args.family == "pigeons" else (3 if args.family == "color-cycle" else 4)
    sizes = range(args.min or first, args.max + 1)
    jobs = [(args.family, n, args.colors, args.mode, args.lex_cap, args.seed, args.max_conflicts, args.timeout) for n in sizes]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_bench_one, *zip(*jobs)))
    else:
        rows = [_bench_one(*job) for job in jobs]
    print(f"{'family':<12} {'n':>4} {'status':<8} {'detect s':>9} {'total s':>9} {'conflicts':>10}")
    for r in rows:
        print(
            f"{r['family']:<12} {r['n']:>4} {r['status']:<8} {r['detection_time']:>9.4f} "
            f"{r['total_time']:>9.3f} {r['conflicts']:>10}"
        )
    solved = sum(r["status"] in (SAT, UNSAT) for r in rows)
    print(f"solved {solved}/{len(rows)}")
    write_json(args, {"schema": 1, "rows": rows})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="locsym", description="Local domain symmetry detection and breaking.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--order", default="declared", help="file listing the element order, or 'declared'")
    common.add_argument("--json", metavar="PATH", help="write the JSON report here")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--no-timings", action="store_true", help="omit timings from JSON reports")

    breaking = argparse.ArgumentParser(add_help=False)
    breaking.add_argument("--break", dest="mode", choices=BREAK_MODES, default="interchange")
    breaking.add_argument("--lex-cap", type=int, default=None, help="truncate each lex-leader to k positions")

    solving = argparse.ArgumentParser(add_help=False)
    solving.add_argument("--external-solver", metavar="CMD", help="DIMACS solver command; the file path is appended")
    solving.add_argument("--max-conflicts", type=int, default=None)
    solving.add_argument("--timeout", type=float, default=None, help="solver time limit in seconds")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("-o", "--output", help="write DIMACS here instead of stdout")
    output.add_argument("--catalog", help="write the atom catalog JSON here")

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("analyze", parents=[common], help="print connectively closed blocks")
    p.add_argument("file")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("detect", parents=[common], help="find interchangeable blocks and generators")
    p.add_argument("file")
    p.add_argument("--positions", action="append", help="analyze this A (comma separated), repeatable")
    p.add_argument("--dpg", action="store_true", help="always run the graph automorphism search")
    p.add_argument("--verify-oracle", action="store_true", help="confirm generators by enumeration")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("ground", parents=[common, output], help="ground to DIMACS")
    p.add_argument("file")
    p.add_argument("--strict", action="store_true", help="fail on sentences false under the input")
    p.set_defaults(func=cmd_ground)

    p = sub.add_parser("break", parents=[common, breaking, output], help="ground and append breaking clauses")
    p.add_argument("file")
    p.set_defaults(func=cmd_break)

    p = sub.add_parser("solve", parents=[common, breaking, solving], help="detect, break and solve")
    p.add_argument("file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", parents=[common, breaking, solving], help="run a generated family")
    p.add_argument("--family", choices=bench.FAMILIES, default="pigeons")
    p.add_argument("--min", type=int, default=None)
    p.add_argument("--max", type=int, default=10)
    p.add_argument("--colors", type=int, default=3, help="colours for color-cycle")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", parents=[common], help="enumeration check of one (A, permutation)")
    p.add_argument("file")
    p.add_argument("--positions", required=True, help="argument positions, e.g. 'C#1|1,Color|0'")
    p.add_argument("--perm", required=True, help="cycle notation, e.g. '(r g)'")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(json.dumps({"error": str(exc), "stage": exc.stage, "type": type(exc.error).__name__}))
        return 1
    except (BudgetExceeded, OSError, ValueError) as exc:
        print(json.dumps({"error": str(exc), "stage": args.command, "type": type(exc).__name__}))
        return 1


if __name__ == "__main__":
    sys.exit(main())
