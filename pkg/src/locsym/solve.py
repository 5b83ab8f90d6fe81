"""A small CDCL SAT solver and a projected model counter.

Two watched literals, first-UIP learning with local minimization, VSIDS
over a lazy heap, phase saving, Luby restarts and LBD-based deletion of
learnt clauses. Literals index lists of length ``2n+1`` directly; negative
literals land in the upper half through Python's negative indexing.
"""

from __future__ import annotations

import heapq
import os
import random
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .ground import Cnf, emit_dimacs

SAT, UNSAT, UNKNOWN = "SAT", "UNSAT", "UNKNOWN"
DEFAULT_COUNT_BUDGET = 1 << 20


class CountBudgetExceeded(RuntimeError):
    pass


@dataclass
class SolverResult:
    status: str
    assignment: list = field(default_factory=list)  # signed literals for vars 1..n
    stats: dict = field(default_factory=dict)

    def value(self, var: int) -> bool:
        return self.assignment[var - 1] > 0

    def model_line(self) -> str:
        return "v " + " ".join(map(str, self.assignment + [0]))


def luby(i: int) -> int:
    """i-th element (from 1) of the Luby sequence 1 1 2 1 1 2 4 ..."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class Solver:
    def __init__(self, num_vars: int = 0, clauses: Iterable[Sequence[int]] = (), seed: int = 0):
        self.n = 0
        self.val: list = [0]
        self.level: list = [0]
        self.reason: list = [None]
        self.activity: list = [0.0]
        self.phase: list = [False]
        self.watches: list = [[]]
        self.trail: list = []
        self.trail_lim: list = []
        self.qhead = 0
        self.heap: list = []
        self.inc = 1.0
        self.clauses: list = []
        self.learnts: list = []
        self.lbd: dict = {}
        self.ok = True
        self.rng = random.Random(seed)
        self.seed = seed
        self.stats = {"decisions": 0, "conflicts": 0, "propagations": 0, "restarts": 0, "learnt": 0}
        self.ensure_vars(num_vars)
        for c in clauses:
            self.add_clause(c)

    # --- bookkeeping ---------------------------------------------------------

    def ensure_vars(self, n: int) -> None:
        if n <= self.n:
            return
        old = self.n
        # per-variable arrays
        grow = n - old
        self.level += [0] * grow
        self.reason += [None] * grow
        self.activity += [self.rng.random() * 1e-6 if self.seed else 0.0 for _ in range(grow)]
        self.phase += [False] * grow
        # literal-indexed arrays: rebuild as [0, 1..n, -n..-1]
        pos_val = self.val[1 : old + 1]
        neg_val = self.val[old + 1 :] if old else []
        self.val = [0] + pos_val + [0] * grow + [0] * grow + neg_val
        pos_w = self.watches[1 : old + 1]
        neg_w = self.watches[old + 1 :] if old else []
        self.watches = [[]] + pos_w + [[] for _ in range(2 * grow)] + neg_w
        self.n = n
        for v in range(old + 1, n + 1):
            heapq.heappush(self.heap, (-self.activity[v], v))

    def decision_level(self) -> int:
        return len(self.trail_lim)

    def enqueue(self, lit: int, reason) -> None:
        v = abs(lit)
        self.val[lit] = 1
        self.val[-lit] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def add_clause(self, clause: Sequence[int]) -> bool:
        """Add a clause at decision level 0; False once the formula is UNSAT."""
        if not self.ok:
            return False
        if self.trail_lim:
            self.backtrack(0)
        lits = sorted(set(clause), key=abs)
        if lits:
            self.ensure_vars(max(abs(l) for l in lits))
        val = self.val
        out = []
        for l in lits:
            if -l in lits or val[l] == 1:
                return True
            if val[l] == 0:
                out.append(l)
        if not out:
            self.ok = False
            return False
        if len(out) == 1:
            self.enqueue(out[0], None)
            if self.propagate() is not None:
                self.ok = False
            return self.ok
        self.clauses.append(out)
        self.watches[out[0]].append(out)
        self.watches[out[1]].append(out)
        return True

    # --- search --------------------------------------------------------------

    def propagate(self):
        val, watches, trail = self.val, self.watches, self.trail
        props = 0
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            props += 1
            false = -p
            ws = watches[false]
            i = j = 0
            end = len(ws)
            while i < end:
                c = ws[i]
                i += 1
                if c[0] == false:
                    c[0], c[1] = c[1], false
                first = c[0]
                if val[first] == 1:
                    ws[j] = c
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1] = lk
                        c[k] = false
                        watches[lk].append(c)
                        break
                else:
                    ws[j] = c
                    j += 1
                    if val[first] == -1:
                        while i < end:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.stats["propagations"] += props
                        return c
                    self.enqueue(first, c)
            del ws[j:]
        self.stats["propagations"] += props
        return None

    def bump(self, v: int) -> None:
        act = self.activity
        act[v] += self.inc
        if act[v] > 1e100:
            for u in range(1, self.n + 1):
                act[u] *= 1e-100
            self.inc *= 1e-100
            self.heap = [(-act[u], u) for u in range(1, self.n + 1) if self.val[u] == 0]
            heapq.heapify(self.heap)
        else:
            heapq.heappush(self.heap, (-act[v], v))

    def analyze(self, conflict) -> tuple[list, int]:
        level, reason, trail = self.level, self.reason, self.trail
        cur = len(self.trail_lim)
        seen = set()
        learnt = [0]
        counter = 0
        p = 0
        idx = len(trail) - 1
        c = conflict
        while True:
            for q in c:
                if q == p:
                    continue
                v = abs(q)
                if v not in seen and level[v] > 0:
                    seen.add(v)
                    self.bump(v)
                    if level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while abs(trail[idx]) not in seen:
                idx -= 1
            p = trail[idx]
            idx -= 1
            c = reason[abs(p)]
            counter -= 1
            if counter == 0:
                break
            seen.discard(abs(p))
        learnt[0] = -p
        # local minimization: drop literals implied by the rest
        keep = [learnt[0]]
        marked = {abs(l) for l in learnt}
        for q in learnt[1:]:
            r = reason[abs(q)]
            if r is None or any(abs(x) not in marked and level[abs(x)] > 0 for x in r if x != -q):
                keep.append(q)
        learnt = keep
        if len(learnt) == 1:
            back = 0
        else:
            best = max(range(1, len(learnt)), key=lambda i: level[abs(learnt[i])])
            learnt[1], learnt[best] = learnt[best], learnt[1]
            back = level[abs(learnt[1])]
        self.inc *= 1.0 / 0.95
        return learnt, back

    def backtrack(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        val, phase, reason, heap, act = self.val, self.phase, self.reason, self.heap, self.activity
        for lit in self.trail[start:]:
            v = abs(lit)
            val[lit] = 0
            val[-lit] = 0
            reason[v] = None
            phase[v] = lit > 0
            heapq.heappush(heap, (-act[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def pick(self) -> int:
        heap, val, act = self.heap, self.val, self.activity
        while heap:
            a, v = heapq.heappop(heap)
            if val[v] == 0 and -a == act[v]:
                return v if self.phase[v] else -v
        for v in range(1, self.n + 1):
            if val[v] == 0:
                return v if self.phase[v] else -v
        return 0

    def _locked(self, c) -> bool:
        v = abs(c[0])
        return self.reason[v] is c and self.val[c[0]] == 1

    def reduce_db(self) -> None:
        lbd = self.lbd
        candidates = [c for c in self.learnts if lbd.get(id(c), 0) > 2 and not self._locked(c)]
        candidates.sort(key=lambda c: (lbd[id(c)], len(c)), reverse=True)
        drop = {id(c) for c in candidates[: len(candidates) // 2]}
        if not drop:
            return
        self.learnts = [c for c in self.learnts if id(c) not in drop]
        for cid in drop:
            lbd.pop(cid, None)
        for w in self.watches:
            w[:] = [c for c in w if id(c) not in drop]

    def solve(self, max_conflicts: int | None = None, time_limit: float | None = None) -> SolverResult:
        start = time.perf_counter()
        base = dict(self.stats)
        if not self.ok:
            return self._result(UNSAT, start, base)
        if self.propagate() is not None:
            self.ok = False
            return self._result(UNSAT, start, base)
        restart_unit = 100
        restart_count = 1
        next_restart = luby(restart_count) * restart_unit
        since_restart = 0
        next_reduce = 2000
        conflicts = 0
        while True:
            conflict = self.propagate()
            if conflict is not None:
                conflicts += 1
                since_restart += 1
                self.stats["conflicts"] += 1
                if not self.trail_lim:
                    self.ok = False
                    return self._result(UNSAT, start, base)
                learnt, back = self.analyze(conflict)
                self.backtrack(back)
                if len(learnt) == 1:
                    self.enqueue(learnt[0], None)
                else:
                    self.learnts.append(learnt)
                    self.lbd[id(learnt)] = len({self.level[abs(l)] for l in learnt})
                    self.watches[learnt[0]].append(learnt)
                    self.watches[learnt[1]].append(learnt)
                    self.stats["learnt"] += 1
                    self.enqueue(learnt[0], learnt)
                if max_conflicts is not None and conflicts >= max_conflicts:
                    self.backtrack(0)
                    return self._result(UNKNOWN, start, base)
                if time_limit is not None and conflicts % 64 == 0 and time.perf_counter() - start > time_limit:
                    self.backtrack(0)
                    return self._result(UNKNOWN, start, base)
                continue
            if since_restart >= next_restart:
                self.stats["restarts"] += 1
                restart_count += 1
                next_restart = luby(restart_count) * restart_unit
                since_restart = 0
                self.backtrack(0)
            if len(self.learnts) - len(self.trail) >= next_reduce:
                self.reduce_db()
                next_reduce += 300
            lit = self.pick()
            if lit == 0:
                assignment = [v if self.val[v] == 1 else -v for v in range(1, self.n + 1)]
                result = self._result(SAT, start, base)
                result.assignment = assignment
                return result
            self.stats["decisions"] += 1
            self.trail_lim.append(len(self.trail))
            self.enqueue(lit, None)

    def _result(self, status: str, start: float, base: dict) -> SolverResult:
        stats = {k: self.stats[k] - base.get(k, 0) for k in self.stats}
        stats["time"] = time.perf_counter() - start
        if status == UNSAT:
            stats["final_conflict_level"] = 0
        return SolverResult(status, [], stats)


def sat_solve(
    cnf: Cnf,
    seed: int = 0,
    max_conflicts: int | None = None,
    time_limit: float | None = None,
) -> SolverResult:
    solver = Solver(cnf.num_vars, cnf.clauses, seed=seed)
    result = solver.solve(max_conflicts=max_conflicts, time_limit=time_limit)
    if result.status == SAT:
        result.assignment = result.assignment[: cnf.num_vars]
    return result


def count_models(
    cnf: Cnf,
    projection: Iterable[int] | None = None,
    budget: int = DEFAULT_COUNT_BUDGET,
) -> int:
    """Number of distinct assignments to ``projection`` that extend to models."""
    proj = sorted(set(projection)) if projection is not None else list(range(1, cnf.num_vars + 1))
    solver = Solver(cnf.num_vars, cnf.clauses)
    count = 0
    while True:
        result = solver.solve()
        if result.status != SAT:
            return count
        count += 1
        if count > budget:
            raise CountBudgetExceeded(f"more than {budget} projected models")
        if not proj:
            return 1
        model = result.assignment
        if not solver.add_clause([-model[v - 1] for v in proj]):
            return count


def projected_models(cnf: Cnf, projection: Iterable[int], budget: int = DEFAULT_COUNT_BUDGET) -> list[frozenset]:
    """The projected models themselves, as sets of true projection variables."""
    proj = sorted(set(projection))
    solver = Solver(cnf.num_vars, cnf.clauses)
    out = []
    while True:
        result = solver.solve()
        if result.status != SAT:
            return out
        model = result.assignment
        out.append(frozenset(v for v in proj if model[v - 1] > 0))
        if len(out) > budget:
            raise CountBudgetExceeded(f"more than {budget} projected models")
        if not proj or not solver.add_clause([-model[v - 1] for v in proj]):
            return out


def external_solve(cnf: Cnf, command: str, timeout: float | None = None) -> SolverResult:
    """Run any DIMACS solver (the file path is appended) and parse its ``s``/``v`` lines."""
    with tempfile.NamedTemporaryFile("w", suffix=".cnf", delete=False) as fh:
        fh.write(emit_dimacs(cnf) + "\n")
        path = fh.name
    start = time.perf_counter()
    try:
        proc = subprocess.run(shlex.split(command) + [path], capture_output=True, text=True, timeout=timeout)
    finally:
        os.unlink(path)
    status, values = UNKNOWN, []
    for line in proc.stdout.splitlines():
        if line.startswith("s "):
            word = line[2:].strip()
            status = {"SATISFIABLE": SAT, "UNSATISFIABLE": UNSAT}.get(word, UNKNOWN)
        elif line.startswith("v "):
            values += [int(t) for t in line[2:].split() if t != "0"]
    return SolverResult(status, values, {"time": time.perf_counter() - start, "returncode": proc.returncode})
