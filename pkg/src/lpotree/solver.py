"""SAT solving boundary: DIMACS serialization, external solvers, built-in CDCL.

``check_sat`` serializes an instance to DIMACS, hands it to a solver, and
parses the verdict.  The solver is configurable: an executable name/path
(invoked as ``<solver> <file>``, exit codes 10/20 and "s ..."/"v ..." output
lines honored, killed as a process group on deadline) or the string
``"builtin"``.  When unspecified, the ``LPOTREE_SOLVER`` environment variable,
then a ``kissat`` on PATH, then the builtin are tried in that order.

The builtin is a compact conflict-driven clause-learning solver (two watched
literals, first-UIP learning, VSIDS branching, phase saving, Luby restarts).
It exists so the package is fully self-contained; instances produced here are
small enough (hundreds of variables) that it answers in milliseconds.

Every satisfying assignment, external or builtin, is re-checked against the
clause list in-process before being returned.
"""

from __future__ import annotations

import enum
import heapq
import os
import shlex
import shutil
import signal
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass
from typing import Optional, Sequence


class SolverStatus(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    TIMEOUT = "timeout"
    ERROR = "error"


@dataclass(frozen=True)
class SolverResult:
    status: SolverStatus
    assignment: Optional[dict[int, bool]] = None
    message: str = ""

    @staticmethod
    def sat(assignment: dict[int, bool]) -> "SolverResult":
        return SolverResult(SolverStatus.SAT, assignment)

    @staticmethod
    def unsat() -> "SolverResult":
        return SolverResult(SolverStatus.UNSAT)

    @staticmethod
    def timeout() -> "SolverResult":
        return SolverResult(SolverStatus.TIMEOUT)

    @staticmethod
    def error(message: str) -> "SolverResult":
        return SolverResult(SolverStatus.ERROR, message=message)


def emit_dimacs(instance) -> bytes:
    """Stable byte-exact DIMACS CNF for anything with num_vars and clauses."""
    lines = [f"p cnf {instance.num_vars} {len(instance.clauses)}\n"]
    for clause in instance.clauses:
        lines.append(" ".join(str(lit) for lit in clause) + " 0\n")
    return "".join(lines).encode("ascii")


def parse_dimacs(text: str) -> tuple[int, list[tuple[int, ...]]]:
    num_vars = 0
    lits: list[int] = []
    clauses: list[tuple[int, ...]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad DIMACS header: {line!r}")
            num_vars = int(parts[2])
            continue
        for tok in line.split():
            lit = int(tok)
            if lit == 0:
                clauses.append(tuple(lits))
                lits.clear()
            else:
                lits.append(lit)
    if lits:
        clauses.append(tuple(lits))
    return num_vars, clauses


def assignment_satisfies(clauses: Sequence[Sequence[int]], assignment: dict[int, bool]) -> bool:
    for clause in clauses:
        for lit in clause:
            if assignment.get(abs(lit), False) == (lit > 0):
                break
        else:
            return False
    return True


def _luby(i: int) -> int:
    # Luby restart sequence 1,1,2,1,1,2,4,...
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while (1 << k) - 1 != i:
        # i sits strictly inside the k-block; recurse on its tail
        k -= 1
        i -= (1 << k) - 1
        while k > 1 and (1 << (k - 1)) - 1 >= i:
            k -= 1
    return 1 << (k - 1)


class CdclSolver:
    """Conflict-driven clause learning over a fixed clause list."""

    def __init__(self, num_vars: int, clauses: Sequence[Sequence[int]]):
        self.n = num_vars
        self.clauses: list[list[int]] = []
        self.watches: dict[int, list[int]] = {}
        self.assign = [0] * (num_vars + 1)  # 0 unknown, 1 true, -1 false
        self.level = [0] * (num_vars + 1)
        self.reason: list[Optional[int]] = [None] * (num_vars + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.activity = [0.0] * (num_vars + 1)
        self.var_inc = 1.0
        self.polarity = [False] * (num_vars + 1)
        self.order: list[tuple[float, int]] = []
        self.unsat_on_input = False
        self._units: list[int] = []
        for clause in clauses:
            lits = sorted(set(clause), key=abs)
            if any(-l in lits for l in lits):
                continue  # tautology
            if not lits:
                self.unsat_on_input = True
                return
            if len(lits) == 1:
                self._units.append(lits[0])
                continue
            self._add_watched(list(lits))

    def _add_watched(self, lits: list[int]) -> int:
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.watches.setdefault(lits[0], []).append(ci)
        self.watches.setdefault(lits[1], []).append(ci)
        return ci

    def _value(self, lit: int) -> int:
        v = self.assign[lit if lit > 0 else -lit]
        return v if lit > 0 else -v

    def _enqueue(self, lit: int, reason: Optional[int]) -> None:
        var = lit if lit > 0 else -lit
        self.assign[var] = 1 if lit > 0 else -1
        self.level[var] = len(self.trail_lim)
        self.reason[var] = reason
        self.polarity[var] = lit > 0
        self.trail.append(lit)

    def _propagate(self) -> Optional[int]:
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            false_lit = -p
            ws = self.watches.get(false_lit)
            if not ws:
                continue
            keep: list[int] = []
            idx = 0
            total = len(ws)
            while idx < total:
                ci = ws[idx]
                idx += 1
                lits = self.clauses[ci]
                if lits[0] == false_lit:
                    lits[0], lits[1] = lits[1], lits[0]
                first = lits[0]
                if self._value(first) == 1:
                    keep.append(ci)
                    continue
                for k in range(2, len(lits)):
                    if self._value(lits[k]) != -1:
                        lits[1], lits[k] = lits[k], lits[1]
                        self.watches.setdefault(lits[1], []).append(ci)
                        break
                else:
                    keep.append(ci)
                    if self._value(first) == -1:
                        keep.extend(ws[idx:])
                        self.watches[false_lit] = keep
                        self.qhead = len(self.trail)
                        return ci
                    self._enqueue(first, ci)
            self.watches[false_lit] = keep
        return None

    def _bump(self, var: int) -> None:
        self.activity[var] += self.var_inc
        if self.activity[var] > 1e100:
            for v in range(1, self.n + 1):
                self.activity[v] *= 1e-100
            self.var_inc *= 1e-100
        heapq.heappush(self.order, (-self.activity[var], var))

    def _analyze(self, conflict: int) -> tuple[list[int], int]:
        """First-UIP learning: returns (learnt clause, backjump level) with the
        asserting literal first and a highest-level literal second."""
        seen = [False] * (self.n + 1)
        learnt: list[int] = []
        counter = 0
        cur_level = len(self.trail_lim)
        lits: Sequence[int] = self.clauses[conflict]
        idx = len(self.trail) - 1
        p = 0
        while True:
            for lit in lits:
                if lit == p:
                    continue  # the asserting literal of the expanded reason
                var = lit if lit > 0 else -lit
                if seen[var] or self.level[var] == 0:
                    continue
                seen[var] = True
                self._bump(var)
                if self.level[var] == cur_level:
                    counter += 1
                else:
                    learnt.append(lit)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            p = self.trail[idx]
            var = abs(p)
            idx -= 1
            seen[var] = False
            counter -= 1
            if counter == 0:
                break
            lits = self.clauses[self.reason[var]]
        learnt.insert(0, -p)
        bt = 0
        if len(learnt) > 1:
            max_i = 1
            for i in range(2, len(learnt)):
                if self.level[abs(learnt[i])] > self.level[abs(learnt[max_i])]:
                    max_i = i
            learnt[1], learnt[max_i] = learnt[max_i], learnt[1]
            bt = self.level[abs(learnt[1])]
        return learnt, bt

    def _backtrack(self, to_level: int) -> None:
        limit = self.trail_lim[to_level]
        for lit in self.trail[limit:]:
            var = abs(lit)
            self.assign[var] = 0
            self.reason[var] = None
            heapq.heappush(self.order, (-self.activity[var], var))
        del self.trail[limit:]
        del self.trail_lim[to_level:]
        self.qhead = len(self.trail)

    def _decide(self) -> Optional[int]:
        while self.order:
            _, var = heapq.heappop(self.order)
            if self.assign[var] == 0:
                return var
        for var in range(1, self.n + 1):
            if self.assign[var] == 0:
                return var
        return None

    def solve(self, deadline: Optional[float] = None) -> tuple[str, Optional[list[bool]]]:
        """("sat", model) with model[v] for v in 1..n, ("unsat", None), or
        ("timeout", None).  deadline is an absolute time.monotonic() value."""
        if self.unsat_on_input:
            return "unsat", None
        for lit in self._units:
            if self._value(lit) == -1:
                return "unsat", None
            if self._value(lit) == 0:
                self._enqueue(lit, None)
        self.order = [(-self.activity[v], v) for v in range(1, self.n + 1)]
        heapq.heapify(self.order)
        conflicts = 0
        decisions = 0
        restart_idx = 1
        restart_budget = 100 * _luby(1)
        while True:
            conflict = self._propagate()
            if conflict is not None:
                conflicts += 1
                if not self.trail_lim:
                    return "unsat", None
                if deadline is not None and conflicts % 64 == 0 and time.monotonic() > deadline:
                    return "timeout", None
                learnt, bt = self._analyze(conflict)
                self._backtrack(bt)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    ci = self._add_watched(learnt)
                    self._enqueue(learnt[0], ci)
                self.var_inc /= 0.95
                restart_budget -= 1
                if restart_budget <= 0:
                    restart_idx += 1
                    restart_budget = 100 * _luby(restart_idx)
                    if self.trail_lim:
                        self._backtrack(0)
                continue
            var = self._decide()
            if var is None:
                model = [False] * (self.n + 1)
                for v in range(1, self.n + 1):
                    model[v] = self.assign[v] == 1
                return "sat", model
            decisions += 1
            if deadline is not None and decisions % 128 == 0 and time.monotonic() > deadline:
                return "timeout", None
            self.trail_lim.append(len(self.trail))
            self._enqueue(var if self.polarity[var] else -var, None)


def solve_builtin(num_vars: int, clauses: Sequence[Sequence[int]],
                  deadline: Optional[float] = None) -> SolverResult:
    """Run the builtin CDCL; deadline is a duration in seconds."""
    abs_deadline = None if deadline is None else time.monotonic() + deadline
    status, model = CdclSolver(num_vars, clauses).solve(abs_deadline)
    if status == "sat":
        assignment = {v: model[v] for v in range(1, num_vars + 1)}
        return SolverResult.sat(assignment)
    if status == "unsat":
        return SolverResult.unsat()
    return SolverResult.timeout()


def resolve_solver(solver: Optional[str]) -> list[str]:
    """Map a config value to an argv prefix; ["builtin"] selects the builtin."""
    if solver is None or solver == "auto":
        env = os.environ.get("LPOTREE_SOLVER")
        if env:
            return resolve_solver(env)
        if shutil.which("kissat"):
            return ["kissat"]
        return ["builtin"]
    if solver == "builtin":
        return ["builtin"]
    return shlex.split(solver)


def _parse_solver_output(out: str, returncode: int, num_vars: int) -> SolverResult:
    status: Optional[str] = None
    vlits: list[int] = []
    for line in out.splitlines():
        if line.startswith("s "):
            status = line[2:].strip()
        elif line.startswith("v ") or line == "v":
            vlits.extend(int(t) for t in line[1:].split())
    if status is None:
        if returncode == 10:
            status = "SATISFIABLE"
        elif returncode == 20:
            status = "UNSATISFIABLE"
    if status == "UNSATISFIABLE":
        return SolverResult.unsat()
    if status == "SATISFIABLE":
        assignment = {v: False for v in range(1, num_vars + 1)}
        for lit in vlits:
            if lit != 0 and abs(lit) <= num_vars:
                assignment[abs(lit)] = lit > 0
        return SolverResult.sat(assignment)
    return SolverResult.error(
        f"unparsable solver output (exit code {returncode}): {out[:200]!r}"
    )


def _run_external(cmd: list[str], instance, deadline: Optional[float]) -> SolverResult:
    with tempfile.NamedTemporaryFile(suffix=".cnf", delete=False) as tmp:
        tmp.write(emit_dimacs(instance))
        path = tmp.name
    try:
        try:
            proc = subprocess.Popen(
                cmd + [path],
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                start_new_session=True,
            )
        except FileNotFoundError:
            return SolverResult.error(f"solver binary not found: {cmd[0]}")
        try:
            out, _ = proc.communicate(timeout=deadline)
        except subprocess.TimeoutExpired:
            # kill the whole process group so no child survives the deadline
            try:
                os.killpg(proc.pid, signal.SIGKILL)
            except ProcessLookupError:
                pass
            proc.wait()
            return SolverResult.timeout()
        return _parse_solver_output(out, proc.returncode, instance.num_vars)
    finally:
        os.unlink(path)


def check_sat(instance, deadline: Optional[float] = None,
              solver: Optional[str] = None) -> SolverResult:
    """Solve one CNF instance under an optional deadline in seconds."""
    if deadline is not None and deadline <= 0:
        return SolverResult.timeout()
    cmd = resolve_solver(solver)
    if cmd == ["builtin"]:
        result = solve_builtin(instance.num_vars, instance.clauses, deadline)
    else:
        result = _run_external(cmd, instance, deadline)
    if result.status is SolverStatus.SAT:
        if not assignment_satisfies(instance.clauses, result.assignment):
            return SolverResult.error("solver returned a non-satisfying assignment")
    return result


def solve_dimacs_main(argv: Optional[list[str]] = None) -> int:
    """Console entry point: a DIMACS solver speaking the standard protocol.

    Usage: lpotree-solve FILE.cnf ; prints "s ..."/"v ..." lines, exits 10/20.
    """
    args = sys.argv[1:] if argv is None else argv
    if len(args) != 1:
        print("usage: lpotree-solve FILE.cnf", file=sys.stderr)
        return 1
    with open(args[0], "r", encoding="ascii") as handle:
        num_vars, clauses = parse_dimacs(handle.read())
    result = solve_builtin(num_vars, clauses)
    if result.status is SolverStatus.SAT:
        print("s SATISFIABLE")
        lits = [v if result.assignment[v] else -v for v in range(1, num_vars + 1)]
        for start in range(0, len(lits), 20):
            print("v " + " ".join(str(l) for l in lits[start:start + 20]))
        print("v 0")
        return 10
    if result.status is SolverStatus.UNSAT:
        print("s UNSATISFIABLE")
        return 20
    print("s UNKNOWN")
    return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(solve_dimacs_main())
