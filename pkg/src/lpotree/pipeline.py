"""Two-phase anytime synthesis: search for a best-effort front, then verify.

Phase 1 runs the multi-objective tree search for its share of the overall
deadline and seeds a working set S with the archive.  Phase 2 repeatedly pops
the most promising candidate (highest correctness, then explainability, then
tree text), and asks the SAT backend whether some tree strictly dominates it
within the slack window (delta_count more correct samples, delta_e more
explainability, capped at the measure maxima):

* UNSAT: nothing beats it locally; the candidate is certified and moved to
  the verified set S', which is kept an antichain.  Working-set entries it
  dominates are dropped.
* SAT: the witness replaces the candidate in S (strictly better in at least
  one measure by construction, so phase 2 always terminates when given time).
* Timeout / solver failure: the candidate goes back into S and the run stops;
  whatever is already in S' is certified regardless of where we stopped.

Every query is recorded in an audit log, so an interrupted run remains fully
reconstructible.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Optional

from .encoding import PhiEncoder, Window, decode
from .mdp import ActionRestrictions, MoMdp
from .measures import (
    Dataset,
    GoodnessTuple,
    PacParams,
    achieved_epsilon,
    leq,
    sample_complexity,
    strictly_less,
)
from .search import MoMctsSearch, SearchConfig
from .solver import SolverStatus, check_sat
from .trees import Node, TreeSpace, serialize


def slack_to_counts(delta_c: float, k: int) -> int:
    """Fractional correctness slack to a sample count, round half up."""
    if delta_c < 0:
        raise ValueError("delta_c must be >= 0")
    return int(delta_c * k + 0.5)


@dataclass
class PipelineConfig:
    t_overall: float = 60.0
    t_momcts: Optional[float] = None  # default: half of t_overall
    delta_c: Optional[float] = None  # fraction of K; default 10/K
    delta_e: int = 5
    pac: PacParams = field(default_factory=lambda: PacParams(0.25, 0.1))
    seed: int = 0
    search: SearchConfig = field(default_factory=SearchConfig)
    restrictions: ActionRestrictions = field(default_factory=ActionRestrictions)
    iterations: Optional[int] = None  # phase-1 iteration budget (besides time)
    max_phase2_queries: Optional[int] = None  # deterministic phase-2 cutoff
    solver: Optional[str] = None  # None/"auto" resolves via env, PATH, builtin
    debug_checks: bool = True

    def __post_init__(self) -> None:
        if self.t_overall < 0:
            raise ValueError("t_overall must be >= 0")
        if self.t_momcts is not None and self.t_momcts > self.t_overall:
            raise ValueError("t_momcts cannot exceed t_overall")
        if self.delta_c is not None and self.delta_c < 0:
            raise ValueError("delta_c must be >= 0")
        if self.delta_e < 0:
            raise ValueError("delta_e must be >= 0")

    @property
    def phase1_time(self) -> float:
        return self.t_overall / 2.0 if self.t_momcts is None else self.t_momcts


@dataclass(frozen=True)
class AuditEntry:
    query: int
    window: tuple[int, int, int, int]
    popped: tuple[int, int]
    result: str
    witness: Optional[tuple[int, int]]
    wall_time: float

    def as_dict(self) -> dict:
        return {
            "query": self.query,
            "window": list(self.window),
            "popped": list(self.popped),
            "result": self.result,
            "witness": None if self.witness is None else list(self.witness),
            "wall_time": self.wall_time,
        }


@dataclass
class RunOutput:
    verified: list[tuple[Node, GoodnessTuple]]  # S': certified locally optimal
    best_effort: list[tuple[Node, GoodnessTuple]]  # S: found but not certified
    audit: list[AuditEntry]
    status: str  # "ok" | "timeout" | "solver_error"
    message: str = ""
    warnings: list[str] = field(default_factory=list)
    delta_count: int = 0
    delta_e: int = 0
    archive_points: frozenset[GoodnessTuple] = frozenset()

    def verified_tuples(self) -> set[tuple[int, int]]:
        return {g.as_pair() for _, g in self.verified}

    def best_effort_tuples(self) -> set[tuple[int, int]]:
        return {g.as_pair() for _, g in self.best_effort}


def _pop_best(items: list[tuple[Node, GoodnessTuple]], space: TreeSpace) -> tuple[Node, GoodnessTuple]:
    """Remove and return the candidate to verify next: highest correctness,
    then highest explainability, then lexicographically smallest text."""
    best_idx = 0
    best_key = None
    for idx, (tree, g) in enumerate(items):
        key = (-g.correctness, -g.explainability, serialize(space, tree))
        if best_key is None or key < best_key:
            best_key = key
            best_idx = idx
    return items.pop(best_idx)


def pop_order(items: list[tuple[Node, GoodnessTuple]], space: TreeSpace) -> tuple[Node, GoodnessTuple]:
    """The element ``run`` would verify next, without removing it."""
    copy = list(items)
    return _pop_best(copy, space)


def _antichain_insert(items: list[tuple[Node, GoodnessTuple]],
                      entry: tuple[Node, GoodnessTuple]) -> None:
    """Insert unless dominated or already present; drop what it dominates."""
    g = entry[1]
    if any(leq(g, have) for _, have in items):
        return
    items[:] = [(t, have) for t, have in items if not strictly_less(have, g)]
    items.append(entry)


def run(space: TreeSpace, data: Dataset, config: PipelineConfig) -> RunOutput:
    t0 = time.monotonic()
    warnings: list[str] = []

    mu = sample_complexity(space, config.pac)
    if data.size < mu:
        eps = achieved_epsilon(space, config.pac.delta, data.size)
        warnings.append(
            f"dataset has {data.size} samples but {mu} are needed for "
            f"epsilon={config.pac.epsilon}, delta={config.pac.delta}; "
            f"correctness estimates are only within {eps:.3f} at this confidence"
        )

    delta_c = config.delta_c if config.delta_c is not None else 10.0 / data.size
    delta_count = slack_to_counts(delta_c, data.size)
    e_max = space.max_explainability

    search_cfg = replace(config.search, seed=config.seed, iterations=config.iterations)
    mdp = MoMdp(space, data, config.restrictions)
    searcher = MoMctsSearch(mdp, search_cfg)
    archive = searcher.run(deadline=None if config.iterations is not None else config.phase1_time)

    working: list[tuple[Node, GoodnessTuple]] = [(t, g) for g, t in archive.entries()]
    verified: list[tuple[Node, GoodnessTuple]] = []
    audit: list[AuditEntry] = []
    status = "ok"
    message = ""
    encoder = PhiEncoder(space, data) if working else None
    queries = 0

    while working:
        elapsed = time.monotonic() - t0
        if elapsed >= config.t_overall:
            status = "timeout"
            break
        if config.max_phase2_queries is not None and queries >= config.max_phase2_queries:
            status = "timeout"
            break
        tree, g = _pop_best(working, space)
        window = Window(
            g.correctness,
            g.explainability,
            min(g.correctness + delta_count, data.size),
            min(g.explainability + config.delta_e, e_max),
        )
        instance = encoder.instance(window)
        remaining = config.t_overall - (time.monotonic() - t0)
        t_query = time.monotonic()
        result = check_sat(instance, deadline=remaining, solver=config.solver)
        queries += 1
        witness_pair = None
        if result.status is SolverStatus.SAT:
            witness, wg = decode(result.assignment, encoder.varmap, space, data, window)
            witness_pair = wg.as_pair()
        audit.append(AuditEntry(
            query=queries,
            window=(window.c_lo, window.e_lo, window.c_hi, window.e_hi),
            popped=g.as_pair(),
            result=result.status.value,
            witness=witness_pair,
            wall_time=time.monotonic() - t_query,
        ))
        if result.status is SolverStatus.UNSAT:
            _antichain_insert(verified, (tree, g))
            # drop working candidates the certified point already dominates
            working = [(t, have) for t, have in working if not strictly_less(have, g)]
        elif result.status is SolverStatus.SAT:
            _antichain_insert(working, (witness, wg))
        elif result.status is SolverStatus.TIMEOUT:
            working.append((tree, g))
            status = "timeout"
            break
        else:
            working.append((tree, g))
            status = "solver_error"
            message = result.message
            break

    out = RunOutput(
        verified=sorted(verified, key=lambda e: (-e[1].correctness, -e[1].explainability)),
        best_effort=sorted(working, key=lambda e: (-e[1].correctness, -e[1].explainability)),
        audit=audit,
        status=status,
        message=message,
        warnings=warnings,
        delta_count=delta_count,
        delta_e=config.delta_e,
        archive_points=archive.tuples(),
    )
    if config.debug_checks:
        _check_output(out, warnings)
    return out


def _check_output(out: RunOutput, warnings: list[str]) -> None:
    vs = [g for _, g in out.verified]
    for i, a in enumerate(vs):
        for b in vs[i + 1:]:
            if strictly_less(a, b) or strictly_less(b, a):
                raise AssertionError(f"verified set is not an antichain: {a} vs {b}")
    for _, s in out.best_effort:
        for v in vs:
            if strictly_less(v, s):
                warnings.append(
                    f"unverified {s.as_pair()} dominates verified {v.as_pair()}; "
                    "the verification of the latter is still sound within its slack"
                )
