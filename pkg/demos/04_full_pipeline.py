"""
The two-phase pipeline end to end
=================================

Phase 1 searches, phase 2 certifies.  The pipeline pops the best working
candidate (highest correctness, then explainability), asks the solver for a
strict dominator within the slack window, and either certifies the candidate
(UNSAT) or swaps in the witness (SAT).  Everything it asked is kept in an
audit log so a run can be replayed or resumed after a timeout.
"""

import json
import os
import tempfile

from lpotree import PipelineConfig, run, write_outputs
from lpotree.benchmarks import load

config, data, space = load("rand3x2")

# delta_c is a fraction of the sample count; 2/32 allows a dominator to be
# up to two more samples correct, delta_e up to three units simpler.
cfg = PipelineConfig(
    t_overall=120.0,
    iterations=4000,
    seed=0,
    delta_c=2 / data.size,
    delta_e=3,
    solver="builtin",
)
out = run(space, data, cfg)

print("status:", out.status)
print("slacks: delta_count =", out.delta_count, " delta_e =", out.delta_e)

# The dataset is deliberately small, so the PAC bound cannot hold at the
# default (epsilon, delta); the run says so instead of failing.
for w in out.warnings:
    print("warning:", w)

# S': each point came back UNSAT, i.e. nothing within the slack beats it.
print("\nverified (locally optimal within slack):")
for tree, g in out.verified:
    print(f"  {g.as_pair()}")

# S: leftovers the run never disproved (empty when phase 2 finished).
print("best effort:", [g.as_pair() for _, g in out.best_effort])

# The audit log is the whole phase-2 transcript: one line per solver call.
print("\naudit trail:")
for entry in out.audit:
    print(f"  query {entry.query}: popped {entry.popped} window {entry.window}"
          f" -> {entry.result}"
          + (f" witness {entry.witness}" if entry.witness else ""))

# write_outputs drops front.csv, verified.csv, best_effort.csv, audit.jsonl.
with tempfile.TemporaryDirectory() as tmp:
    write_outputs(out, space, data, tmp)
    print("\nfiles:", sorted(os.listdir(tmp)))
    with open(os.path.join(tmp, "audit.jsonl")) as handle:
        first = json.loads(handle.readline())
    print("first audit record:", first)
