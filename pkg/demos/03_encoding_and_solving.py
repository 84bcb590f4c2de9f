"""
Phase 2 building block: the window query as CNF
===============================================

"Is there a tree strictly better than (c, e) but still within the caps?"
becomes a propositional formula over node-slot variables: which function a
slot carries, where each branch points, which samples each slot classifies
correctly, and two threshold counters (a totalizer for correctness, a
weighted sequential counter for explainability).  UNSAT certifies local
Pareto-optimality of the corner; a model decodes into a witness tree.
"""

from lpotree import PhiEncoder, SolverStatus, Window, check_sat, emit_dimacs, serialize
from lpotree.encoding import decode_instance, sidecar_map
from lpotree.benchmarks import load

config, data, space = load("tiny6")
encoder = PhiEncoder(space, data)  # structural clauses are built once

# Ask whether anything beats (10, 1): plenty of room under the caps.
window = Window(10, 1, data.size, space.max_explainability)
instance = encoder.instance(window)
print(f"window {window}: {instance.num_vars} vars, {len(instance.clauses)} clauses")

# The instance serializes to standard DIMACS, so any solver can be plugged
# in (set LPOTREE_SOLVER or pass solver="kissat"); the builtin CDCL is the
# self-contained default.
print(emit_dimacs(instance).decode("ascii").splitlines()[0])
print("\n".join(sidecar_map(encoder.varmap, space).splitlines()[:4]), "...")

result = check_sat(instance, solver="builtin")
print("verdict:", result.status.value)
assert result.status is SolverStatus.SAT
tree, g = decode_instance(result.assignment, instance)
print("witness:", serialize(space, tree), "with goodness", g.as_pair())

# The front point of this benchmark is (15, 1); nothing dominates it within
# any slack, so its window is UNSAT - that UNSAT answer is the certificate
# the pipeline stores for verified points.
front_window = Window(15, 1, data.size, space.max_explainability)
verdict = check_sat(encoder.instance(front_window), solver="builtin")
print(f"window {front_window}:", verdict.status.value)
