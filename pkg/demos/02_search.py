"""
Phase 1: multi-objective Monte Carlo tree search
================================================

Episodes of the tree-building MDP start from a single hole and fill holes
depth-first; the reward on completion is the goodness tuple.  The search
keeps a Pareto archive of every complete tree it sees and steers expansion
by how much a child's optimistic value would grow the archive's hypervolume.
"""

from lpotree import MoMctsSearch, MoMdp, SearchConfig, hypervolume, serialize
from lpotree.benchmarks import load

# rand3x2: three binary features of weight 3, budget 3, 32 noisy samples.
config, data, space = load("rand3x2")
mdp = MoMdp(space, data)
print(f"space: budget {space.budget}, {len(space.functions)} functions, "
      f"{data.size} samples, n_max {mdp.n_max} holes")

# From the root only function productions are offered (a bare label would
# be a trivial interpretation); actions are (hole index, production).
print("root actions:", mdp.legal_actions(mdp.initial_state))

searcher = MoMctsSearch(mdp, SearchConfig(seed=0, iterations=4000))
searcher.run(snapshot_every=500)

# The archive is an antichain and only ever grows outward (anytime contract):
# any snapshot is a valid, monotonically improving answer.
for iteration, points in searcher.snapshots:
    pairs = sorted((g.as_pair() for g in points), reverse=True)
    print(f"after {iteration:5d} iterations: {pairs}")

print("\nfinal archive:")
for g, tree in searcher.archive.entries():
    print(f"  ({g.correctness:2d},{g.explainability:2d})  {serialize(space, tree)}")

# Hypervolume of the scaled front, the quantity the bandit rule optimizes.
emax = space.budget * (space.max_weight + 1)
scaled = [(c / data.size, e / emax) for c, e in searcher.archive.points()]
print("scaled front hypervolume:", round(hypervolume(scaled, (0.0, 0.0)), 4))
