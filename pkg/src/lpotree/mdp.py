"""Deterministic multi-objective MDP whose episodes build one tree each.

States are partial or complete trees; the initial state is a single hole.
An action (i, j) fills the i-th hole (depth-first order) with production j.
Transitions are deterministic.  The reward is the zero vector everywhere
except on the step that completes the tree, which pays the tree's goodness
(correctness, explainability).

Action pruning (all on by default) shrinks the tree-shaped search space
without losing any complete tree:

* ``first_hole_only``: only the leftmost hole may be filled.  Every complete
  tree is still reachable by exactly one action sequence.
* ``skip_self_loops``: hole indices beyond the current hole count are not
  offered.  Without it, actions range over 1..n_max and out-of-range indices
  leave the state unchanged.
* ``no_root_labels``: the initial hole cannot be filled with a label, so every
  episode produces a tree with at least one internal node.

``n_max = 1 + B * (b_max - 1)`` bounds the number of holes any reachable
state can have: each function application consumes one hole and opens at most
``b_max`` new ones, and at most B applications fit in the budget.
"""

from __future__ import annotations

from dataclasses import dataclass

from .measures import Dataset, GoodnessTuple, goodness
from .trees import HOLE, Action, Hole, Node, TreeSpace, apply_action, hole_count, internal_count, is_complete


@dataclass(frozen=True)
class ActionRestrictions:
    first_hole_only: bool = True
    skip_self_loops: bool = True
    no_root_labels: bool = True


class MoMdp:
    """Tree-building MDP; stateless apart from its space, data, and options."""

    def __init__(
        self,
        space: TreeSpace,
        data: Dataset,
        restrictions: ActionRestrictions = ActionRestrictions(),
    ):
        if space.budget < 1:
            raise ValueError("tree-building MDP needs budget >= 1")
        self.space = space
        self.data = data
        self.restrictions = restrictions
        self.n_max = 1 + space.budget * (space.max_branches - 1)

    @property
    def initial_state(self) -> Node:
        return HOLE

    def is_terminal(self, state: Node) -> bool:
        return is_complete(state)

    def legal_actions(self, state: Node) -> list[Action]:
        if is_complete(state):
            return []
        nf = len(self.space.functions)
        nl = len(self.space.labels)
        productions = []
        if internal_count(state) < self.space.budget:
            productions.extend(range(1, nf + 1))
        if not (self.restrictions.no_root_labels and isinstance(state, Hole)):
            productions.extend(range(nf + 1, nf + nl + 1))
        holes = hole_count(state)
        if self.restrictions.first_hole_only:
            hole_indices = range(1, 2)
        elif self.restrictions.skip_self_loops:
            hole_indices = range(1, holes + 1)
        else:
            hole_indices = range(1, self.n_max + 1)
        return [(i, j) for i in hole_indices for j in productions]

    def step(self, state: Node, action: Action) -> tuple[Node, tuple[int, int]]:
        if action not in self.legal_actions(state):
            raise ValueError(f"illegal action {action} in state")
        nxt = apply_action(self.space, state, action)
        if is_complete(nxt):
            g = self.goodness(nxt)
            return nxt, (g.correctness, g.explainability)
        return nxt, (0, 0)

    def goodness(self, tree: Node) -> GoodnessTuple:
        return goodness(self.space, tree, self.data)
