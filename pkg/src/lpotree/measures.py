"""Goodness measures for complete trees and the partial order over them.

A tree's goodness is the pair (correctness, explainability).  Correctness is
the number of dataset samples the tree labels the same way as the recorded
label.  Explainability rewards small, cheap trees:

    E(D) = (B - m) * (W + 1) + sum of the weights of D's internal nodes

where m is the number of internal nodes, B the budget, and W the largest
function weight in the space.  An unused budget slot is worth W + 1, strictly
more than any single function, so using fewer nodes always explains better
than swapping in a cheaper function.

Both measures are "higher is better"; the componentwise order and the PAC
sample-size bound for estimating correctness from samples live here too.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .trees import Node, TreeSpace, count_trees, evaluate, internal_count, is_complete


@dataclass(frozen=True)
class Dataset:
    """Rows paired with recorded label indices (the black box's answers)."""

    rows: tuple[object, ...]
    labels: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != len(self.labels):
            raise ValueError("rows and labels must have equal length")
        if not self.rows:
            raise ValueError("dataset must contain at least one sample")

    @property
    def size(self) -> int:
        return len(self.rows)

    def pairs(self):
        return zip(self.rows, self.labels)


@dataclass(frozen=True, order=False)
class GoodnessTuple:
    correctness: int
    explainability: int

    def as_pair(self) -> tuple[int, int]:
        return (self.correctness, self.explainability)


def leq(a: GoodnessTuple, b: GoodnessTuple) -> bool:
    """Componentwise a at most b (b is at least as good on both measures)."""
    return a.correctness <= b.correctness and a.explainability <= b.explainability


def strictly_less(a: GoodnessTuple, b: GoodnessTuple) -> bool:
    return leq(a, b) and a != b


class Dominance(enum.Enum):
    DOMINATED = -1
    EQUAL_OR_INCOMPARABLE = 0
    STRICTLY_DOMINATES = 1


def dominates(a: GoodnessTuple, b: GoodnessTuple) -> Dominance:
    """How ``a`` relates to ``b``: strictly dominates, is dominated, or neither."""
    if strictly_less(b, a):
        return Dominance.STRICTLY_DOMINATES
    if strictly_less(a, b):
        return Dominance.DOMINATED
    return Dominance.EQUAL_OR_INCOMPARABLE


def correctness(space: TreeSpace, tree: Node, data: Dataset) -> int:
    return sum(1 for row, y in data.pairs() if evaluate(space, tree, row) == y)


def explainability(space: TreeSpace, tree: Node) -> int:
    if not is_complete(tree):
        raise ValueError("explainability is defined for complete trees only")
    spare = space.budget - internal_count(tree)
    weights = _weight_sum(space, tree)
    return spare * (space.max_weight + 1) + weights


def _weight_sum(space: TreeSpace, tree: Node) -> int:
    from .trees import Internal

    if isinstance(tree, Internal):
        return space.functions[tree.function].weight + sum(
            _weight_sum(space, c) for c in tree.children
        )
    return 0


def goodness(space: TreeSpace, tree: Node, data: Dataset) -> GoodnessTuple:
    return GoodnessTuple(correctness(space, tree, data), explainability(space, tree))


@dataclass(frozen=True)
class PacParams:
    epsilon: float
    delta: float

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")


def sample_complexity(space: TreeSpace, pac: PacParams) -> int:
    """Samples sufficient for +-epsilon correctness estimates across the whole
    space simultaneously, with probability 1 - delta (Hoeffding + union bound)."""
    n = count_trees(space)
    log_term = math.log(2 * n) - math.log(pac.delta)
    return math.ceil(log_term / (2.0 * pac.epsilon**2))


def achieved_epsilon(space: TreeSpace, delta: float, k: int) -> float:
    """The epsilon actually guaranteed by k samples at confidence 1 - delta."""
    if k <= 0:
        raise ValueError("need at least one sample")
    n = count_trees(space)
    log_term = math.log(2 * n) - math.log(delta)
    return math.sqrt(log_term / (2.0 * k))
