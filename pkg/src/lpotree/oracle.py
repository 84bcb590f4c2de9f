"""Brute-force ground truth for small spaces.

Everything here enumerates the complete trees of a space outright and
computes exact answers: the set of achievable goodness tuples, the global
Pareto front, window satisfiability (is there a tree strictly better than a
point but still under a cap), and the local-optimality check (no dominator
within the slack window).

``min_internal`` selects the universe.  The synthesizer and the CNF encoding
both work over trees with at least one internal node (the root hole is never
labelled directly and encoding slot 1 is always used), so comparisons against
them pass ``min_internal=1``; pass 0 to include bare-leaf trees.
"""

from __future__ import annotations

from typing import Iterator, Optional

from .encoding import Window
from .measures import Dataset, GoodnessTuple, goodness, strictly_less
from .trees import Node, TreeSpace, enumerate_trees, internal_count


def enumerate_goodness(space: TreeSpace, data: Dataset,
                       min_internal: int = 0) -> Iterator[tuple[Node, GoodnessTuple]]:
    for tree in enumerate_trees(space):
        if internal_count(tree) < min_internal:
            continue
        yield tree, goodness(space, tree, data)


def goodness_tuples(space: TreeSpace, data: Dataset,
                    min_internal: int = 0) -> set[tuple[int, int]]:
    return {g.as_pair() for _, g in enumerate_goodness(space, data, min_internal)}


def pareto_front(space: TreeSpace, data: Dataset,
                 min_internal: int = 0) -> set[tuple[int, int]]:
    """Maximal goodness tuples: nothing achievable strictly dominates them."""
    points = goodness_tuples(space, data, min_internal)
    front = set()
    for p in points:
        gp = GoodnessTuple(*p)
        if not any(strictly_less(gp, GoodnessTuple(*q)) for q in points):
            front.add(p)
    return front


def front_trees(space: TreeSpace, data: Dataset,
                min_internal: int = 0) -> dict[tuple[int, int], Node]:
    """One witness tree per front point (first found in enumeration order)."""
    front = pareto_front(space, data, min_internal)
    reps: dict[tuple[int, int], Node] = {}
    for tree, g in enumerate_goodness(space, data, min_internal):
        pair = g.as_pair()
        if pair in front and pair not in reps:
            reps[pair] = tree
    return reps


def exists_dominator(space: TreeSpace, data: Dataset, window: Window,
                     min_internal: int = 1) -> Optional[GoodnessTuple]:
    """A goodness tuple inside the window's strict-dominance region, if any."""
    for _, g in enumerate_goodness(space, data, min_internal):
        if window.admits(g):
            return g
    return None


def is_locally_optimal(space: TreeSpace, data: Dataset, g: GoodnessTuple,
                       delta_count: int, delta_e: int,
                       min_internal: int = 1) -> bool:
    """No tree strictly dominates ``g`` while staying within the slacks."""
    window = Window(
        g.correctness,
        g.explainability,
        min(g.correctness + delta_count, data.size),
        min(g.explainability + delta_e, space.max_explainability),
    )
    return exists_dominator(space, data, window, min_internal) is None


def lpo_set(space: TreeSpace, data: Dataset, delta_count: int, delta_e: int,
            min_internal: int = 1) -> set[tuple[int, int]]:
    """All achievable tuples that are locally optimal under the slacks."""
    return {
        p
        for p in goodness_tuples(space, data, min_internal)
        if is_locally_optimal(space, data, GoodnessTuple(*p), delta_count, delta_e,
                              min_internal)
    }


def incomparable_lpo_set(space: TreeSpace, data: Dataset, delta_count: int,
                         delta_e: int, min_internal: int = 1) -> set[tuple[int, int]]:
    """Maximal antichain of the locally optimal tuples.

    The global front is always locally optimal and dominates every other
    achievable tuple, so this equals the front; computing it from the LPO set
    keeps the definition honest.
    """
    lpo = lpo_set(space, data, delta_count, delta_e, min_internal)
    return {
        p
        for p in lpo
        if not any(strictly_less(GoodnessTuple(*p), GoodnessTuple(*q)) for q in lpo)
    }
