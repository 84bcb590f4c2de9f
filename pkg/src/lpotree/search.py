"""Multi-objective Monte Carlo tree search over the tree-building MDP.

One search iteration descends the explored tree, optionally expands one new
child (progressive widening caps expanded children at ceil(k * visits^alpha)),
runs a uniformly random rollout to a complete tree, and backs the scaled
reward vector up the path.  Every complete tree seen, whether as a rollout
terminal or an expanded terminal node, is offered to a Pareto archive that
only ever improves: an insert either extends the front or replaces strictly
dominated entries, so the set of dominated points grows monotonically.

Child selection is hypervolume-guided: each expanded child is scored by how
much its optimistic value estimate (per-component UCB) would enlarge the
archive's hypervolume, minus how far its direction deviates from the nearest
archive point's direction (perspective projection onto the unit sphere).
Unexplored actions are ranked by an all-moves-as-first (RAVE) table.

Rewards are scaled inside the search so both axes live in [0, 1]
(correctness / K and explainability / (B * (W + 1))); the archive keeps the
raw integer tuples.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, TextIO

from .mdp import MoMdp
from .measures import GoodnessTuple, leq, strictly_less
from .trees import Action, Node


def hypervolume(points: Iterable[tuple[float, float]], ref: tuple[float, float]) -> float:
    """Area dominated by ``points`` above ``ref``: union of rectangles [ref, p].

    Exact 2-d sweep: sort by x descending and accumulate vertical slabs.
    """
    pts = list(points)
    for p in pts:
        if p[0] < ref[0] or p[1] < ref[1]:
            raise ValueError(f"point {p} lies below reference {ref}")
    pts.sort(key=lambda p: (-p[0], -p[1]))
    area = 0.0
    y_seen = ref[1]
    for x, y in pts:
        if y > y_seen:
            area += (x - ref[0]) * (y - y_seen)
            y_seen = y
    return area


def _persp(v: tuple[float, float]) -> tuple[float, float]:
    # perspective projection onto the unit sphere; the zero vector is fixed
    n = math.hypot(v[0], v[1])
    if n == 0.0:
        return v
    return (v[0] / n, v[1] / n)


def _dist(a: tuple[float, float], b: tuple[float, float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


class ParetoArchive:
    """Antichain of (goodness, tree); inserts never shrink the dominated region."""

    def __init__(self) -> None:
        self._entries: dict[GoodnessTuple, Node] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self.entries())

    def insert(self, tree: Node, g: GoodnessTuple) -> bool:
        """True iff the archive changed; equal tuples keep the incumbent tree."""
        if any(leq(g, have) for have in self._entries):
            return False
        beaten = [have for have in self._entries if strictly_less(have, g)]
        for have in beaten:
            del self._entries[have]
        self._entries[g] = tree
        return True

    def tuples(self) -> frozenset[GoodnessTuple]:
        return frozenset(self._entries)

    def points(self) -> list[tuple[int, int]]:
        return [g.as_pair() for g in self._entries]

    def tree_for(self, g: GoodnessTuple) -> Node:
        return self._entries[g]

    def entries(self) -> list[tuple[GoodnessTuple, Node]]:
        """Best-correctness first; deterministic order for output and popping."""
        return sorted(
            self._entries.items(),
            key=lambda kv: (-kv[0].correctness, -kv[0].explainability),
        )

    def copy(self) -> "ParetoArchive":
        dup = ParetoArchive()
        dup._entries = dict(self._entries)
        return dup


@dataclass
class SearchConfig:
    exploration: float = math.sqrt(2.0)
    pw_k: float = 1.0
    pw_alpha: float = 0.5
    rave_bias: float = 1.0
    ref_point: tuple[float, float] = (0.0, 0.0)
    seed: int = 0
    iterations: Optional[int] = None
    # "archive": penalize distance to the nearest archive point's direction;
    # "self": penalize the norm of the UCB's own projection instead.
    projection_penalty: str = "archive"

    def __post_init__(self) -> None:
        if self.exploration <= 0 or self.pw_k <= 0:
            raise ValueError("exploration and pw_k must be positive")
        if not 0.0 < self.pw_alpha < 1.0:
            raise ValueError("pw_alpha must be in (0, 1)")
        if self.projection_penalty not in ("archive", "self"):
            raise ValueError("projection_penalty must be 'archive' or 'self'")


class _EdgeStats:
    __slots__ = ("visits", "sum_c", "sum_e")

    def __init__(self) -> None:
        self.visits = 0
        self.sum_c = 0.0
        self.sum_e = 0.0

    def add(self, reward: tuple[float, float]) -> None:
        self.visits += 1
        self.sum_c += reward[0]
        self.sum_e += reward[1]

    @property
    def mean(self) -> tuple[float, float]:
        if self.visits == 0:
            return (0.0, 0.0)
        return (self.sum_c / self.visits, self.sum_e / self.visits)


class SearchNode:
    __slots__ = ("state", "visits", "actions", "untried", "children", "edges", "rave")

    def __init__(self, state: Node, actions: Sequence[Action]):
        self.state = state
        self.visits = 0
        self.actions = list(actions)
        self.untried = list(actions)
        self.children: dict[Action, SearchNode] = {}
        self.edges: dict[Action, _EdgeStats] = {}
        self.rave: dict[Action, _EdgeStats] = {}

    @property
    def expanded(self) -> list[Action]:
        return [a for a in self.actions if a in self.children]


def select_action(node: SearchNode, archive_points: Sequence[tuple[float, float]],
                  config: SearchConfig) -> Action:
    """Best expanded child by hypervolume gain minus directional deviation."""
    if not node.children:
        raise ValueError("select_action needs at least one expanded child")
    log_parent = math.log(max(node.visits, 1))
    best: Optional[Action] = None
    best_score = -math.inf
    for a in node.actions:
        edge = node.edges.get(a)
        if edge is None or edge.visits == 0:
            continue
        bonus = config.exploration * math.sqrt(log_parent / edge.visits)
        mean = edge.mean
        ucb = (mean[0] + bonus, mean[1] + bonus)
        hv = hypervolume(list(archive_points) + [ucb], config.ref_point)
        if config.projection_penalty == "self":
            penalty = math.hypot(*_persp(ucb))
        elif archive_points:
            nearest = min(archive_points, key=lambda p: _dist(p, ucb))
            penalty = _dist(_persp(ucb), _persp(nearest))
        else:
            penalty = 0.0
        score = hv - penalty
        if score > best_score:
            best_score = score
            best = a
    assert best is not None
    return best


def pick_unexplored(node: SearchNode, config: SearchConfig) -> Action:
    """Next action to expand: RAVE-less actions first, then the RAVE vector
    farthest from its own unit-sphere projection; ties by action order."""
    if not node.untried:
        raise ValueError("no unexplored actions")
    best: Optional[Action] = None
    best_score = -math.inf
    for a in node.untried:
        stats = node.rave.get(a)
        if stats is None or stats.visits == 0:
            return a
        r = stats.mean
        score = _dist(_persp(r), r)
        if score > best_score:
            best_score = score
            best = a
    assert best is not None
    return best


def widening_allows(node: SearchNode, config: SearchConfig) -> bool:
    expanded = len(node.children)
    if expanded == 0:
        return True  # a fresh node may always expand its first child
    return expanded < math.ceil(config.pw_k * node.visits**config.pw_alpha)


class MoMctsSearch:
    """Owns the search tree, archive, and rng for one run."""

    def __init__(self, mdp: MoMdp, config: SearchConfig):
        self.mdp = mdp
        self.config = config
        self.rng = random.Random(config.seed)
        self.archive = ParetoArchive()
        self.root = SearchNode(mdp.initial_state, mdp.legal_actions(mdp.initial_state))
        space = mdp.space
        self._scale_c = 1.0 / mdp.data.size
        self._scale_e = 1.0 / (space.budget * (space.max_weight + 1))
        self.iterations_run = 0

    def _scaled(self, g: GoodnessTuple) -> tuple[float, float]:
        return (g.correctness * self._scale_c, g.explainability * self._scale_e)

    def rollout(self, state: Node) -> tuple[Node, GoodnessTuple, list[Action]]:
        """Uniform random completion of ``state``; returns actions for RAVE."""
        taken: list[Action] = []
        while not self.mdp.is_terminal(state):
            a = self.rng.choice(self.mdp.legal_actions(state))
            taken.append(a)
            state, _ = self.mdp.step(state, a)
        return state, self.mdp.goodness(state), taken

    def _iterate(self, trace: Optional[TextIO], iteration: int) -> None:
        node = self.root
        path: list[tuple[SearchNode, Action]] = []
        visited: list[SearchNode] = [node]
        while not self.mdp.is_terminal(node.state):
            if node.untried and widening_allows(node, self.config):
                a = pick_unexplored(node, self.config)
                node.untried.remove(a)
                state, _ = self.mdp.step(node.state, a)
                child = SearchNode(state, self.mdp.legal_actions(state))
                node.children[a] = child
                node.edges[a] = _EdgeStats()
                path.append((node, a))
                node = child
                visited.append(node)
                break
            archive_scaled = [self._scaled(g) for g in self.archive.tuples()]
            a = select_action(node, archive_scaled, self.config)
            path.append((node, a))
            node = node.children[a]
            visited.append(node)

        terminal, g, rollout_actions = self.rollout(node.state)
        self.archive.insert(terminal, g)
        reward = self._scaled(g)

        # backup: edge stats along the path, visits everywhere, RAVE with
        # every action taken at or below each node (all-moves-as-first)
        path_actions = [a for _, a in path]
        for i, seen in enumerate(visited):
            seen.visits += 1
            below = path_actions[i:] + rollout_actions
            for a in set(below):
                stats = seen.rave.get(a)
                if stats is None:
                    stats = seen.rave[a] = _EdgeStats()
                stats.add(reward)
        for parent, a in path:
            parent.edges[a].add(reward)

        if trace is not None:
            moves = ";".join(f"{i},{j}" for i, j in path_actions + rollout_actions)
            trace.write(f"{iteration}\t{moves}\t{g.correctness},{g.explainability}\n")

    def run(
        self,
        deadline: Optional[float] = None,
        snapshot_every: Optional[int] = None,
        trace: Optional[TextIO] = None,
    ) -> ParetoArchive:
        """Runs until the iteration budget and/or wall-clock deadline (seconds)
        is exhausted; anytime, so the archive is valid whenever it stops."""
        budget = self.config.iterations
        if budget is None and deadline is None:
            raise ValueError("need an iteration budget or a deadline")
        self.snapshots: list[tuple[int, frozenset[GoodnessTuple]]] = []
        t_end = None if deadline is None else time.monotonic() + deadline
        while True:
            if budget is not None and self.iterations_run >= budget:
                break
            if t_end is not None and time.monotonic() >= t_end:
                break
            self._iterate(trace, self.iterations_run)
            self.iterations_run += 1
            if snapshot_every and self.iterations_run % snapshot_every == 0:
                self.snapshots.append((self.iterations_run, self.archive.tuples()))
        return self.archive


def run_momcts(
    mdp: MoMdp,
    config: SearchConfig,
    deadline: Optional[float] = None,
    trace: Optional[TextIO] = None,
) -> ParetoArchive:
    return MoMctsSearch(mdp, config).run(deadline=deadline, trace=trace)
