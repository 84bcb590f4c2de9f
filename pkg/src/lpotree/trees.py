"""Decision trees over a finite vocabulary of branching functions and labels.

A tree space fixes the vocabulary: a list of branching functions (each with a
fixed arity >= 2, an integer weight >= 1, and an evaluator mapping an input row
to a 1-based branch index), a list of class labels, and a budget B on the
number of internal nodes.  Trees are immutable: internal nodes apply a function
and dispatch on its branch value, leaves return a label, and holes mark unfilled
positions in partial trees.  Partial trees are grown hole-by-hole with
``apply_action``; holes are numbered in depth-first, left-to-right order.

The textual form round-trips through ``parse``/``serialize``:
``f[g[a,b],c]`` with ``N`` for a hole.  Every tree with at most B internal
nodes can be listed (``enumerate_trees``) or counted (``count_trees``) without
materializing duplicates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence, Union


@dataclass(frozen=True)
class FunctionSpec:
    """A branching function: name, arity, explainability weight, evaluator."""

    name: str
    branch_count: int
    weight: int
    evaluator: Callable[[object], int] = field(compare=False)

    def __post_init__(self) -> None:
        if self.branch_count < 2:
            raise ValueError(f"branch_count must be >= 2, got {self.branch_count}")
        if self.weight < 1:
            raise ValueError(f"weight must be >= 1, got {self.weight}")

    def branch(self, row: object) -> int:
        c = self.evaluator(row)
        if not 1 <= c <= self.branch_count:
            raise ValueError(
                f"{self.name} returned branch {c}, expected 1..{self.branch_count}"
            )
        return c


@dataclass(frozen=True)
class TreeSpace:
    """Vocabulary and budget shared by every tree in one synthesis problem."""

    functions: tuple[FunctionSpec, ...]
    labels: tuple[str, ...]
    budget: int

    def __post_init__(self) -> None:
        if not self.functions:
            raise ValueError("need at least one branching function")
        if not self.labels:
            raise ValueError("need at least one label")
        if self.budget < 0:
            raise ValueError(f"budget must be >= 0, got {self.budget}")
        names = [f.name for f in self.functions]
        if len(set(names)) != len(names) or len(set(self.labels)) != len(self.labels):
            raise ValueError("function and label names must be unique")
        if set(names) & set(self.labels):
            raise ValueError("function and label names must not collide")

    @property
    def max_weight(self) -> int:
        return max(f.weight for f in self.functions)

    @property
    def max_branches(self) -> int:
        return max(f.branch_count for f in self.functions)

    @property
    def max_explainability(self) -> int:
        # every node unused: B * (W + 1)
        return self.budget * (self.max_weight + 1)

    def label_index(self, name: str) -> int:
        return self.labels.index(name)


@dataclass(frozen=True)
class Leaf:
    label: int


@dataclass(frozen=True)
class Internal:
    function: int
    children: tuple["Node", ...]


@dataclass(frozen=True)
class Hole:
    pass


Node = Union[Leaf, Internal, Hole]
HOLE = Hole()

# An action (i, j): fill the i-th hole (1-based, depth-first order) with
# production j, where j in 1..|F| picks a function and j in |F|+1..|F|+|L|
# picks a label.
Action = tuple[int, int]


def is_complete(tree: Node) -> bool:
    if isinstance(tree, Hole):
        return False
    if isinstance(tree, Leaf):
        return True
    return all(is_complete(c) for c in tree.children)


def hole_count(tree: Node) -> int:
    if isinstance(tree, Hole):
        return 1
    if isinstance(tree, Leaf):
        return 0
    return sum(hole_count(c) for c in tree.children)


def internal_count(tree: Node) -> int:
    if isinstance(tree, Internal):
        return 1 + sum(internal_count(c) for c in tree.children)
    return 0


def evaluate(space: TreeSpace, tree: Node, row: object) -> int:
    """Label index the tree assigns to ``row``.  The tree must be complete."""
    node = tree
    while True:
        if isinstance(node, Hole):
            raise ValueError("cannot evaluate a partial tree")
        if isinstance(node, Leaf):
            return node.label
        fn = space.functions[node.function]
        node = node.children[fn.branch(row) - 1]


def num_productions(space: TreeSpace) -> int:
    return len(space.functions) + len(space.labels)


def production_of(space: TreeSpace, j: int) -> Node:
    """Fresh subtree for production index j (1-based over functions then labels)."""
    nf = len(space.functions)
    if 1 <= j <= nf:
        return Internal(j - 1, (HOLE,) * space.functions[j - 1].branch_count)
    if nf < j <= nf + len(space.labels):
        return Leaf(j - nf - 1)
    raise ValueError(f"production index {j} out of range 1..{nf + len(space.labels)}")


def apply_action(space: TreeSpace, state: Node, action: Action) -> Node:
    """Fill the i-th hole with production j; a too-large i is a no-op (self-loop)."""
    i, j = action
    if i < 1:
        raise ValueError(f"hole index must be >= 1, got {i}")
    replacement = production_of(space, j)  # validates j even on self-loops
    if i > hole_count(state):
        return state

    def fill(node: Node, skip: int) -> tuple[Node, int]:
        # skip = holes still to pass over before the target; returns (node', skip')
        if isinstance(node, Hole):
            if skip == 0:
                return replacement, -1
            return node, skip - 1
        if isinstance(node, Leaf):
            return node, skip
        children = list(node.children)
        for idx, child in enumerate(children):
            child2, skip = fill(child, skip)
            if skip == -1:
                children[idx] = child2
                return Internal(node.function, tuple(children)), -1
        return node, skip

    filled, _ = fill(state, i - 1)
    return filled


def serialize(space: TreeSpace, tree: Node) -> str:
    if isinstance(tree, Hole):
        return "N"
    if isinstance(tree, Leaf):
        return space.labels[tree.label]
    fn = space.functions[tree.function]
    inner = ",".join(serialize(space, c) for c in tree.children)
    return f"{fn.name}[{inner}]"


class TreeSyntaxError(ValueError):
    """Parse failure with the 0-based offset where it was detected."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


def parse(space: TreeSpace, text: str) -> Node:
    """Inverse of ``serialize``; whitespace around tokens is tolerated."""
    fn_by_name = {f.name: i for i, f in enumerate(space.functions)}
    label_by_name = {name: i for i, name in enumerate(space.labels)}
    pos = 0

    def skip_ws() -> None:
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def parse_name() -> str:
        nonlocal pos
        start = pos
        while pos < len(text) and text[pos] not in "[],":
            pos += 1
        name = text[start:pos].strip()
        if not name:
            raise TreeSyntaxError("expected a function, label, or N", start)
        return name

    def parse_node() -> Node:
        nonlocal pos
        skip_ws()
        start = pos
        name = parse_name()
        skip_ws()
        if pos < len(text) and text[pos] == "[":
            if name not in fn_by_name:
                raise TreeSyntaxError(f"unknown function {name!r}", start)
            fi = fn_by_name[name]
            arity = space.functions[fi].branch_count
            pos += 1
            children = [parse_node()]
            skip_ws()
            while pos < len(text) and text[pos] == ",":
                pos += 1
                children.append(parse_node())
                skip_ws()
            if pos >= len(text) or text[pos] != "]":
                raise TreeSyntaxError("expected ',' or ']'", pos)
            pos += 1
            if len(children) != arity:
                raise TreeSyntaxError(
                    f"{name} takes {arity} children, got {len(children)}", start
                )
            return Internal(fi, tuple(children))
        if name == "N":
            return HOLE
        if name in label_by_name:
            return Leaf(label_by_name[name])
        if name in fn_by_name:
            raise TreeSyntaxError(f"function {name!r} needs a bracketed child list", start)
        raise TreeSyntaxError(f"unknown symbol {name!r}", start)

    root = parse_node()
    skip_ws()
    if pos != len(text):
        raise TreeSyntaxError("trailing input after tree", pos)
    return root


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Weak compositions of ``total`` into ``parts`` nonnegative ints."""
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def enumerate_trees(space: TreeSpace) -> Iterator[Node]:
    """Every complete tree with at most ``space.budget`` internal nodes, once.

    Grouping by exact internal-node count makes each tree appear under exactly
    one decomposition, so no dedup pass is needed.
    """
    by_count: list[list[Node]] = [[Leaf(i) for i in range(len(space.labels))]]
    yield from by_count[0]
    for n in range(1, space.budget + 1):
        level: list[Node] = []
        for fi, fn in enumerate(space.functions):
            for comp in _compositions(n - 1, fn.branch_count):
                pools = [by_count[c] for c in comp]
                for children in itertools.product(*pools):
                    level.append(Internal(fi, children))
        by_count.append(level)
        yield from level


def count_trees(space: TreeSpace) -> int:
    """len(list(enumerate_trees(space))) without building the trees."""
    by_count = [len(space.labels)]
    for n in range(1, space.budget + 1):
        total = 0
        for fn in space.functions:
            for comp in _compositions(n - 1, fn.branch_count):
                prod = 1
                for c in comp:
                    prod *= by_count[c]
                total += prod
        by_count.append(total)
    return sum(by_count)
