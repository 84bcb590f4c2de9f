"""Shared fixtures: small spaces, deterministic datasets, random generators."""

from __future__ import annotations

import random

import pytest

from lpotree import Dataset, FunctionSpec, TreeSpace


def field_fn(index: int, name: str, branch_count: int, weight: int) -> FunctionSpec:
    """Function reading a precomputed 1-based branch index out of a row tuple."""
    return FunctionSpec(name, branch_count, weight, lambda row, i=index: row[i])


@pytest.fixture
def space_b1():
    """One binary function, two labels, budget 1: six trees total."""
    return TreeSpace((field_fn(0, "f", 2, 1),), ("a", "b"), 1)


@pytest.fixture
def space_b2():
    """Same vocabulary, budget 2: 22 trees total."""
    return TreeSpace((field_fn(0, "f", 2, 1),), ("a", "b"), 2)


@pytest.fixture
def space_mixed():
    """Two functions with different arities and weights, budget 2."""
    return TreeSpace(
        (field_fn(0, "p", 2, 1), field_fn(1, "q", 3, 2)), ("x", "y"), 2
    )


@pytest.fixture
def data_b1():
    """20 samples over one binary field; branch 1 mostly label 0."""
    rng = random.Random(3)
    rows = tuple((rng.randint(1, 2),) for _ in range(20))
    labels = tuple(
        (0 if row[0] == 1 else 1) if rng.random() < 0.8 else rng.randint(0, 1)
        for row in rows
    )
    return Dataset(rows, labels)


@pytest.fixture
def data_mixed():
    rng = random.Random(7)
    rows = tuple((rng.randint(1, 2), rng.randint(1, 3)) for _ in range(12))
    labels = tuple(rng.randint(0, 1) for _ in range(12))
    return Dataset(rows, labels)


def random_tiny_instance(rng: random.Random) -> tuple[TreeSpace, Dataset]:
    """A random space with B <= 2, |F| <= 3, arities <= 3, |L| <= 3, K <= 32."""
    n_f = rng.randint(1, 3)
    n_l = rng.randint(2, 3)
    budget = rng.randint(1, 2)
    functions = tuple(
        field_fn(i, f"g{i}", rng.randint(2, 3), rng.randint(1, 4)) for i in range(n_f)
    )
    space = TreeSpace(functions, tuple(f"l{j}" for j in range(n_l)), budget)
    k = rng.randint(4, 32)
    rows = tuple(
        tuple(rng.randint(1, fn.branch_count) for fn in functions) for _ in range(k)
    )
    labels = tuple(rng.randint(0, n_l - 1) for _ in range(k))
    return space, Dataset(rows, labels)
