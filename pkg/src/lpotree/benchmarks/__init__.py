"""Bundled synthetic benchmarks with frozen datasets and expected fronts.

* ``tiny6``: one binary categorical feature, two labels, budget 1 - the
  smallest interesting space (six trees, four with an internal node).
* ``rand3x2``: three binary categorical features of weight 3, two labels,
  budget 3 - small enough for the brute-force oracle, rich enough to have a
  multi-point front.

Each directory holds ``dataset.csv``, ``config.toml``, and
``expected_front.csv`` (generated by the ``oracle`` subcommand and frozen).
"""

from __future__ import annotations

import os

_HERE = os.path.dirname(__file__)

NAMES = ("tiny6", "rand3x2")


def benchmark_path(name: str, filename: str) -> str:
    if name not in NAMES:
        raise ValueError(f"unknown benchmark {name!r}; available: {NAMES}")
    return os.path.join(_HERE, name, filename)


def config_path(name: str) -> str:
    return benchmark_path(name, "config.toml")


def dataset_path(name: str) -> str:
    return benchmark_path(name, "dataset.csv")


def expected_front_path(name: str) -> str:
    return benchmark_path(name, "expected_front.csv")


def load(name: str):
    """(BenchmarkConfig, Dataset, TreeSpace) for a bundled benchmark."""
    from ..bench import load_config, load_dataset

    config = load_config(config_path(name))
    data, space = load_dataset(dataset_path(name), config)
    return config, data, space
