"""Benchmark plumbing: config files, CSV ingestion, bucketing, output files.

A benchmark is a labeled CSV (the black box's predictions, precomputed) plus
a TOML config declaring the features, their kinds and weights, the label
column, the node budget, and pipeline settings.  Categorical features map
category values to branch indices in first-appearance order; numeric features
are split into three equal-width buckets over a declared or observed range.

Outputs are flat files: ``verified.csv`` / ``best_effort.csv`` (one tree per
row), ``front.csv`` combining both sets for plotting, and ``audit.jsonl``
with one JSON object per SAT query.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from typing import Optional

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

from .measures import Dataset, GoodnessTuple, PacParams
from .pipeline import PipelineConfig, RunOutput
from .trees import FunctionSpec, Node, TreeSpace, parse, serialize


class ConfigError(ValueError):
    """Bad benchmark configuration or dataset; maps to CLI exit code 1."""


def bucketize(value: float, f_min: float, f_max: float) -> int:
    """Which third of [f_min, f_max] the value falls in: 0, 1, or 2."""
    if f_min >= f_max:
        raise ConfigError(f"numeric range is empty: min {f_min} >= max {f_max}")
    third = (f_max - f_min) / 3.0
    if value < f_min + third:
        return 0
    if value < f_min + 2.0 * third:
        return 1
    return 2


@dataclass(frozen=True)
class FeatureDecl:
    name: str
    kind: str  # "categorical" or "numeric"
    weight: int = 1
    f_min: Optional[float] = None
    f_max: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind not in ("categorical", "numeric"):
            raise ConfigError(f"feature {self.name}: unknown kind {self.kind!r}")
        if self.weight < 1:
            raise ConfigError(f"feature {self.name}: weight must be >= 1")


@dataclass
class BenchmarkConfig:
    features: list[FeatureDecl]
    label_column: str
    budget: int
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)
    dataset_path: Optional[str] = None
    output_dir: Optional[str] = None

    def __post_init__(self) -> None:
        if self.budget < 1:
            raise ConfigError("budget must be >= 1")
        if not self.features:
            raise ConfigError("at least one feature is required")


def load_config(path: str) -> BenchmarkConfig:
    try:
        with open(path, "rb") as handle:
            raw = tomllib.load(handle)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path}: {exc}")
    try:
        features = [
            FeatureDecl(
                name=f["name"],
                kind=f.get("kind", "categorical"),
                weight=int(f.get("weight", 1)),
                f_min=f.get("min"),
                f_max=f.get("max"),
            )
            for f in raw.get("feature", [])
        ]
        pl = raw.get("pipeline", {})
        pac = PacParams(float(pl.get("epsilon", 0.25)), float(pl.get("delta", 0.1)))
        pipeline = PipelineConfig(
            t_overall=float(pl.get("t_overall", 60.0)),
            t_momcts=pl.get("t_momcts"),
            delta_c=pl.get("delta_c"),
            delta_e=int(pl.get("delta_e", 5)),
            pac=pac,
            seed=int(pl.get("seed", 0)),
            iterations=pl.get("iterations"),
            solver=raw.get("solver"),
        )
        config = BenchmarkConfig(
            features=features,
            label_column=raw["label"],
            budget=int(raw["budget"]),
            pipeline=pipeline,
            dataset_path=raw.get("dataset"),
            output_dir=raw.get("output_dir"),
        )
    except KeyError as exc:
        raise ConfigError(f"config file {path}: missing key {exc.args[0]!r}")
    return config


def load_dataset(path: str, config: BenchmarkConfig) -> tuple[Dataset, TreeSpace]:
    """Read the CSV and build the matching tree space.

    Rows become tuples of precomputed branch indices (1-based), one per
    declared feature, so function evaluators are plain tuple lookups.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            reader = csv.reader(handle)
            try:
                header = next(reader)
            except StopIteration:
                raise ConfigError(f"dataset {path} is empty")
            rows = [row for row in reader if row]
    except FileNotFoundError:
        raise ConfigError(f"dataset file not found: {path}")
    if not rows:
        raise ConfigError(f"dataset {path} has a header but no rows")
    columns = {name: idx for idx, name in enumerate(header)}
    if config.label_column not in columns:
        raise ConfigError(f"label column {config.label_column!r} not in {header}")
    for feat in config.features:
        if feat.name not in columns:
            raise ConfigError(f"feature column {feat.name!r} not in {header}")

    label_names: list[str] = []
    labels: list[int] = []
    for row in rows:
        value = row[columns[config.label_column]]
        if value not in label_names:
            label_names.append(value)
        labels.append(label_names.index(value))

    functions: list[FunctionSpec] = []
    branch_columns: list[list[int]] = []
    for fi, feat in enumerate(config.features):
        col = [row[columns[feat.name]] for row in rows]
        if feat.kind == "categorical":
            seen: list[str] = []
            for value in col:
                if value not in seen:
                    seen.append(value)
            if len(seen) < 2:
                raise ConfigError(
                    f"categorical feature {feat.name!r} has {len(seen)} distinct "
                    "values; need at least 2"
                )
            branches = [seen.index(value) + 1 for value in col]
            branch_count = len(seen)
        else:
            try:
                nums = [float(value) for value in col]
            except ValueError as exc:
                raise ConfigError(f"numeric feature {feat.name!r}: {exc}")
            f_min = feat.f_min if feat.f_min is not None else min(nums)
            f_max = feat.f_max if feat.f_max is not None else max(nums)
            branches = [bucketize(v, f_min, f_max) + 1 for v in nums]
            branch_count = 3
        branch_columns.append(branches)
        functions.append(
            FunctionSpec(
                name=feat.name,
                branch_count=branch_count,
                weight=feat.weight,
                evaluator=(lambda i: lambda row: row[i])(fi),
            )
        )

    data_rows = tuple(
        tuple(branch_columns[fi][k] for fi in range(len(config.features)))
        for k in range(len(rows))
    )
    space = TreeSpace(
        functions=tuple(functions),
        labels=tuple(label_names),
        budget=config.budget,
    )
    return Dataset(rows=data_rows, labels=tuple(labels)), space


# ----------------------------------------------------------------------
# output files

FRONT_HEADER = ["set", "correctness_fraction", "correctness_count", "explainability", "tree"]


def _front_rows(set_name: str, entries, space: TreeSpace, k: int) -> list[list[str]]:
    rows = []
    for tree, g in entries:
        rows.append([
            set_name,
            f"{g.correctness / k:.6g}",
            str(g.correctness),
            str(g.explainability),
            serialize(space, tree),
        ])
    return rows


def write_outputs(out: RunOutput, space: TreeSpace, data: Dataset, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    k = data.size
    for name, entries in (("verified", out.verified), ("best_effort", out.best_effort)):
        with open(os.path.join(out_dir, f"{name}.csv"), "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(FRONT_HEADER[1:])
            for row in _front_rows(name, entries, space, k):
                writer.writerow(row[1:])
    with open(os.path.join(out_dir, "front.csv"), "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(FRONT_HEADER)
        for row in _front_rows("verified", out.verified, space, k):
            writer.writerow(row)
        for row in _front_rows("best_effort", out.best_effort, space, k):
            writer.writerow(row)
    with open(os.path.join(out_dir, "audit.jsonl"), "w") as handle:
        for entry in out.audit:
            handle.write(json.dumps(entry.as_dict()) + "\n")


def load_front(path: str, space: TreeSpace) -> list[tuple[str, GoodnessTuple, Node]]:
    """Read a front.csv back; inverse of write_outputs for the front file."""
    out = []
    with open(path, "r", newline="") as handle:
        reader = csv.DictReader(handle)
        for row in reader:
            g = GoodnessTuple(int(row["correctness_count"]), int(row["explainability"]))
            out.append((row["set"], g, parse(space, row["tree"])))
    return out


def front_csv_text(out: RunOutput, space: TreeSpace, data: Dataset) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(FRONT_HEADER)
    for row in _front_rows("verified", out.verified, space, data.size):
        writer.writerow(row)
    for row in _front_rows("best_effort", out.best_effort, space, data.size):
        writer.writerow(row)
    return buf.getvalue()
