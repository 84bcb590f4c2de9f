"""Command-line interface.

Subcommands:

* ``synth``  - full two-phase run; writes verified.csv, best_effort.csv,
               front.csv, audit.jsonl into the output directory.
* ``oracle`` - brute-force global front (and slack-local-optimality check)
               for small spaces; can write an expected-front file.
* ``encode`` - emit the DIMACS CNF for one window, optionally a variable-name
               sidecar, optionally solve it and report.
* ``mcts``   - phase 1 only; prints the archive, optionally writes front.csv.

Exit codes: 0 success, 1 configuration/usage error, 2 solver failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from typing import Optional

from . import bench
from .encoding import PhiEncoder, Window, sidecar_map
from .measures import GoodnessTuple
from .mdp import MoMdp
from .oracle import front_trees, is_locally_optimal
from .pipeline import RunOutput, run, slack_to_counts
from .search import MoMctsSearch, SearchConfig
from .solver import SolverStatus, check_sat, emit_dimacs
from .trees import serialize


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="benchmark TOML file")
    parser.add_argument("--dataset", help="override the dataset path")
    parser.add_argument("--seed", type=int, help="override the rng seed")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lpotree")
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="run both phases and write outputs")
    _add_common(p_synth)
    p_synth.add_argument("--out", help="output directory (default from config)")
    p_synth.add_argument("--t-overall", type=float, dest="t_overall")
    p_synth.add_argument("--t-momcts", type=float, dest="t_momcts")
    p_synth.add_argument("--delta-c", type=float, dest="delta_c")
    p_synth.add_argument("--delta-e", type=int, dest="delta_e")
    p_synth.add_argument("--iterations", type=int, help="phase-1 iteration budget")
    p_synth.add_argument("--max-queries", type=int, dest="max_queries",
                         help="phase-2 query budget (deterministic cutoff)")
    p_synth.add_argument("--solver", help="solver executable, 'builtin', or 'auto'")

    p_oracle = sub.add_parser("oracle", help="brute-force front for small spaces")
    _add_common(p_oracle)
    p_oracle.add_argument("--out", help="write the front as a front.csv-style file")
    p_oracle.add_argument("--delta-c", type=float, dest="delta_c")
    p_oracle.add_argument("--delta-e", type=int, dest="delta_e")
    p_oracle.add_argument("--include-leaves", action="store_true",
                          help="include bare-leaf trees in the universe")

    p_encode = sub.add_parser("encode", help="emit DIMACS for one window")
    _add_common(p_encode)
    p_encode.add_argument("--window", required=True,
                          help="c_lo,e_lo,c_hi,e_hi (integers)")
    p_encode.add_argument("--out", help="CNF output path (default stdout)")
    p_encode.add_argument("--map", dest="map_path", help="variable-name sidecar path")
    p_encode.add_argument("--solve", action="store_true",
                          help="also run the solver and print the verdict")
    p_encode.add_argument("--solver", help="solver executable, 'builtin', or 'auto'")

    p_mcts = sub.add_parser("mcts", help="run phase 1 only")
    _add_common(p_mcts)
    p_mcts.add_argument("--out", help="write the archive as a front.csv-style file")
    p_mcts.add_argument("--iterations", type=int)
    p_mcts.add_argument("--t-momcts", type=float, dest="t_momcts")

    return parser


def _load(args) -> tuple[bench.BenchmarkConfig, "Dataset", "TreeSpace"]:
    config = bench.load_config(args.config)
    base = os.path.dirname(os.path.abspath(args.config))
    dataset_path = args.dataset or config.dataset_path
    if not dataset_path:
        raise bench.ConfigError("no dataset given (config 'dataset' or --dataset)")
    if not os.path.isabs(dataset_path):
        dataset_path = os.path.join(base, dataset_path)
    data, space = bench.load_dataset(dataset_path, config)
    return config, data, space


def _cmd_synth(args) -> int:
    config, data, space = _load(args)
    pl = config.pipeline
    overrides = {}
    for name in ("t_overall", "t_momcts", "delta_c", "delta_e", "seed", "solver"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if args.iterations is not None:
        overrides["iterations"] = args.iterations
    if args.max_queries is not None:
        overrides["max_phase2_queries"] = args.max_queries
    pl = dataclasses.replace(pl, **overrides)
    out = run(space, data, pl)
    for warning in out.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    out_dir = args.out or config.output_dir or "."
    base = os.path.dirname(os.path.abspath(args.config))
    if not os.path.isabs(out_dir):
        out_dir = os.path.join(base, out_dir) if args.out is None else out_dir
    bench.write_outputs(out, space, data, out_dir)
    print(f"status: {out.status}")
    print(f"verified ({len(out.verified)}):")
    for tree, g in out.verified:
        print(f"  ({g.correctness},{g.explainability})  {serialize(space, tree)}")
    print(f"best-effort ({len(out.best_effort)}):")
    for tree, g in out.best_effort:
        print(f"  ({g.correctness},{g.explainability})  {serialize(space, tree)}")
    print(f"outputs written to {out_dir}")
    if out.status == "solver_error":
        print(f"solver error: {out.message}", file=sys.stderr)
        return 2
    return 0


def _cmd_oracle(args) -> int:
    config, data, space = _load(args)
    min_internal = 0 if args.include_leaves else 1
    reps = front_trees(space, data, min_internal=min_internal)
    points = sorted(reps, key=lambda p: (-p[0], -p[1]))
    print(f"global front over trees with >= {min_internal} internal nodes "
          f"({len(points)} points):")
    for c, e in points:
        print(f"  ({c},{e})  {serialize(space, reps[(c, e)])}")
    if args.delta_c is not None or args.delta_e is not None:
        dc = slack_to_counts(args.delta_c or 0.0, data.size)
        de = args.delta_e or 0
        for c, e in points:
            ok = is_locally_optimal(space, data, GoodnessTuple(c, e), dc, de,
                                    min_internal=min_internal or 1)
            print(f"  LPO({dc},{de}) ({c},{e}): {'yes' if ok else 'no'}")
    if args.out:
        import csv

        with open(args.out, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(bench.FRONT_HEADER)
            for c, e in points:
                writer.writerow([
                    "verified", f"{c / data.size:.6g}", str(c), str(e),
                    serialize(space, reps[(c, e)]),
                ])
        print(f"front written to {args.out}")
    return 0


def _cmd_encode(args) -> int:
    config, data, space = _load(args)
    try:
        parts = [int(x) for x in args.window.split(",")]
        if len(parts) != 4:
            raise ValueError
    except ValueError:
        raise bench.ConfigError(f"--window must be c_lo,e_lo,c_hi,e_hi, got {args.window!r}")
    try:
        window = Window(*parts)
    except ValueError as exc:
        raise bench.ConfigError(str(exc))
    encoder = PhiEncoder(space, data)
    instance = encoder.instance(window)
    payload = emit_dimacs(instance)
    if args.out:
        with open(args.out, "wb") as handle:
            handle.write(payload)
        print(f"wrote {instance.num_vars} vars, {len(instance.clauses)} clauses "
              f"to {args.out}")
    else:
        sys.stdout.write(payload.decode("ascii"))
    if args.map_path:
        with open(args.map_path, "w") as handle:
            handle.write(sidecar_map(encoder.varmap, space))
    if args.solve:
        result = check_sat(instance, solver=args.solver)
        if result.status is SolverStatus.ERROR:
            print(f"solver error: {result.message}", file=sys.stderr)
            return 2
        print(f"result: {result.status.value}")
    return 0


def _cmd_mcts(args) -> int:
    config, data, space = _load(args)
    pl = config.pipeline
    seed = args.seed if args.seed is not None else pl.seed
    iterations = args.iterations if args.iterations is not None else pl.iterations
    t_budget = args.t_momcts if args.t_momcts is not None else pl.phase1_time
    search_cfg = dataclasses.replace(pl.search, seed=seed, iterations=iterations)
    searcher = MoMctsSearch(MoMdp(space, data, pl.restrictions), search_cfg)
    archive = searcher.run(deadline=None if iterations is not None else t_budget)
    print(f"archive after {searcher.iterations_run} iterations "
          f"({len(archive)} points):")
    for g, tree in archive.entries():
        print(f"  ({g.correctness},{g.explainability})  {serialize(space, tree)}")
    if args.out:
        import csv

        with open(args.out, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(bench.FRONT_HEADER)
            for g, tree in archive.entries():
                writer.writerow([
                    "best_effort", f"{g.correctness / data.size:.6g}",
                    str(g.correctness), str(g.explainability),
                    serialize(space, tree),
                ])
    return 0


def run_cli(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; that is a configuration problem
        return 0 if exc.code == 0 else 1
    handlers = {
        "synth": _cmd_synth,
        "oracle": _cmd_oracle,
        "encode": _cmd_encode,
        "mcts": _cmd_mcts,
    }
    try:
        return handlers[args.command](args)
    except bench.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":  # pragma: no cover
    main()
