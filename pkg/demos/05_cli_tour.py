"""
A tour of the command line
==========================

Everything the library does is reachable from the ``lpotree`` entry point
(or ``python -m lpotree.cli``).  This script drives ``run_cli`` in-process
with the same argv a shell invocation would pass, against the bundled
``tiny6`` benchmark, writing into a scratch directory.
"""

import os
import tempfile

from lpotree.benchmarks import config_path
from lpotree.cli import run_cli

CONFIG = config_path("tiny6")


def invoke(*argv: str) -> None:
    print(f"\n$ lpotree {' '.join(argv)}")
    code = run_cli(list(argv))
    print(f"[exit {code}]")


with tempfile.TemporaryDirectory() as tmp:
    # The space has six trees, so the exact front is one oracle call away;
    # the same subcommand generated the bundled expected_front.csv files.
    invoke("oracle", "--config", CONFIG, "--delta-c", "0.1", "--delta-e", "1")

    # Phase 1 alone: the search archive, without certification.
    invoke("mcts", "--config", CONFIG, "--iterations", "300", "--seed", "7")

    # The full two-phase run; front.csv/verified.csv/audit.jsonl land in tmp.
    invoke("synth", "--config", CONFIG, "--iterations", "300",
           "--out", os.path.join(tmp, "run"))
    print("outputs:", sorted(os.listdir(os.path.join(tmp, "run"))))

    # One window as raw DIMACS, solved on the spot.  (15,1) is the front
    # point, so nothing in the window beats it: unsat.
    cnf = os.path.join(tmp, "window.cnf")
    invoke("encode", "--config", CONFIG, "--window", "15,1,20,2",
           "--out", cnf, "--map", cnf + ".map", "--solve")
    with open(cnf) as handle:
        print("header:", handle.readline().strip())

    # Usage errors exit 1 rather than raising.
    invoke("oracle", "--config", os.path.join(tmp, "missing.toml"))
