"""Pareto-optimal decision-tree interpretations of black-box classifiers.

Two-phase anytime synthesis: a multi-objective Monte Carlo tree search over
a grammar of bounded decision trees collects a best-effort Pareto front of
(correctness, explainability) tuples, then a SAT backend certifies each
candidate as locally Pareto-optimal within user-chosen slacks, replacing it
with a strictly better witness whenever one exists.
"""

from .measures import (
    Dataset,
    Dominance,
    GoodnessTuple,
    PacParams,
    achieved_epsilon,
    correctness,
    dominates,
    explainability,
    goodness,
    sample_complexity,
)
from .trees import (
    HOLE,
    FunctionSpec,
    Hole,
    Internal,
    Leaf,
    TreeSpace,
    TreeSyntaxError,
    apply_action,
    count_trees,
    enumerate_trees,
    evaluate,
    hole_count,
    internal_count,
    is_complete,
    parse,
    serialize,
)
from .mdp import ActionRestrictions, MoMdp
from .search import (
    MoMctsSearch,
    ParetoArchive,
    SearchConfig,
    SearchNode,
    hypervolume,
    pick_unexplored,
    run_momcts,
    select_action,
)
from .encoding import (
    CnfInstance,
    EncodingError,
    PhiEncoder,
    VarMap,
    Window,
    build_corr,
    build_dominance,
    build_exp,
    build_phi,
    build_syntax,
    decode,
)
from .solver import (
    SolverResult,
    SolverStatus,
    check_sat,
    emit_dimacs,
    parse_dimacs,
    solve_builtin,
)
from .pipeline import PipelineConfig, RunOutput, pop_order, run, slack_to_counts
from .bench import (
    BenchmarkConfig,
    ConfigError,
    FeatureDecl,
    bucketize,
    load_config,
    load_dataset,
    load_front,
    write_outputs,
)

__version__ = "0.1.0"
