"""The two-phase pipeline: search, pop order, verification loop, audit log."""

from __future__ import annotations

import pytest

from lpotree import (
    GoodnessTuple,
    PacParams,
    PipelineConfig,
    parse,
    pop_order,
    run,
    slack_to_counts,
)
from lpotree.measures import strictly_less
from lpotree.oracle import incomparable_lpo_set, is_locally_optimal, lpo_set
from lpotree.pipeline import _antichain_insert, _pop_best


def make_config(**overrides) -> PipelineConfig:
    base = dict(t_overall=120.0, iterations=3000, seed=0, solver="builtin")
    base.update(overrides)
    return PipelineConfig(**base)


# ------------------------------------------------------------------ plumbing

def test_slack_to_counts_examples():
    assert slack_to_counts(10 / 435, 435) == 10
    assert slack_to_counts(0.0, 50) == 0
    assert slack_to_counts(1.0, 50) == 50
    assert slack_to_counts(0.025, 20) == 1  # 0.5 rounds up
    with pytest.raises(ValueError):
        slack_to_counts(-0.1, 50)


def test_pop_order_prefers_correctness_then_explainability(space_b1):
    t = parse(space_b1, "f[a,b]")
    items = [(t, GoodnessTuple(5, 10)), (t, GoodnessTuple(6, 9))]
    assert pop_order(items, space_b1)[1] == GoodnessTuple(6, 9)
    items = [(t, GoodnessTuple(5, 10)), (t, GoodnessTuple(5, 12))]
    assert pop_order(items, space_b1)[1] == GoodnessTuple(5, 12)
    assert len(items) == 2  # peeking does not consume


def test_pop_order_breaks_ties_by_tree_text(space_b1):
    g = GoodnessTuple(5, 10)
    items = [
        (parse(space_b1, "f[b,a]"), g),
        (parse(space_b1, "f[a,b]"), g),
    ]
    assert pop_order(items, space_b1)[0] == parse(space_b1, "f[a,b]")


def test_pop_best_removes_its_result(space_b1):
    t = parse(space_b1, "f[a,b]")
    items = [(t, GoodnessTuple(1, 1)), (t, GoodnessTuple(2, 2))]
    popped = _pop_best(items, space_b1)
    assert popped[1] == GoodnessTuple(2, 2)
    assert [g for _, g in items] == [GoodnessTuple(1, 1)]


def test_antichain_insert(space_b1):
    t = parse(space_b1, "f[a,b]")
    items = []
    _antichain_insert(items, (t, GoodnessTuple(5, 5)))
    _antichain_insert(items, (t, GoodnessTuple(4, 7)))  # incomparable, kept
    _antichain_insert(items, (t, GoodnessTuple(4, 5)))  # dominated, dropped
    _antichain_insert(items, (t, GoodnessTuple(6, 6)))  # replaces (5, 5)
    assert {g.as_pair() for _, g in items} == {(4, 7), (6, 6)}


def test_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(t_overall=10.0, t_momcts=20.0)
    with pytest.raises(ValueError):
        PipelineConfig(delta_c=-0.5)
    with pytest.raises(ValueError):
        PipelineConfig(delta_e=-1)
    assert PipelineConfig(t_overall=30.0).phase1_time == 15.0
    assert PipelineConfig(t_overall=30.0, t_momcts=4.0).phase1_time == 4.0


# ------------------------------------------------------------------ full runs

def test_run_verifies_the_exact_front(space_mixed, data_mixed):
    out = run(space_mixed, data_mixed, make_config())
    want = incomparable_lpo_set(space_mixed, data_mixed, out.delta_count, out.delta_e)
    assert out.status == "ok"
    assert out.verified_tuples() == want
    assert out.best_effort == []
    for tree, g in out.verified:
        assert is_locally_optimal(
            space_mixed, data_mixed, g, out.delta_count, out.delta_e
        )


@pytest.mark.parametrize("slacks", [(0.0, 0), (2 / 12, 2), (5 / 12, 5)])
def test_run_verified_set_is_locally_optimal_for_any_slack(space_mixed, data_mixed, slacks):
    delta_c, delta_e = slacks
    out = run(space_mixed, data_mixed, make_config(delta_c=delta_c, delta_e=delta_e))
    assert out.status == "ok"
    assert out.verified_tuples() <= lpo_set(
        space_mixed, data_mixed, out.delta_count, out.delta_e
    )
    assert out.verified_tuples() == incomparable_lpo_set(
        space_mixed, data_mixed, out.delta_count, out.delta_e
    )


def test_default_slacks_come_from_the_dataset(space_mixed, data_mixed):
    out = run(space_mixed, data_mixed, make_config(iterations=50))
    # delta_c defaults to 10/K, so ten samples regardless of K; delta_e to 5
    assert out.delta_count == 10
    assert out.delta_e == 5


def test_small_dataset_triggers_pac_warning(space_mixed, data_mixed):
    out = run(space_mixed, data_mixed, make_config(iterations=50))
    assert any("12 samples" in w and "epsilon" in w for w in out.warnings)


def test_zero_iterations_yield_empty_outputs(space_mixed, data_mixed):
    out = run(space_mixed, data_mixed, make_config(iterations=0))
    assert out.status == "ok"
    assert out.verified == [] and out.best_effort == []
    assert out.audit == [] and out.archive_points == frozenset()


def test_search_only_budget_leaves_archive_unverified(space_mixed, data_mixed):
    cfg = make_config(iterations=None, t_overall=0.4, t_momcts=0.4)
    out = run(space_mixed, data_mixed, cfg)
    assert out.status == "timeout"
    assert out.verified == []
    assert out.best_effort_tuples() == {g.as_pair() for g in out.archive_points}


def test_query_cap_stops_phase_two(space_mixed, data_mixed):
    full = run(space_mixed, data_mixed, make_config())
    total = len(full.audit)
    assert total >= 1
    capped = run(space_mixed, data_mixed, make_config(max_phase2_queries=0))
    assert capped.status == "timeout"
    assert capped.verified == []
    assert len(capped.audit) == 0
    partial = run(space_mixed, data_mixed, make_config(max_phase2_queries=1))
    assert len(partial.audit) == 1
    assert partial.verified_tuples() <= full.verified_tuples()


def test_audit_log_is_replayable(space_mixed, data_mixed):
    out = run(space_mixed, data_mixed, make_config())
    assert [e.query for e in out.audit] == list(range(1, len(out.audit) + 1))
    for entry in out.audit:
        c_lo, e_lo, c_hi, e_hi = entry.window
        assert entry.popped == (c_lo, e_lo)
        assert c_hi <= data_mixed.size
        assert e_hi <= space_mixed.max_explainability
        assert entry.result in ("sat", "unsat")
        assert entry.wall_time >= 0.0
        if entry.result == "sat":
            assert entry.witness is not None
            assert strictly_less(
                GoodnessTuple(*entry.popped), GoodnessTuple(*entry.witness)
            )
            assert entry.witness <= (c_hi, e_hi)
        else:
            assert entry.witness is None
        assert entry.as_dict()["window"] == list(entry.window)
    unsat = [e for e in out.audit if e.result == "unsat"]
    assert len(unsat) >= len(out.verified)


def test_solver_failure_preserves_candidates(space_mixed, data_mixed):
    cfg = make_config(iterations=200, solver="/no/such/solver-binary")
    out = run(space_mixed, data_mixed, cfg)
    assert out.status == "solver_error"
    assert "/no/such/solver-binary" in out.message
    assert out.verified == []
    assert out.best_effort_tuples() == {g.as_pair() for g in out.archive_points}
    assert len(out.audit) == 1 and out.audit[0].result == "error"


def test_runs_are_deterministic(space_mixed, data_mixed):
    a = run(space_mixed, data_mixed, make_config())
    b = run(space_mixed, data_mixed, make_config())
    assert a.verified_tuples() == b.verified_tuples()
    assert a.best_effort_tuples() == b.best_effort_tuples()
    assert [e.popped for e in a.audit] == [e.popped for e in b.audit]


def test_verified_output_is_sorted_and_an_antichain(space_mixed, data_mixed):
    out = run(space_mixed, data_mixed, make_config())
    pairs = [g.as_pair() for _, g in out.verified]
    assert pairs == sorted(pairs, key=lambda p: (-p[0], -p[1]))
    for i, a in enumerate(pairs):
        for b in pairs[i + 1:]:
            ga, gb = GoodnessTuple(*a), GoodnessTuple(*b)
            assert not strictly_less(ga, gb) and not strictly_less(gb, ga)