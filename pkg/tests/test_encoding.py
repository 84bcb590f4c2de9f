"""CNF encoding of the goodness window query, checked against brute force."""

from __future__ import annotations

import pytest

from lpotree import (
    Dataset,
    EncodingError,
    GoodnessTuple,
    PhiEncoder,
    SolverStatus,
    Window,
    build_corr,
    build_dominance,
    build_exp,
    build_phi,
    build_syntax,
    check_sat,
    emit_dimacs,
    goodness,
    internal_count,
    is_complete,
)
from lpotree.encoding import decode_instance, sidecar_map
from lpotree.oracle import exists_dominator, goodness_tuples


def solve(instance):
    return check_sat(instance, solver="builtin")


def full_window(space, data):
    return Window(0, 0, data.size, space.max_explainability)


# ------------------------------------------------------------------- windows

def test_window_rejects_empty_and_negative():
    with pytest.raises(ValueError):
        Window(5, 0, 4, 10)
    with pytest.raises(ValueError):
        Window(0, -1, 4, 10)


def test_window_validate_checks_caps(space_b1, data_b1):
    Window(0, 0, 20, 2).validate(space_b1, data_b1)
    with pytest.raises(ValueError):
        Window(0, 0, 21, 2).validate(space_b1, data_b1)
    with pytest.raises(ValueError):
        Window(0, 0, 20, 3).validate(space_b1, data_b1)


def test_window_admits_strict_dominance_under_caps():
    w = Window(5, 10, 8, 12)
    assert w.admits(GoodnessTuple(6, 11))
    assert w.admits(GoodnessTuple(5, 11))  # one axis may stay put
    assert w.admits(GoodnessTuple(6, 10))
    assert not w.admits(GoodnessTuple(5, 10))  # the corner itself
    assert not w.admits(GoodnessTuple(9, 12))  # beyond the cap
    assert not w.admits(GoodnessTuple(4, 12))  # worse on one axis


# ------------------------------------------------- models <-> trees (budget 1)

def pin(g: tuple[int, int], space, data) -> Window:
    """Window admitting exactly the tuple ``g``; needs one positive axis."""
    c, e = g
    if c >= 1:
        return Window(c - 1, e, c, e)
    return Window(c, e - 1, c, e)


def test_every_achievable_tuple_has_a_model(space_b1, data_b1):
    enc = PhiEncoder(space_b1, data_b1)
    achievable = goodness_tuples(space_b1, data_b1, min_internal=1)
    assert achievable  # 4 trees of shape f[.,.]
    for g in achievable:
        result = solve(enc.instance(pin(g, space_b1, data_b1)))
        assert result.status is SolverStatus.SAT
        tree, decoded = decode_instance(result.assignment, enc.instance(pin(g, space_b1, data_b1)))
        assert decoded.as_pair() == g
        assert is_complete(tree) and internal_count(tree) >= 1


def test_unachievable_tuples_have_no_model(space_b1, data_b1):
    enc = PhiEncoder(space_b1, data_b1)
    achievable = goodness_tuples(space_b1, data_b1, min_internal=1)
    for c in range(data_b1.size + 1):
        for e in range(1, space_b1.max_explainability + 1):
            if (c, e) in achievable:
                continue
            result = solve(enc.instance(pin((c, e), space_b1, data_b1)))
            assert result.status is SolverStatus.UNSAT, (c, e)


def test_decoded_tree_achieves_its_goodness(space_mixed, data_mixed):
    instance = build_phi(space_mixed, data_mixed, full_window(space_mixed, data_mixed))
    result = solve(instance)
    assert result.status is SolverStatus.SAT
    tree, g = decode_instance(result.assignment, instance)
    assert goodness(space_mixed, tree, data_mixed) == g
    assert instance.window.admits(g)


# ------------------------------------------------------------- edge windows

def test_impossible_correctness_bound_yields_empty_clause(space_b1, data_b1):
    clauses = build_corr(space_b1, data_b1, data_b1.size + 1, data_b1.size + 1)
    assert () in clauses


def test_max_explainability_needs_a_bare_leaf_and_is_unsat(space_b1, data_b1):
    # e = B * (W + 1) means zero internal nodes, which slot 1 rules out
    emax = space_b1.max_explainability
    for c in range(data_b1.size + 1):
        instance = build_phi(space_b1, data_b1, pin((c, emax), space_b1, data_b1))
        assert solve(instance).status is SolverStatus.UNSAT, c


def test_corner_of_the_goodness_box_is_unsat(space_b1, data_b1):
    emax = space_b1.max_explainability
    instance = build_phi(
        space_b1, data_b1, Window(data_b1.size, emax, data_b1.size, emax)
    )
    # nothing strictly dominates the box corner inside the box
    assert () in instance.clauses
    assert solve(instance).status is SolverStatus.UNSAT


def test_full_window_is_sat(space_b1, data_b1):
    assert solve(build_phi(space_b1, data_b1, full_window(space_b1, data_b1))).status is SolverStatus.SAT


# ------------------------------------------------- agreement with brute force

@pytest.mark.parametrize("caps", [(0, 0), (1, 1), (2, 5)])
def test_window_grid_matches_oracle(space_mixed, data_mixed, caps):
    dc, de = caps
    enc = PhiEncoder(space_mixed, data_mixed)
    k, emax = data_mixed.size, space_mixed.max_explainability
    cs = sorted({c for c, _ in goodness_tuples(space_mixed, data_mixed)} | {0, k})
    es = sorted({e for _, e in goodness_tuples(space_mixed, data_mixed)} | {0, emax})
    for c_lo in cs:
        for e_lo in es:
            window = Window(c_lo, e_lo, min(c_lo + dc, k), min(e_lo + de, emax))
            verdict = solve(enc.instance(window)).status
            expected = exists_dominator(space_mixed, data_mixed, window)
            if expected is None:
                assert verdict is SolverStatus.UNSAT, window
            else:
                assert verdict is SolverStatus.SAT, window


# -------------------------------------------------------- layout and plumbing

def test_variable_layout_sizes(space_mixed, data_mixed):
    enc = PhiEncoder(space_mixed, data_mixed)
    enc.base_clauses()
    vm = enc.varmap
    b, k = space_mixed.budget, data_mixed.size
    nf, nl = len(space_mixed.functions), len(space_mixed.labels)
    assert len(vm.lam) == b * nf
    assert len(vm.m) == b * k
    assert len(vm.u) == b and len(vm.ubar) == b
    assert len(vm.lam_used) == b * nf
    n_targets = lambda i: (b - i) + nl
    assert len(vm.tau) == sum(
        space_mixed.max_branches * n_targets(i) for i in range(1, b + 1)
    )
    assert vm.count >= len(vm.lam) + len(vm.tau) + len(vm.m) + 2 * b


def test_same_inputs_give_identical_dimacs(space_mixed, data_mixed):
    w = Window(3, 1, 9, 6)
    a = emit_dimacs(PhiEncoder(space_mixed, data_mixed).instance(w))
    b = emit_dimacs(PhiEncoder(space_mixed, data_mixed).instance(w))
    assert a == b
    c = emit_dimacs(PhiEncoder(space_mixed, data_mixed).instance(Window(3, 1, 9, 5)))
    assert a != c


def test_instance_is_reusable_across_windows(space_b1, data_b1):
    enc = PhiEncoder(space_b1, data_b1)
    first = enc.instance(full_window(space_b1, data_b1))
    pinned = enc.instance(pin((15, 1), space_b1, data_b1))
    again = enc.instance(full_window(space_b1, data_b1))
    assert first.clauses == again.clauses
    assert first.num_vars == pinned.num_vars  # windows add clauses, not vars


def test_build_syntax_alone_is_satisfiable(space_mixed):
    clauses, varmap = build_syntax(space_mixed)
    assert clauses and varmap.count > 0
    bare = type("Cnf", (), {"num_vars": varmap.count, "clauses": clauses})()
    assert check_sat(bare, solver="builtin").status is SolverStatus.SAT


def test_build_exp_and_dominance_fragments(space_mixed, data_mixed):
    enc = PhiEncoder(space_mixed, data_mixed)
    frag = build_exp(space_mixed, 1, 4, encoder=enc)
    assert frag  # counter clauses plus two unit bounds
    dom = build_dominance(space_mixed, data_mixed, 0, 0, encoder=enc)
    # C >= 1 or E >= 1 collapses to satisfied/true cases only
    assert all(isinstance(cl, tuple) for cl in dom)


def test_decode_rejects_corrupt_models(space_b1, data_b1):
    enc = PhiEncoder(space_b1, data_b1)
    instance = enc.instance(full_window(space_b1, data_b1))
    result = solve(instance)
    model = dict(result.assignment)
    for (i, p), vid in enc.varmap.lam.items():
        if i == 1:
            model[vid] = False
    with pytest.raises(EncodingError):
        decode_instance(model, instance)


def test_decode_rejects_out_of_window_goodness(space_b1, data_b1):
    enc = PhiEncoder(space_b1, data_b1)
    wide = enc.instance(full_window(space_b1, data_b1))
    result = solve(wide)
    _, g = decode_instance(result.assignment, wide)
    # shift the window so the same model now falls outside it
    other = enc.instance(pin((g.correctness + 1, g.explainability), space_b1, data_b1))
    with pytest.raises(EncodingError):
        decode_instance(result.assignment, other)


def test_sidecar_map_names_every_structural_variable(space_b1, data_b1):
    enc = PhiEncoder(space_b1, data_b1)
    enc.base_clauses()
    text = sidecar_map(enc.varmap, space_b1)
    lines = text.strip().splitlines()
    assert all(len(line.split()) == 2 for line in lines)
    assert any(line.startswith("lambda_1_f ") for line in lines)
    assert any(line.startswith("tau_1_1_a ") for line in lines)
    assert any(line.startswith("u_1 ") for line in lines)


def test_encoder_requires_positive_budget(space_b1, data_b1):
    from lpotree import TreeSpace

    flat = TreeSpace(space_b1.functions, space_b1.labels, 0)
    with pytest.raises(ValueError):
        PhiEncoder(flat, data_b1)
