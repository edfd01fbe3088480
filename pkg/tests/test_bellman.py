"""Tests for martingale state trees, reweighting and the grid DP oracle."""

import math
from fractions import Fraction

import numpy as np
import pytest

from dyadlab.bellman import (BellmanConfig, BellmanTable, MartingalePoint,
                             bellman_oracle, concavity_gain_check,
                             lemma51_verify, modified_points, range_check,
                             tree_from_functions)
from dyadlab.dyadic import DyadicError, DyadicSystem, sample_system
from dyadlab.schur import AlphaSequence, lambda_matrix
from dyadlab.signal import SpaceSpec, StepFunction, random_step_function

ROOT2_OVER_16 = math.sqrt(2.0) / 16.0
FLOAT_TOL = 1e-12


def exact_pair(seed, depth, M=0):
    system = sample_system((seed, 0), depth, M=M)
    f = random_step_function(system, seed=(seed, 1), exact=True)
    g = random_step_function(system, seed=(seed, 2), exact=True)
    return f, g


# -- state trees ---------------------------------------------------------


def test_martingale_point_coords_guard():
    pt = MartingalePoint((1.0, 2.0), 5.0, (0.0, 0.0), 1.0)
    assert pt.d == 2
    with pytest.raises(DyadicError):
        pt.coords()
    scalar = MartingalePoint((Fraction(1, 2),), Fraction(1, 4),
                             (Fraction(0),), Fraction(0))
    assert scalar.coords() == (0.5, 0.25, 0.0, 0.0)


def test_tree_exact_at_p2():
    f, g = exact_pair(1, depth=3)
    tree = tree_from_functions(f, g, SpaceSpec(p=2.0))
    assert tree.exact
    assert tree.depth == 3
    assert len(tree.points_at_depth(3)) == 8
    assert tree.validate_dynamics() == 0.0
    assert tree.validate_domain() >= -FLOAT_TOL
    root = tree.root_point()
    mean = sum(f.values[:, 0], Fraction(0)) / 8
    assert root.f[0] == mean
    power_mean = sum(v * v for v in f.values[:, 0]) / 8
    assert root.F == power_mean


def test_tree_float_mode_for_general_exponent():
    f, g = exact_pair(2, depth=4)
    tree = tree_from_functions(f, g, SpaceSpec(p=4.0))
    assert not tree.exact
    assert tree.validate_dynamics() <= 1e-12
    assert tree.validate_domain() >= -1e-12


def test_tree_rejects_mismatched_inputs():
    sys_a = DyadicSystem(depth=2)
    sys_b = DyadicSystem(depth=2, omega=(1, 0))
    f = random_step_function(sys_a, seed=1)
    g = random_step_function(sys_b, seed=2)
    with pytest.raises(DyadicError):
        tree_from_functions(f, g, SpaceSpec(p=2.0))
    h = random_step_function(sys_a, seed=3, d=2)
    with pytest.raises(DyadicError):
        tree_from_functions(f, h, SpaceSpec(p=2.0))


# -- reweighting ---------------------------------------------------------


def quarter_alpha(k):
    vals = np.empty(2 ** k, dtype=object)
    for i in range(2 ** k):
        vals[i] = Fraction(1, 4) if i % 2 == 0 else Fraction(-1, 4)
    return AlphaSequence(vals)


def test_modified_points_exact_invariants():
    f, g = exact_pair(3, depth=3)
    tree = tree_from_functions(f, g, SpaceSpec(p=2.0))
    for k in (1, 2, 3):
        out = modified_points(tree, quarter_alpha(k), k=k)
        assert out["identity_exact"]
        assert out["product_exact"]
        assert out["identity_error"] == 0.0
        assert out["product_max_error"] == 0.0
        assert out["theta_in_design_range"]
        assert out["theta_in_asserted_range"]
        assert 0.375 - 1e-12 <= out["theta_min"] <= out["theta_max"] \
            <= 0.625 + 1e-12


def test_modified_points_against_direct_reweighting():
    """Independent recomputation of the plus state from raw cell states."""
    f, g = exact_pair(4, depth=2)
    tree = tree_from_functions(f, g, SpaceSpec(p=2.0))
    k = 2
    alpha = quarter_alpha(k)
    out = modified_points(tree, alpha, k=k)
    pts = tree.points_at_depth(k)
    weights = [(1 + a) / Fraction(4) for a in alpha.values]
    assert sum(weights) == 1
    for tag, sign in (("plus", 1), ("minus", -1)):
        w = [(1 + sign * a) / Fraction(4) for a in alpha.values]
        got = out[tag]
        assert got.f[0] == sum(wi * p.f[0] for wi, p in zip(w, pts))
        assert got.F == sum(wi * p.F for wi, p in zip(w, pts))
        assert got.g[0] == sum(wi * p.g[0] for wi, p in zip(w, pts))
        assert got.G == sum(wi * p.G for wi, p in zip(w, pts))


def test_modified_points_pairing_matches_quadratic_form():
    f, g = exact_pair(5, depth=3)
    tree = tree_from_functions(f, g, SpaceSpec(p=2.0))
    k = 2
    lam = lambda_matrix(tree, k)
    alpha = quarter_alpha(k)
    out = modified_points(tree, alpha, k=k, lam=lam)
    quad = sum(alpha.values[i] * lam.values[i, j] * alpha.values[j]
               for i in range(4) for j in range(4))
    root = tree.root_point()
    plus = out["plus"]
    lhs = (plus.f[0] - root.f[0]) * (plus.g[0] - root.g[0])
    assert lhs == quad / 2
    assert out["pairing_value"] == pytest.approx(float(quad) / 2.0)


def test_modified_points_length_guard():
    f, g = exact_pair(6, depth=2)
    tree = tree_from_functions(f, g, SpaceSpec(p=2.0))
    with pytest.raises(DyadicError):
        modified_points(tree, np.array([0.25, 0.0, -0.25]))


# -- grid oracle: configuration and guards -------------------------------


def test_config_validation():
    with pytest.raises(DyadicError):
        BellmanConfig(p=1.0)
    with pytest.raises(DyadicError):
        BellmanConfig(f_max=0.0)
    with pytest.raises(DyadicError):
        BellmanConfig(n_f=16)  # must be odd
    with pytest.raises(DyadicError):
        BellmanConfig(n_f=1)
    with pytest.raises(DyadicError):
        BellmanConfig(n_F=1)
    with pytest.raises(DyadicError):
        BellmanConfig(n_f=67)  # above the axis cap
    assert BellmanConfig(p=4.0).p_dual == pytest.approx(4.0 / 3.0)


def test_layer_ops_guard():
    big = BellmanConfig(n_f=65, n_F=65, n_g=65, n_G=65)
    with pytest.raises(DyadicError):
        BellmanTable(big)
    capped = BellmanConfig(n_f=65, n_F=65, n_g=65, n_G=65, max_offset=1)
    BellmanTable(capped)  # fits under the per-layer operation budget


def test_table_depth_cap():
    table = BellmanTable(BellmanConfig(n_f=5, n_F=5, n_g=5, n_G=5))
    with pytest.raises(DyadicError):
        table.layer(7)


def test_oracle_cache_and_override_guard():
    cfg = BellmanConfig(n_f=5, n_F=5, n_g=5, n_G=5)
    a = bellman_oracle(cfg, depth=1)
    b = bellman_oracle(cfg, depth=2)
    assert a is b
    assert b.depth >= 2
    with pytest.raises(DyadicError):
        bellman_oracle(cfg, depth=1, p=2.0)


# -- grid oracle: frozen values and structure ----------------------------


def test_depth_one_frozen_value():
    """From the state (0, 1, 0, 1) one split reaches means +-1 on both
    coordinates (the power budget allows |f| = 1), collecting 4*1*1."""
    table = bellman_oracle(BellmanConfig(), depth=1)
    probe = table.evaluate(1, (0.0, 1.0, 0.0, 1.0), bump_feasible=False)
    assert probe["snap_distance"] == 0.0
    assert probe["value"] == 4.0


def test_dirac_state_collects_nothing():
    """With F = |f|^2 the f-martingale cannot move at all."""
    table = bellman_oracle(BellmanConfig(), depth=3)
    for t in (1, 2, 3):
        probe = table.evaluate(t, (1.0, 1.0, 0.0, 4.0), bump_feasible=False)
        assert probe["snap_distance"] == 0.0
        assert probe["value"] == 0.0


def test_layers_monotone_in_depth():
    table = bellman_oracle(BellmanConfig(n_f=9, n_F=9, n_g=9, n_G=9), depth=3)
    for t in range(3):
        assert np.all(table.layer(t + 1) >= table.layer(t))


def test_nested_grid_refinement_is_monotone():
    """Doubling every axis keeps the coarse nodes and their split moves, so
    values at shared nodes cannot decrease."""
    coarse = BellmanTable(BellmanConfig(n_f=9, n_F=9, n_g=9, n_G=9))
    fine = BellmanTable(BellmanConfig(n_f=17, n_F=17, n_g=17, n_G=17))
    for t in (1, 2):
        sub = fine.layer(t)[::2, ::2, ::2, ::2]
        assert np.all(sub >= coarse.layer(t) - 1e-12)


def test_range_check():
    table = bellman_oracle(BellmanConfig(), depth=3)
    for t in range(4):
        rep = range_check(table, t)
        assert rep["ok"], rep
        assert rep["max"] <= 4.0 * t * 2.0 * 2.0 + 1e-9


def test_infeasible_region_masked():
    table = bellman_oracle(BellmanConfig(), depth=1)
    layer = table.layer(1)
    # |f| = 2 with F = 0 violates the domain and must stay -inf
    probe = table.evaluate(1, (2.0, 0.0, 0.0, 4.0), bump_feasible=False)
    assert probe["value"] == -math.inf
    assert np.isneginf(layer).any()


def test_evaluate_bumps_boundary_states():
    table = bellman_oracle(BellmanConfig(), depth=1)
    # F = 3.5 is on-grid but below |f|^2 = 4: the power axis gets bumped
    out = table.evaluate(1, (2.0, 3.5, 0.0, 4.0))
    assert out["bumped"]
    assert math.isfinite(out["value"])
    raw = table.evaluate(1, (2.0, 3.5, 0.0, 4.0), bump_feasible=False)
    assert raw["value"] == -math.inf


def test_concavity_slack_on_grid_pairs():
    table = bellman_oracle(BellmanConfig(), depth=3)
    for t in (0, 1, 2):
        rep = concavity_gain_check(table, t, n_samples=300, seed=(1, t))
        assert rep["n_evaluated"] == 300
        assert rep["allowance"] == 0.0
        assert rep["min_slack"] >= 0.0


def test_concavity_slack_snapped_pairs():
    table = bellman_oracle(BellmanConfig(), depth=2)
    rep = concavity_gain_check(table, 1, n_samples=300, seed=2, snapped=True)
    hf = table.steps[0]
    hg = table.steps[2]
    expected = 16.0 * hf * hg + 4.0 * (hf * 2.0 + hg * 2.0)
    assert rep["allowance"] == pytest.approx(expected)
    assert rep["min_slack"] >= -rep["allowance"]


# -- end-to-end ----------------------------------------------------------


def test_lemma51_verify_k1_exact_pair():
    f, g = exact_pair(7, depth=3)
    report = lemma51_verify(f, g, SpaceSpec(p=2.0), k=1, bellman_depth=3)
    assert report["tree_exact"]
    assert report["identity_exact"]
    assert report["product_max_error"] == 0.0
    assert 0.3 <= report["theta_min"] <= report["theta_max"] <= 5.0 / 6.0
    if report["sum_abs_lambda"] > 0:
        assert report["achieved_c"] == pytest.approx(ROOT2_OVER_16, rel=1e-9)
        assert report["meets_threshold"]
    assert "c_emp" in report and "drop" in report
    assert report["bellman_depth"] == 3
    assert math.isfinite(report["root_value"])


def test_lemma51_verify_k2():
    f, g = exact_pair(8, depth=3)
    report = lemma51_verify(f, g, SpaceSpec(p=2.0), k=2, bellman_depth=3)
    assert report["k"] == 2
    assert report["identity_exact"]
    if not report["degenerate"]:
        assert report["c_emp"] > 0.0


def test_lemma51_verify_skips_oracle_for_vectors():
    system = sample_system((9, 0), 3)
    f = random_step_function(system, seed=(9, 1), d=2, exact=True)
    g = random_step_function(system, seed=(9, 2), d=2, exact=True)
    report = lemma51_verify(f, g, SpaceSpec(p=2.0, d=2), k=1)
    assert report["bellman_skipped"]
    assert report["c_emp"] is None


def test_lemma51_verify_depth_guards():
    f, g = exact_pair(10, depth=2)
    with pytest.raises(DyadicError):
        lemma51_verify(f, g, SpaceSpec(p=2.0), k=3)
    with pytest.raises(DyadicError):
        lemma51_verify(f, g, SpaceSpec(p=2.0), k=2, bellman_depth=1)


def test_constant_pair_is_degenerate():
    system = DyadicSystem(depth=2)
    f = StepFunction.constant(system, Fraction(1), exact=True)
    g = StepFunction.constant(system, Fraction(2), exact=True)
    report = lemma51_verify(f, g, SpaceSpec(p=2.0), k=1, bellman_depth=2)
    assert report["sum_abs_lambda"] == 0.0
    assert report["meets_threshold"]  # vacuously: nothing to extract
