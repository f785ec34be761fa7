# -*- coding: utf-8 -*-
from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from haarlab_1_0.bellman import candidate_para_quadratic, candidate_quadratic, parse_candidate
from haarlab_1_0.core.dyadic import ROOT, DyadicGrid, StepFunction
from haarlab_1_0.errors import DegenerateTreeError, DomainError, InputError
from haarlab_1_0.transference import (
    MAIN_FACTOR,
    PARA_FACTOR,
    MartingaleTree,
    TreePara,
    balanced_vertex,
    build_modified,
    dump_tree,
    load_tree,
    main_estimate_check,
    para_estimate_check,
    plank_alpha,
    plank_alpha_single,
    quadratic_stronger_check,
    random_tree,
    random_tree_para,
    tree_from_data,
    tree_para_from_symbol,
    tree_to_dict,
    verify_domains,
)
from haarlab_1_0.weights import Weight, cascade_weight

THIRD = 1.0 / 3.0


def depth_one_tree(A: float = 4.0) -> MartingaleTree:
    leaves = np.array(
        [
            [1.0, 0.5, 2.0, 1.0, 1.0, 1.5],
            [-0.5, -0.5, 1.0, 1.0, 1.5, 1.0],
        ]
    )
    return MartingaleTree.from_leaves(A, leaves)


# =========================================================
# 树模型
# =========================================================
def test_tree_from_leaves_averages_up():
    tree = depth_one_tree()
    assert tree.n == 1
    assert_allclose(tree.root_point, [0.25, 0.0, 1.5, 1.0, 1.25, 1.25])


def test_tree_rejects_broken_dynamics():
    tree = depth_one_tree()
    levels = [np.array(x) for x in tree.levels]
    levels[0][0, 0] += 0.1
    with pytest.raises(DomainError) as exc:
        MartingaleTree(4.0, tuple(levels))
    assert exc.value.detail["node"] == "0/0"


def test_tree_rejects_points_outside_domain():
    leaves = np.array([[0.0, 0.0, 1.0, 1.0, 3.0, 3.0], [0.0, 0.0, 1.0, 1.0, 1.0, 1.0]])
    with pytest.raises(DomainError):
        MartingaleTree.from_leaves(4.0, leaves)


def test_tree_from_data_uses_the_six_averages(grid4, random_step):
    f, g = random_step(grid4), random_step(grid4)
    w = cascade_weight(grid4, 0.3, seed=1)
    tree = tree_from_data(f, g, w, 2)
    left = slice(0, 4)
    assert tree.levels[2][0] == pytest.approx(
        [
            f.values[left].mean(),
            g.values[left].mean(),
            (f.values[left] ** 2 * w.values[left]).mean(),
            (g.values[left] ** 2 / w.values[left]).mean(),
            w.values[left].mean(),
            (1.0 / w.values[left]).mean(),
        ]
    )
    assert tree.A >= 1.0


def test_tree_json_round_trip(tmp_path):
    tree = random_tree_para(2, 4.0, seed=3)
    path = tmp_path / "tree.json"
    dump_tree(tree, path)
    loaded = load_tree(path)
    assert isinstance(loaded, TreePara)
    assert tree_to_dict(loaded) == tree_to_dict(tree)


# =========================================================
# plank
# =========================================================
def test_plank_alpha_depth_one():
    plank = plank_alpha(depth_one_tree())
    assert_array_equal(plank.alpha, [THIRD, -THIRD])


def test_plank_contracts_on_random_trees():
    for i in range(30):
        tree = random_tree(1 + i % 3, 4.0, seed=[11, i])
        if tree.is_degenerate():
            continue
        plank = plank_alpha(tree)
        assert math.fsum(plank.alpha.tolist()) == 0.0
        assert np.max(np.abs(plank.alpha)) <= THIRD + 1e-12
        assert plank.move_f >= 1.0 / 12.0 - 1e-12
        assert plank.move_g >= 1.0 / 12.0 - 1e-12


def test_plank_single_vector_constant():
    for i in range(20):
        tree = random_tree(3, 4.0, seed=[12, i])
        if np.all(tree.g_diffs() == 0.0):
            continue
        assert plank_alpha_single(tree).move_g >= 1.0 / 6.0 - 1e-12


def test_plank_degenerate_tree():
    leaves = np.tile([0.5, -0.5, 1.0, 1.0, 1.0, 1.0], (2, 1))
    tree = MartingaleTree.from_leaves(2.0, leaves)
    assert tree.is_degenerate()
    with pytest.raises(DegenerateTreeError):
        plank_alpha(tree)


def test_balanced_vertex_is_stable():
    assert_array_equal(balanced_vertex(np.array([1.0, 1.0, 1.0, 1.0])), [THIRD, THIRD, -THIRD, -THIRD])
    assert_array_equal(balanced_vertex(np.array([-2.0, 3.0])), [-THIRD, THIRD])


# =========================================================
# 修正鞅
# =========================================================
def test_modified_tree_depth_one():
    tree = depth_one_tree()
    mod = build_modified(tree, plank_alpha(tree))
    X1, X2 = tree.leaves
    assert_allclose(mod.X_plus, (4.0 * X1 + 2.0 * X2) / 6.0, rtol=1e-14, atol=1e-15)
    assert_allclose(mod.X_minus, (2.0 * X1 + 4.0 * X2) / 6.0, rtol=1e-14, atol=1e-15)
    assert_allclose(mod.theta_plus[1], [2.0 / 3.0, 1.0 / 3.0], rtol=1e-14)
    assert_allclose((mod.X_plus + mod.X_minus) / 2.0, tree.root_point, rtol=1e-14, atol=1e-15)


def test_modified_tree_identities_on_random_trees():
    for i in range(20):
        tree = random_tree(3, 8.0, seed=[13, i])
        if tree.is_degenerate():
            continue
        mod = build_modified(tree, plank_alpha(tree))
        assert mod.midpoint_error <= 1e-12
        assert mod.product_error <= 1e-10
        for sign in (1, -1):
            _, thetas = mod.side(sign)
            for theta in thetas[1:]:
                assert_allclose(theta[0::2] + theta[1::2], 1.0, atol=1e-12)
        dom = verify_domains(mod).to_dict()
        assert dom["max_uv_over_4A"] <= 1.0 + 1e-9
        assert dom["max_segment_uv_over_4_5A"] <= 1.0 + 1e-9


def test_build_modified_rejects_bad_alpha():
    tree = depth_one_tree()
    with pytest.raises(InputError):
        build_modified(tree, np.array([0.5, -0.5]))
    with pytest.raises(InputError):
        build_modified(tree, np.array([THIRD, THIRD]))


# =========================================================
# 主估计 / para 估计
# =========================================================
def test_main_estimate_on_random_trees():
    cand = candidate_quadratic(2.0)
    for i in range(30):
        tree = random_tree(1 + i % 3, 6.0, seed=[14, i])
        rep = main_estimate_check(tree, cand)
        assert rep.ok
        assert rep.factor == MAIN_FACTOR
        assert rep.rhs >= rep.lhs - 1e-9 * max(1.0, rep.lhs)
        if not rep.degenerate:
            assert rep.first_step_margin >= -1e-9
            assert rep.final_diff_margin >= -1e-9
            assert rep.move_f >= 1.0 / 12.0 - 1e-12


def test_main_estimate_on_degenerate_tree():
    leaves = np.tile([0.5, -0.5, 1.0, 1.0, 1.0, 1.0], (4, 1))
    tree = MartingaleTree.from_leaves(2.0, leaves)
    rep = main_estimate_check(tree, candidate_quadratic(2.0))
    assert rep.degenerate
    assert rep.lhs == 0.0 and rep.rhs == 0.0
    assert rep.ok


def test_main_estimate_rejects_para_candidate():
    with pytest.raises(InputError):
        main_estimate_check(depth_one_tree(), candidate_para_quadratic(2.0))


def test_quadratic_stronger_inequality():
    cand = candidate_quadratic(2.0)
    for i in range(20):
        tree = random_tree(2, 4.0, seed=[15, i])
        deficit, bound, margin = quadratic_stronger_check(tree, cand)
        assert margin >= -1e-9 * max(1.0, bound)
        assert deficit == pytest.approx(bound + margin)


def test_quadratic_stronger_needs_quadratic_candidate():
    with pytest.raises(InputError):
        quadratic_stronger_check(depth_one_tree(), parse_candidate("dp:k=1,res=0.5", 4.0))


def test_para_estimate_on_random_trees():
    cand = candidate_para_quadratic(2.0)
    for i in range(30):
        tree = random_tree_para(1 + i % 3, 4.0, seed=[16, i])
        assert tree.d0 >= -1e-12
        rep = para_estimate_check(tree, cand)
        assert rep.ok
        assert rep.factor == PARA_FACTOR


def test_modified_para_tree_m_jumps_by_d0_at_root():
    for i in range(20):
        base = random_tree(1, 4.0, seed=[17, i])
        if np.all(base.g_diffs() == 0.0):
            continue
        tree = TreePara(base.A, base.levels, ROOT, (np.array([0.7]), np.array([0.2, 0.4])))
        assert tree.d0 == pytest.approx(0.4)
        mod = build_modified(tree, plank_alpha_single(tree))
        mix = (mod.X_plus + mod.X_minus) / 2.0
        assert_allclose(mix[:6], tree.root_point, rtol=1e-12, atol=1e-15)
        assert mix[6] == pytest.approx(0.3, abs=1e-12)
        assert para_estimate_check(tree, candidate_para_quadratic(2.0)).ok
        break
    else:
        pytest.fail("no tree with a g jump")


def test_para_estimate_needs_para_tree():
    with pytest.raises(InputError):
        para_estimate_check(depth_one_tree(), candidate_para_quadratic(2.0))


def test_symbol_tree_on_root_haar():
    grid = DyadicGrid(3)
    phi = StepFunction(grid, [1, 1, 1, 1, -1, -1, -1, -1])
    rng = np.random.default_rng(4)
    f = StepFunction(grid, rng.standard_normal(8))
    g = StepFunction(grid, rng.standard_normal(8))
    tree = tree_para_from_symbol(phi, f, g, Weight.ones(grid), 1)
    assert tree.d0 == pytest.approx(1.0)
    assert_allclose(tree.M_levels[-1], [0.0, 0.0], atol=1e-15)
    rep = para_estimate_check(tree, candidate_para_quadratic(2.0))
    assert rep.ok
