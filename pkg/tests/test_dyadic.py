# -*- coding: utf-8 -*-
from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from haarlab_1_0.core.dyadic import (
    ROOT,
    DyadicGrid,
    DyadicNode,
    HaarVector,
    StepFunction,
    average,
    children,
    haar_expand,
    haar_reconstruct,
    mart_diff,
    mart_diff_n,
    standard_haar,
)
from haarlab_1_0.core.io_csv import read_step_csv, write_step_csv
from haarlab_1_0.errors import GridError, InputError


# =========================================================
# 节点 / 孩子
# =========================================================
def test_children_of_root():
    kids = children(ROOT, 1)
    assert kids == [DyadicNode(1, 0), DyadicNode(1, 1)]
    assert [k.left for k in kids] == [0.0, 0.5]
    assert all(k.length == 0.5 for k in kids)


def test_children_two_levels_in_order():
    kids = children(ROOT, 2)
    assert [k.position for k in kids] == [0, 1, 2, 3]
    assert all(k.length == 0.25 for k in kids)


def test_children_zero_is_self():
    node = DyadicNode(3, 5)
    assert children(node, 0) == [node]


def test_children_below_leaf_is_error(grid4):
    leaf = DyadicNode(4, 7)
    with pytest.raises(GridError):
        children(leaf, 1, grid4)


def test_node_validation_and_keys():
    with pytest.raises(GridError):
        DyadicNode(2, 4)
    node = DyadicNode.from_key("3/5")
    assert node == DyadicNode(3, 5)
    assert node.parent() == DyadicNode(2, 2)
    assert DyadicNode(1, 1).contains(node)
    assert not DyadicNode(1, 0).contains(node)


# =========================================================
# 均值 / 鞅差
# =========================================================
def test_average_of_constant(grid4):
    f = StepFunction.constant(grid4, 2.5)
    for node in grid4.all_nodes():
        assert average(f, node) == 2.5


def test_average_of_left_half_indicator(grid4):
    f = StepFunction.indicator(grid4, DyadicNode(1, 0))
    assert average(f, ROOT) == 0.5


def test_averages_telescope(grid4, random_step):
    f = random_step(grid4)
    for node in grid4.internal_nodes():
        a, b = children(node, 1)
        assert average(f, node) == pytest.approx((average(f, a) + average(f, b)) / 2.0, rel=1e-12, abs=1e-14)


def test_mart_diff_kills_constants(grid4):
    f = StepFunction.constant(grid4, 3.0)
    assert_array_equal(mart_diff(f, DyadicNode(1, 1)).values, np.zeros(grid4.n_leaves))


def test_mart_diff_fixes_its_own_haar_vector(grid4):
    node = DyadicNode(2, 1)
    h = standard_haar(node).to_step(grid4)
    assert_allclose(mart_diff(h, node).values, h.values, atol=1e-14)


def test_mart_diff_is_idempotent_and_mean_zero(grid4, random_step):
    f = random_step(grid4)
    node = DyadicNode(1, 0)
    d = mart_diff(f, node)
    assert_allclose(mart_diff(d, node).values, d.values, atol=1e-14)
    assert abs(average(d, node)) < 1e-14
    outside = np.ones(grid4.n_leaves, dtype=bool)
    outside[grid4.leaf_slice(node)] = False
    assert np.all(d.values[outside] == 0.0)


def test_mart_diff_on_leaf_is_error(grid4, random_step):
    with pytest.raises(GridError):
        mart_diff(random_step(grid4), DyadicNode(4, 0))


def test_decomposition_reconstructs_f(grid4, random_step):
    f = random_step(grid4)
    total = StepFunction.constant(grid4, average(f, ROOT))
    for node in grid4.internal_nodes():
        total = total + mart_diff(f, node)
    assert_allclose(total.values, f.values, rtol=1e-12, atol=1e-12)


def test_differences_are_orthogonal(grid4, random_step):
    f = random_step(grid4)
    g = random_step(grid4)
    nodes = list(grid4.internal_nodes())
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            assert abs(mart_diff(mart_diff(f, a), b).l2_norm()) < 1e-12
            assert abs(mart_diff(f, a).inner(mart_diff(g, b))) < 1e-12


def test_mart_diff_n_one_equals_mart_diff(grid4, random_step):
    f = random_step(grid4)
    node = DyadicNode(1, 1)
    assert_allclose(mart_diff_n(f, node, 1).values, mart_diff(f, node).values)


def test_mart_diff_n_kills_constants(grid4):
    f = StepFunction.constant(grid4, -1.0)
    assert_array_equal(mart_diff_n(f, ROOT, 3).values, np.zeros(grid4.n_leaves))


def test_mart_diff_n_two_is_sum_over_node_and_children(grid4, random_step):
    f = random_step(grid4)
    node = DyadicNode(1, 0)
    expected = mart_diff(f, node)
    for kid in children(node, 1):
        expected = expected + mart_diff(f, kid)
    got = mart_diff_n(f, node, 2)
    assert_allclose(got.values, expected.values, atol=1e-13)
    assert_allclose(mart_diff_n(got, node, 2).values, got.values, atol=1e-13)


def test_mart_diff_n_overflow(grid4, random_step):
    with pytest.raises(GridError):
        mart_diff_n(random_step(grid4), DyadicNode(2, 0), 3)


# =========================================================
# Haar 展开
# =========================================================
def test_expand_constant_one(grid4):
    exp = haar_expand(StepFunction.constant(grid4, 1.0))
    assert exp.root_average == 1.0
    assert all(c == 0.0 for _, c in exp.items())


def test_expand_normalized_root_haar(grid4):
    exp = haar_expand(standard_haar(ROOT).to_step(grid4))
    coefs = {node: c for node, c in exp.items() if c != 0.0}
    assert list(coefs) == [ROOT]
    assert coefs[ROOT] == pytest.approx(1.0, abs=1e-14)
    assert exp.root_average == pytest.approx(0.0, abs=1e-15)


def test_parseval_and_inverse(grid6, random_step):
    f = random_step(grid6)
    exp = haar_expand(f)
    assert exp.energy() == pytest.approx(f.l2_norm() ** 2, rel=1e-12)
    assert_allclose(haar_reconstruct(exp).values, f.values, rtol=1e-12, atol=1e-12)


def test_coefficient_matches_mart_diff_norm(grid4, random_step):
    f = random_step(grid4)
    exp = haar_expand(f)
    for node in grid4.internal_nodes():
        assert abs(exp.coefficient(node)) == pytest.approx(mart_diff(f, node).l2_norm(), rel=1e-12, abs=1e-14)


def test_haar_vector_rejects_nonzero_mean():
    with pytest.raises(InputError):
        HaarVector(ROOT, (1.0, 0.5))
    with pytest.raises(InputError):
        HaarVector(ROOT, (0.5, -0.5), unit_sup=True)


def test_haar_vector_inner_matches_step_inner(grid4, random_step):
    f = random_step(grid4)
    h = HaarVector(DyadicNode(2, 3), (0.7, -0.7))
    assert h.inner(f) == pytest.approx(h.to_step(grid4).inner(f), rel=1e-12)


# =========================================================
# CSV
# =========================================================
def test_step_csv_round_trip(tmp_path, grid4, random_step):
    f = random_step(grid4)
    path = tmp_path / "f.csv"
    write_step_csv(f, path)
    assert path.read_text(encoding="utf-8").splitlines()[0] == "leaf,value"
    assert_array_equal(read_step_csv(path).values, f.values)


def test_step_csv_needs_power_of_two(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("leaf,value\n0,1\n1,2\n2,3\n", encoding="utf-8")
    with pytest.raises(GridError):
        read_step_csv(path)


def test_step_csv_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("j,v\n0,1\n1,2\n", encoding="utf-8")
    with pytest.raises(GridError):
        read_step_csv(path)


def test_grid_mismatch_is_error():
    with pytest.raises(GridError):
        StepFunction.constant(DyadicGrid(2), 1.0) + StepFunction.constant(DyadicGrid(3), 1.0)
