# -*- coding: utf-8 -*-
from __future__ import annotations

import json

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from haarlab_1_0.core.dyadic import DyadicNode
from haarlab_1_0.errors import GridError, InputError, NormalizationError
from haarlab_1_0.remodel import (
    CubeFunction,
    CubeGrid,
    CubeNode,
    CubeShiftSpec,
    a2_inflation,
    apply_cube_shift,
    average_defect,
    build_phi,
    cube_a2,
    dump_phi,
    gen_cascade_weight_nd,
    gen_random_cube_shift,
    inflation_bound,
    nesting_violations,
    phi_to_doc,
    read_cube_csv,
    remodel_shift,
    transfer_function,
    transfer_weight,
    write_cube_csv,
)


# =========================================================
# 方体格点
# =========================================================
def test_cube_node_stage_normalizes():
    q = CubeNode(2, 1, (1, 0), 2)
    assert q.is_cube
    assert q.level == 2
    assert CubeNode(2, 1, (3, 1), 1).resolution == (2, 1)


def test_cube_node_rejects_position_out_of_range():
    with pytest.raises(GridError):
        CubeNode(2, 1, (2, 0))
    with pytest.raises(GridError):
        CubeNode(2, 1, (0,))


def test_cube_children_and_contains():
    q = CubeNode(2, 1, (1, 0))
    kids = q.cube_children()
    assert [k.position for k in kids] == [(2, 0), (2, 1), (3, 0), (3, 1)]
    assert all(q.contains(k) for k in kids)
    assert not kids[0].contains(q)
    assert sum(k.measure for k in kids) == pytest.approx(q.measure)


def test_cube_function_average():
    f = CubeFunction.from_flat(2, np.arange(16.0))
    assert f.grid == CubeGrid(2, 2)
    # 左上 2x2 块：0, 1, 4, 5
    assert f.average(CubeNode(2, 1, (0, 0))) == pytest.approx(2.5)
    assert f.mean() == pytest.approx(7.5)


def test_cube_function_rejects_bad_size():
    with pytest.raises(GridError):
        CubeFunction.from_flat(2, np.ones(8))


def test_cube_a2_of_constant_is_one():
    rep, _ = cube_a2(CubeFunction(CubeGrid(3, 2), np.full(64, 2.5)))
    assert rep == pytest.approx(1.0)


def test_cube_csv_round_trip(tmp_path):
    w = gen_cascade_weight_nd(2, 3, 0.4, seed=2)
    path = tmp_path / "w.csv"
    write_cube_csv(w, path)
    assert path.read_text(encoding="utf-8").splitlines()[0] == "cell,value"
    back = read_cube_csv(path, 2)
    assert_array_equal(back.values, w.values)
    with pytest.raises(GridError):
        read_cube_csv(path, 4)


# =========================================================
# Φ
# =========================================================
def test_one_dimensional_map_is_identity():
    phi = build_phi(1, 5, seed=7)
    assert_array_equal(phi.leaf_perm, np.arange(32))
    f = CubeFunction.from_flat(1, np.random.default_rng(1).standard_normal(32))
    assert_array_equal(transfer_function(phi, f).values, f.values)


@pytest.mark.parametrize("d,depth", [(2, 3), (3, 2)])
def test_map_is_a_measure_preserving_bijection(d, depth):
    phi = build_phi(d, depth, seed=[d, depth])
    assert phi.grid.depth == d * depth
    assert_array_equal(np.sort(phi.leaf_perm), np.arange(1 << (d * depth)))


@pytest.mark.parametrize("d,depth", [(2, 3), (3, 2)])
def test_map_preserves_averages(d, depth):
    phi = build_phi(d, depth, seed=11)
    f = CubeFunction(phi.cube_grid, np.random.default_rng(3).standard_normal(phi.cube_grid.n_cells))
    assert average_defect(phi, f) <= 1e-12 * max(1.0, float(np.abs(f.values).max()))


def test_map_respects_nesting():
    phi = build_phi(2, 3, seed=5)
    assert nesting_violations(phi, 500, seed=1) == 0


def test_cube_of_and_interval_of_are_inverse():
    phi = build_phi(2, 2, seed=9)
    for t in range(phi.depth + 1):
        for p in range(1 << t):
            node = DyadicNode(t, p)
            q = phi.cube_of(node)
            assert q.measure == pytest.approx(2.0**-t)
            assert phi.interval_of(q) == node


def test_interval_of_rejects_other_dimension():
    phi = build_phi(2, 2, seed=9)
    with pytest.raises(GridError):
        phi.interval_of(CubeNode(3, 0, (0, 0, 0)))


def test_transfer_weight_keeps_mass_and_positivity():
    phi = build_phi(2, 3, seed=8)
    w = gen_cascade_weight_nd(2, 3, 0.5, seed=2)
    tw = transfer_weight(phi, w)
    assert tw.grid.depth == 6
    assert_allclose(np.sort(tw.values), np.sort(w.values.reshape(-1)))
    bad = np.ones(phi.cube_grid.n_cells)
    bad[5] = 0.0
    with pytest.raises(InputError):
        transfer_weight(phi, CubeFunction(phi.cube_grid, bad))


def test_transfer_rejects_grid_mismatch():
    phi = build_phi(2, 2, seed=0)
    with pytest.raises(GridError):
        transfer_function(phi, CubeFunction.from_flat(2, np.ones(64)))


# =========================================================
# A2 膨胀
# =========================================================
def test_inflation_bound_values():
    assert [inflation_bound(d) for d in (1, 2, 3)] == [1.0, 4.0, 16.0]


@pytest.mark.parametrize("d,depth", [(2, 3), (3, 2)])
def test_a2_inflation_stays_under_bound(d, depth):
    for trial in range(4):
        phi = build_phi(d, depth, seed=[d, trial])
        w = gen_cascade_weight_nd(d, depth, 0.6, seed=[d, trial, 1])
        rep = a2_inflation(phi, w)
        assert 1.0 - 1e-12 <= rep.ratio <= inflation_bound(d) * (1.0 + 1e-12)
        assert rep.a2_after >= rep.a2_before * (1.0 - 1e-12)
        assert rep.to_dict()["witness_interval"] == rep.witness_interval.key


def test_a2_inflation_in_one_dimension_is_exact():
    phi = build_phi(1, 6, seed=0)
    rep = a2_inflation(phi, gen_cascade_weight_nd(1, 6, 0.5, seed=4))
    assert rep.ratio == pytest.approx(1.0, rel=1e-12)


# =========================================================
# shift 重排
# =========================================================
@pytest.mark.parametrize("d,depth,n", [(2, 3, 1), (2, 3, 2), (3, 2, 1)])
def test_remodeled_shift_commutes_with_transfer(d, depth, n):
    phi = build_phi(d, depth, seed=[4, d, n])
    spec = gen_random_cube_shift(phi.cube_grid, n, seed=[5, d, n])
    f = CubeFunction(phi.cube_grid, np.random.default_rng(6).standard_normal(phi.cube_grid.n_cells))

    line = remodel_shift(phi, spec)
    assert line.complexity == d * n
    assert line.active_levels == [d * L for L in spec.active_levels]
    assert line.kernel_sup_ratio() <= 1.0 + 1e-12

    lhs = line.apply(transfer_function(phi, f)).values
    rhs = transfer_function(phi, apply_cube_shift(spec, f)).values
    assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-10 * max(1.0, float(np.abs(rhs).max())))


def test_cube_shift_output_has_zero_mean():
    grid = CubeGrid(2, 3)
    spec = gen_random_cube_shift(grid, 1, seed=1)
    f = CubeFunction(grid, np.random.default_rng(2).standard_normal(grid.n_cells))
    assert spec.apply(f).mean() == pytest.approx(0.0, abs=1e-12)


def test_cube_shift_rejects_oversized_kernel():
    grid = CubeGrid(2, 2)
    with pytest.raises(NormalizationError):
        CubeShiftSpec(grid, 1, {0: np.full((1, 4, 4), 2.0)})


def test_cube_shift_rejects_level_past_depth():
    grid = CubeGrid(2, 2)
    with pytest.raises(GridError):
        CubeShiftSpec(grid, 2, {1: np.zeros((4, 16, 16))})


# =========================================================
# Φ 的 JSON
# =========================================================
def test_phi_doc_lists_every_node(tmp_path):
    phi = build_phi(2, 2, seed=3)
    doc = phi_to_doc(phi)
    assert len(doc.nodes) == (1 << (phi.depth + 1)) - 1
    root = doc.nodes["0/0"]
    assert root.children == ["1/0", "1/1"]
    assert (root.level, root.stage, root.position) == (0, 0, [0, 0])
    leaf = doc.nodes[DyadicNode(phi.depth, 5).key]
    assert leaf.children == []

    path = tmp_path / "phi.json"
    dump_phi(phi, path)
    raw = json.loads(path.read_text(encoding="utf-8"))
    assert raw["d"] == 2 and raw["cube_depth"] == 2
