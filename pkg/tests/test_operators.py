# -*- coding: utf-8 -*-
from __future__ import annotations

import json

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from haarlab_1_0.core.dyadic import ROOT, DyadicGrid, DyadicNode, StepFunction, average, mart_diff, mart_diff_n
from haarlab_1_0.errors import InputError, NormalizationError
from haarlab_1_0.operators import (
    ElementaryShiftSpec,
    HaarShiftSpec,
    MultiplierSpec,
    ParaproductSpec,
    apply_elementary_shift,
    apply_haar_shift,
    apply_multiplier,
    apply_paraproduct,
    bmo_norm,
    elementary_to_general,
    gen_random_elementary,
    gen_random_shift,
    slice_shift,
)
from haarlab_1_0.operators.spec_io import dump_shift_spec, load_shift_spec


def check_linear(op, f, g, a=1.7, b=-0.3):
    lhs = op.apply(f * a + g * b).values
    rhs = (op.apply(f) * a + op.apply(g) * b).values
    assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def check_adjoint(op, f, g):
    assert op.apply(f).inner(g) == pytest.approx(f.inner(op.adjoint_apply(g)), rel=1e-10, abs=1e-12)


# =========================================================
# 乘子
# =========================================================
def test_multiplier_identity(grid6, random_step):
    f = random_step(grid6)
    out = apply_multiplier(MultiplierSpec.constant(grid6, 1.0), f)
    assert_allclose(out.values, f.values, rtol=1e-12, atol=1e-13)


def test_multiplier_single_node(grid4, random_step):
    f = random_step(grid4)
    node = DyadicNode(2, 1)
    spec = MultiplierSpec.from_mapping(grid4, {node: 0.5})
    expected = StepFunction.constant(grid4, f.mean()) + mart_diff(f, node) * 0.5
    assert_allclose(apply_multiplier(spec, f).values, expected.values, atol=1e-13)


def test_multiplier_preserves_root_average(grid6, random_step):
    f = random_step(grid6)
    spec = MultiplierSpec.random(grid6, seed=4)
    assert apply_multiplier(spec, f).mean() == pytest.approx(f.mean(), abs=1e-13)


def test_multiplier_rejects_large_sigma(grid4):
    with pytest.raises(NormalizationError) as exc:
        MultiplierSpec.from_mapping(grid4, {DyadicNode(1, 1): 1.5})
    assert exc.value.detail["node"] == "1/1"


def test_multiplier_linear_and_self_adjoint(grid6, random_step):
    spec = MultiplierSpec.random(grid6, seed=8)
    f, g = random_step(grid6), random_step(grid6)
    check_linear(spec, f, g)
    assert spec.apply(f).inner(g) == pytest.approx(f.inner(spec.apply(g)), rel=1e-12)


# =========================================================
# 初等 shift
# =========================================================
def test_elementary_zero_pairs(grid4, random_step):
    zeros = (np.zeros((1, 2, 2)), np.zeros((1, 2, 2)))
    spec = ElementaryShiftSpec(grid4, 0, 1, {ROOT: zeros, DyadicNode(1, 1): zeros})
    assert_array_equal(apply_elementary_shift(spec, random_step(grid4)).values, np.zeros(grid4.n_leaves))


def test_elementary_m0_n0_is_martingale_part(grid4, random_step):
    f = random_step(grid4)
    pair = (np.array([[[1.0, -1.0]]]), np.array([[[1.0, -1.0]]]))
    entries = {node: pair for node in grid4.internal_nodes()}
    spec = ElementaryShiftSpec(grid4, 0, 0, entries)
    assert spec.complexity == 1
    expected = apply_multiplier(MultiplierSpec.constant(grid4, 1.0), f) - StepFunction.constant(grid4, f.mean())
    assert_allclose(apply_elementary_shift(spec, f).values, expected.values, atol=1e-12)


def test_elementary_m0_n1_on_root_haar():
    grid = DyadicGrid(3)
    left = np.array([[[1.0, -1.0], [1.0, -1.0]]])
    right = np.array([[[1.0, -1.0], [1.0, -1.0]]])
    spec = ElementaryShiftSpec(grid, 0, 1, {ROOT: (left, right)})
    h = StepFunction(grid, [1, 1, 1, 1, -1, -1, -1, -1])
    # (h, h_root) = 1，输出为两个孩子上的 Haar 向量之和
    assert_allclose(apply_elementary_shift(spec, h).values, [1, 1, -1, -1, 1, 1, -1, -1], atol=1e-15)


def test_elementary_rejects_loose_pair(grid4):
    left = np.array([[[2.0, -2.0]]])
    right = np.array([[[1.0, -1.0]]])
    with pytest.raises(NormalizationError) as exc:
        ElementaryShiftSpec(grid4, 0, 0, {DyadicNode(1, 0): (left, right)})
    assert exc.value.detail["Q"] == "1/0"


def test_elementary_rejects_nonzero_mean(grid4):
    bad = (np.array([[[1.0, 0.0]]]), np.array([[[1.0, -1.0]]]))
    with pytest.raises(NormalizationError):
        ElementaryShiftSpec(grid4, 0, 0, {ROOT: bad})


@pytest.mark.parametrize("m,n", [(0, 1), (1, 0), (1, 2), (2, 2)])
def test_elementary_matches_general_conversion(grid6, random_step, m, n):
    spec = gen_random_elementary(grid6, m, n, seed=[m, n])
    general = elementary_to_general(spec)
    assert general.complexity == max(m, n) + 1
    assert general.kernel_sup_ratio() <= 1.0 + 1e-12
    f = random_step(grid6)
    assert_allclose(apply_haar_shift(general, f).values, apply_elementary_shift(spec, f).values, atol=1e-11)


def test_elementary_linear_and_adjoint(grid6, random_step):
    spec = gen_random_elementary(grid6, 1, 2, seed=3)
    f, g = random_step(grid6), random_step(grid6)
    check_linear(spec, f, g)
    check_adjoint(spec, f, g)


# =========================================================
# 一般 shift / 切片
# =========================================================
def test_haar_shift_zero_kernels(grid4, random_step):
    spec = HaarShiftSpec(grid4, 2, {0: np.zeros((1, 4, 4)), 1: np.zeros((2, 4, 4))})
    assert_array_equal(apply_haar_shift(spec, random_step(grid4)).values, np.zeros(grid4.n_leaves))


def test_haar_shift_rejects_large_kernel(grid4):
    k = np.zeros((2, 2, 2))
    k[1, 0, 1] = 2.5
    with pytest.raises(NormalizationError) as exc:
        HaarShiftSpec(grid4, 1, {1: k})
    assert exc.value.detail["Q"] == "1/1"


def test_haar_shift_output_lives_in_local_spaces(grid6, random_step):
    spec = gen_random_shift(grid6, 2, seed=1, levels=[1])
    out = apply_haar_shift(spec, random_step(grid6))
    total = StepFunction.constant(grid6, 0.0)
    for node in grid6.nodes(1):
        total = total + mart_diff_n(out, node, 2)
    assert_allclose(total.values, out.values, atol=1e-12)


def test_haar_shift_bilinear_bound(grid6, random_step):
    spec = gen_random_shift(grid6, 2, seed=6, tight=False)
    f, g = random_step(grid6), random_step(grid6)
    nodes, terms, bounds = spec.bilinear_terms(f, g)
    assert len(nodes) == terms.size == bounds.size
    assert np.all(np.abs(terms) <= bounds * (1.0 + 1e-12) + 1e-15)
    assert float(terms.sum()) == pytest.approx(apply_haar_shift(spec, f).inner(g), rel=1e-10, abs=1e-12)


def test_haar_shift_linear_and_adjoint(grid6, random_step):
    spec = gen_random_shift(grid6, 3, seed=2)
    f, g = random_step(grid6), random_step(grid6)
    check_linear(spec, f, g)
    check_adjoint(spec, f, g)


def test_slice_of_complexity_one_is_everything(grid4, random_step):
    spec = gen_random_shift(grid4, 1, seed=0)
    f = random_step(grid4)
    assert_array_equal(apply_haar_shift(slice_shift(spec, 0), f).values, apply_haar_shift(spec, f).values)


def test_slices_sum_to_shift(grid6, random_step):
    spec = gen_random_shift(grid6, 3, seed=9)
    f = random_step(grid6)
    total = sum((apply_haar_shift(slice_shift(spec, k), f).values for k in range(3)), np.zeros(grid6.n_leaves))
    assert_allclose(total, apply_haar_shift(spec, f).values, atol=1e-12)


def test_slice_levels_are_periodic(grid6):
    spec = gen_random_shift(grid6, 3, seed=9)
    for k in range(3):
        levels = slice_shift(spec, k).active_levels
        assert levels
        assert all((lv + k) % 3 == 0 for lv in levels)
        assert all(b - a == 3 for a, b in zip(levels, levels[1:]))


def test_slice_index_out_of_range(grid4):
    with pytest.raises(InputError):
        slice_shift(gen_random_shift(grid4, 2, seed=0), 2)


# =========================================================
# paraproduct / BMO
# =========================================================
def test_paraproduct_constant_symbol(grid4, random_step):
    spec = ParaproductSpec(StepFunction.constant(grid4, 3.0))
    assert_array_equal(apply_paraproduct(spec, random_step(grid4)).values, np.zeros(grid4.n_leaves))


def test_paraproduct_of_one(grid6, random_step):
    phi = random_step(grid6)
    out = apply_paraproduct(ParaproductSpec(phi), StepFunction.constant(grid6, 1.0))
    assert_allclose(out.values, phi.values - phi.mean(), atol=1e-12)


def test_paraproduct_matches_nested_sum(grid4, random_step):
    phi, f = random_step(grid4), random_step(grid4)
    expected = StepFunction.constant(grid4, 0.0)
    for node in grid4.internal_nodes():
        expected = expected + mart_diff(phi, node) * average(f, node)
    assert_allclose(apply_paraproduct(ParaproductSpec(phi), f).values, expected.values, atol=1e-12)


def test_paraproduct_linear_and_adjoint(grid6, random_step):
    spec = ParaproductSpec(random_step(grid6))
    f, g = random_step(grid6), random_step(grid6)
    check_linear(spec, f, g)
    check_adjoint(spec, f, g)


def test_bmo_of_constant(grid4):
    assert bmo_norm(StepFunction.constant(grid4, -2.0)) == 0.0


def test_bmo_of_root_haar(grid4):
    phi = StepFunction.indicator(grid4, DyadicNode(1, 0)) - StepFunction.indicator(grid4, DyadicNode(1, 1))
    assert bmo_norm(phi) == pytest.approx(1.0, rel=1e-14)


def test_bmo_monotone_under_truncation(grid6, random_step, rng):
    phi = random_step(grid6)
    kept = StepFunction.constant(grid6, phi.mean())
    for node in grid6.internal_nodes():
        if rng.random() < 0.5:
            kept = kept + mart_diff(phi, node)
    assert bmo_norm(kept) <= bmo_norm(phi) * (1.0 + 1e-12)


# =========================================================
# shift JSON
# =========================================================
def test_shift_json_round_trip(tmp_path, grid6, random_step):
    f = random_step(grid6)
    for spec in (gen_random_elementary(grid6, 1, 0, seed=1), gen_random_shift(grid6, 2, seed=1)):
        path = tmp_path / "spec.json"
        dump_shift_spec(spec, path)
        loaded = load_shift_spec(path)
        assert type(loaded) is type(spec)
        assert_allclose(loaded.apply(f).values, spec.apply(f).values, rtol=1e-14, atol=1e-14)


def test_shift_json_reports_first_bad_node(tmp_path):
    doc = {
        "kind": "general",
        "depth": 3,
        "n": 1,
        "entries": [
            {"Q": [1, 0], "kernel": [[1.0, 0.0], [0.0, 1.0]]},
            {"Q": [1, 1], "kernel": [[0.0, 3.0], [0.0, 0.0]]},
        ],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    with pytest.raises(NormalizationError) as exc:
        load_shift_spec(path)
    assert exc.value.detail["Q"] == "1/1"


def test_shift_json_schema_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"kind": "diagonal", "depth": 3, "n": 1}), encoding="utf-8")
    with pytest.raises(InputError):
        load_shift_spec(path)
