# -*- coding: utf-8 -*-
from __future__ import annotations

import numpy as np
import pytest

from haarlab_1_0.bellman import (
    BellmanPoint,
    GridSpec,
    QuadraticForm,
    admissible_splits,
    candidate_para_quadratic,
    candidate_quadratic,
    dp_bellman,
    dp_concavity_check,
    extremal_segment,
    in_domain,
    parse_candidate,
    quadratic_gain_split,
    sample_gain_check,
    sample_valid_segments,
    segment_max_uv,
    segment_max_uv_batch,
)
from haarlab_1_0.errors import CandidateGainError, DomainError, InputError, QuadraticFormError


# =========================================================
# 定义域 / 线段
# =========================================================
def test_in_domain_basic():
    assert in_domain(BellmanPoint(0.0, 0.0, 1.0, 1.0, 1.0, 1.0), 1.0)
    # f^2 > F v
    assert not in_domain(BellmanPoint(2.0, 0.0, 1.0, 1.0, 1.0, 1.0), 4.0)
    # uv > A
    assert not in_domain(BellmanPoint(0.0, 0.0, 1.0, 1.0, 3.0, 3.0), 4.0)
    # uv < 1
    assert not in_domain(BellmanPoint(0.0, 0.0, 1.0, 1.0, 0.5, 0.5), 4.0)


@pytest.mark.parametrize("A", [1.0, 4.0, 16.0])
def test_extremal_segment_reaches_nine_eighths(A):
    xm, xp = extremal_segment(A)
    assert segment_max_uv(xm, xp, A=A) / A == pytest.approx(9.0 / 8.0, abs=1e-6)


def test_random_valid_segments_stay_below_nine_eighths():
    rng = np.random.default_rng(5)
    A = 4.0
    um, up = sample_valid_segments(20000, A, rng)
    assert um.shape == up.shape == (20000, 2)
    best, t = segment_max_uv_batch(um, up)
    assert np.all(best <= 9.0 / 8.0 * A * (1.0 + 1e-12))
    assert np.all((t >= 0.0) & (t <= 1.0))


def test_segment_max_matches_grid_search():
    xm = BellmanPoint(0.0, 0.0, 1.0, 1.0, 0.3, 5.0)
    xp = BellmanPoint(0.0, 0.0, 1.0, 1.0, 4.0, 0.4)
    t = np.linspace(0.0, 1.0, 200001)
    brute = float(np.max((0.3 + t * 3.7) * (5.0 - t * 4.6)))
    assert segment_max_uv(xm, xp) == pytest.approx(brute, rel=1e-9)


def test_segment_precondition_failure():
    xm = BellmanPoint(0.0, 0.0, 1.0, 1.0, 1.0, 1.0)
    xp = BellmanPoint(0.0, 0.0, 1.0, 1.0, 3.0, 3.0)
    with pytest.raises(DomainError) as exc:
        segment_max_uv(xm, xp, A=4.0)
    assert exc.value.detail["point"] == "X_plus"


# =========================================================
# DP
# =========================================================
def test_dp_depth_one_at_unit_point():
    X = BellmanPoint(0.0, 0.0, 1.0, 1.0, 1.0, 1.0)
    assert dp_bellman(X, 4.0, 1) == pytest.approx(4.0, rel=1e-12)


def test_dp_depth_zero_is_zero():
    assert dp_bellman(BellmanPoint(0.3, -0.2, 1.0, 1.0, 1.0, 2.0), 4.0, 0) == 0.0


def test_dp_rejects_point_outside_domain():
    with pytest.raises(DomainError):
        dp_bellman(BellmanPoint(0.0, 0.0, 1.0, 1.0, 3.0, 3.0), 4.0, 1)


def test_dp_rejects_depth_out_of_range():
    with pytest.raises(InputError):
        dp_bellman(BellmanPoint(0.0, 0.0, 1.0, 1.0, 1.0, 1.0), 4.0, 7)


def test_admissible_splits_keep_both_halves_in_domain():
    X = np.array([0.2, -0.1, 1.0, 1.5, 1.2, 1.5])
    A = 4.0
    D = admissible_splits(X, A, GridSpec(0.5).resolved(2))
    assert np.any(np.all(D == 0.0, axis=1))
    for d in D:
        assert in_domain(X + d, A, tol=1e-9)
        assert in_domain(X - d, A, tol=1e-9)


def test_dp_is_monotone_in_depth():
    X = np.array([0.1, 0.2, 1.0, 1.0, 1.0, 1.5])
    spec = GridSpec(0.5)
    b1 = dp_bellman(X, 4.0, 1, spec)
    b2 = dp_bellman(X, 4.0, 2, spec)
    assert b2 >= b1 - 1e-12


def test_dp_concavity_check_passes_at_depth_one():
    rep = dp_concavity_check(4.0, 1, GridSpec(0.25), samples=20, seed=3)
    assert rep.ok
    assert rep.to_dict()["ok"] is True
    assert rep.max_range_ratio > 0.0


def test_grid_spec_validation():
    with pytest.raises(InputError):
        GridSpec(1.5)
    with pytest.raises(InputError):
        GridSpec(0.5, f_points=1)
    assert GridSpec().resolved(1).res == 0.05
    assert GridSpec().resolved(2).res == 0.5


# =========================================================
# 候选
# =========================================================
def test_quadratic_candidate_gain_holds():
    cand = candidate_quadratic(2.0)
    assert cand.gamma == 1.0
    assert sample_gain_check(cand, 2000, 4.0, seed=1) >= -1e-9


def test_para_candidate_gain_holds():
    cand = candidate_para_quadratic(2.0)
    assert cand.para and cand.width == 7
    assert sample_gain_check(cand, 2000, 4.0, seed=2) >= -1e-9


def test_candidate_overclaiming_gain_is_rejected():
    base = candidate_quadratic(2.0)
    greedy = type(base)("greedy", base.A, 5.0, base.evaluate)
    with pytest.raises(CandidateGainError) as exc:
        sample_gain_check(greedy, 500, 4.0, seed=1)
    assert set(exc.value.detail) >= {"X1", "X2", "margin"}


def test_para_candidate_needs_parent_M():
    cand = candidate_para_quadratic(1.0)
    X = np.array([[0.1, 0.1, 1.0, 1.0, 1.0, 1.0, 0.2]])
    with pytest.raises(InputError):
        cand.gain_margins(X, X)


@pytest.mark.parametrize(
    "text,kind,para",
    [
        ("quadratic:scale=3", "quadratic", False),
        ("quadratic", "quadratic", False),
        ("para-quadratic:scale=1", "para-quadratic", True),
        ("dp:k=1,res=0.25", "dp", False),
    ],
)
def test_parse_candidate(text, kind, para):
    cand = parse_candidate(text, 2.0)
    assert cand.kind == kind
    assert cand.para is para


def test_dp_candidate_works_on_grown_domain():
    cand = parse_candidate("dp:k=1,res=0.25", 2.0)
    assert cand.A == pytest.approx(9.0)
    assert cand(BellmanPoint(0.0, 0.0, 1.0, 1.0, 1.0, 1.0)) == pytest.approx(4.0)


@pytest.mark.parametrize("text", ["cubic", "quadratic:scale=abc", "quadratic:size=2", "dp:k=9", "quadratic:scale"])
def test_parse_candidate_errors(text):
    with pytest.raises(InputError):
        parse_candidate(text)


# =========================================================
# 二次型
# =========================================================
def test_quadratic_split_diagonal():
    assert quadratic_gain_split(QuadraticForm.from_xy(4.0, 0.0, 1.0)) == pytest.approx(2.0)


def test_quadratic_split_failure_has_witness():
    Q = QuadraticForm.from_xy(1.0, 0.0, 0.0)
    with pytest.raises(QuadraticFormError) as exc:
        quadratic_gain_split(Q)
    w = np.array(exc.value.detail["witness"])
    assert Q(w) < 2.0 * abs(w[0] * w[1])


def test_quadratic_split_with_extra_variable():
    # Q = 2x^2 + 2y^2 + z^2 + 2xz：对 z 极小化后是 x^2 + 2y^2
    m = np.array([[2.0, 0.0, 1.0], [0.0, 2.0, 0.0], [1.0, 0.0, 1.0]])
    Q = QuadraticForm(m, ("x", "y", "z"))
    alpha = quadratic_gain_split(Q)
    assert alpha == pytest.approx(np.sqrt(0.5))
    rng = np.random.default_rng(0)
    for v in rng.standard_normal((200, 3)):
        assert Q(v) >= alpha * v[0] ** 2 + v[1] ** 2 / alpha - 1e-10


def test_quadratic_unbounded_in_other_variables():
    m = np.array([[2.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, -1.0]])
    with pytest.raises(QuadraticFormError):
        quadratic_gain_split(QuadraticForm(m, ("x", "y", "z")))


def test_quadratic_form_validation():
    with pytest.raises(InputError):
        QuadraticForm(np.array([[1.0, 2.0], [0.0, 1.0]]), ("x", "y"))
    with pytest.raises(InputError):
        QuadraticForm(np.eye(2), ("x", "x"))
