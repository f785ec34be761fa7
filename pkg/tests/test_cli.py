# -*- coding: utf-8 -*-
from __future__ import annotations

import argparse
import json
from dataclasses import replace

import numpy as np
import pytest

from haarlab_1_0.bellman import candidate_quadratic
from haarlab_1_0.config import load_profiles, settings
from haarlab_1_0.errors import CandidateGainError, InputError
from haarlab_1_0.tools.tool_runner import TOOLS, run_tool
from haarlab_1_0.tools.tool_schema import get_tools
from haarlab_1_0.tools_cli import haarlab, norm_scan, remodel_run
from haarlab_1_0.tools_cli.run_config import (
    EXIT_OK,
    EXIT_RUNTIME,
    EXIT_USAGE,
    RunConfig,
    build_run_config,
    run_guarded,
    tolerance_overrides,
)
from haarlab_1_0.tools_cli.verify_lemma import LemmaTally, check_tree
from haarlab_1_0.transference import MartingaleTree, random_tree


def stdout_json(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


# =========================================================
# 用法错误 -> 退出码 2
# =========================================================
def test_missing_seed_is_usage_error(capsys):
    code = haarlab.main(["norm-scan", "--depth", "4", "--trials", "1"])
    assert code == EXIT_USAGE
    data = stdout_json(capsys)
    assert data["ok"] is False
    assert data["error"] == "INPUT_ERROR"
    assert "seed" in data["detail"]


def test_bad_candidate_is_usage_error(capsys):
    code = haarlab.main(["verify-lemma", "--trees", "2", "--seed", "1", "--candidate", "cubic"])
    assert code == EXIT_USAGE
    assert stdout_json(capsys)["ok"] is False


def test_para_candidate_in_verify_lemma_is_usage_error(capsys):
    code = haarlab.main(["verify-lemma", "--trees", "2", "--seed", "1", "--candidate", "para-quadratic"])
    assert code == EXIT_USAGE
    capsys.readouterr()


def test_unknown_profile_is_usage_error(capsys):
    assert haarlab.main(["bellman-check", "--seed", "1", "--profile", "nope"]) == EXIT_USAGE
    assert "nope" in stdout_json(capsys)["detail"]


def test_unknown_subcommand_exits_with_argparse_code(capsys):
    assert haarlab.main(["frobnicate"]) == EXIT_USAGE
    capsys.readouterr()


def test_unexpected_error_maps_to_runtime_exit(capsys):
    def run(args):
        raise np.linalg.LinAlgError("SVD did not converge")

    code = run_guarded(run, argparse.Namespace(log_level=None))
    assert code == EXIT_RUNTIME
    data = stdout_json(capsys)
    assert data == {"ok": False, "error": "RUNTIME_ERROR", "detail": "LinAlgError: SVD did not converge"}


# =========================================================
# norm-scan
# =========================================================
NORM_ARGS = ["--depth", "5", "--complexities", "1,2", "--a2-targets", "1,4", "--trials", "2", "--seed", "7"]


def test_norm_scan_writes_csv_to_stdout(capsys):
    assert norm_scan.main(NORM_ARGS) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,a2,trial,norm,residual,method"
    assert len(lines) == 1 + 2 * 2 * 2


def test_norm_scan_is_reproducible(capsys):
    norm_scan.main(NORM_ARGS)
    first = capsys.readouterr().out
    norm_scan.main(NORM_ARGS + ["--threads", "3"])
    assert capsys.readouterr().out == first


def test_norm_scan_out_writes_csv_and_summary(tmp_path, capsys):
    out = tmp_path / "scan" / "norms.csv"
    assert haarlab.main(["norm-scan", *NORM_ARGS, "--out", str(out)]) == EXIT_OK
    data = stdout_json(capsys)
    assert data["ok"] is True
    assert data["files"] == [str(out), str(out.with_suffix(".json"))]
    assert out.read_text(encoding="utf-8").startswith("n,a2,trial,norm,residual,method\n")
    summary = json.loads(out.with_suffix(".json").read_text(encoding="utf-8"))
    assert summary["rows"] == 8
    assert summary["depth"] == 5


# =========================================================
# 其余子命令的小规模运行
# =========================================================
def test_remodel_small_run(tmp_path, capsys):
    map_file = tmp_path / "phi.json"
    code = haarlab.main(
        ["remodel", "--d", "2", "--depth", "2", "--weights", "3", "--seed", "3", "--dump-map", str(map_file)]
    )
    data = stdout_json(capsys)
    assert code == EXIT_OK
    assert data["ok"] is True
    assert data["interval_depth"] == 4
    assert data["max_inflation_ratio"] <= data["inflation_bound"] == 4.0
    assert data["shift"]["remodeled_complexity"] == 2
    assert json.loads(map_file.read_text(encoding="utf-8"))["d"] == 2


def test_remodel_rejects_shift_deeper_than_cubes():
    with pytest.raises(InputError):
        remodel_run.tool_call({"seed": 1, "d": 2, "depth": 2, "shift_n": 3})


def test_bellman_check_small_run(capsys):
    code = haarlab.main(
        ["bellman-check", "--samples", "2000", "--A", "4", "--seed", "2", "--candidate", "quadratic:scale=2"]
    )
    data = stdout_json(capsys)
    assert code == EXIT_OK
    assert data["segments"]["extremal_ratio"] == pytest.approx(9.0 / 8.0, abs=1e-6)
    assert data["segments"]["max_segment_ratio"] <= 9.0 / 8.0 + 1e-9
    assert data["candidate"]["accepted"] is True


def test_bellman_check_dp_concavity(capsys):
    code = haarlab.main(["bellman-check", "--samples", "500", "--seed", "2", "--dp-samples", "5", "--dp-res", "0.5"])
    data = stdout_json(capsys)
    assert code == EXIT_OK
    assert data["dp"]["ok"] is True


def test_verify_lemma_small_run(capsys):
    code = haarlab.main(["verify-lemma", "--trees", "20", "--n-max", "2", "--seed", "5", "--threads", "2"])
    data = stdout_json(capsys)
    assert code == EXIT_OK
    assert data["trees"] == 20
    assert data["violations"] == 0
    assert data["ok"] is True
    assert data["checked"] == 20


def test_rejected_candidate_is_not_reported_ok():
    tally = LemmaTally()
    overclaiming = replace(candidate_quadratic(2.0), gamma=50.0)
    for i in range(6):
        tree = random_tree(2, 4.0, seed=[18, i])
        cand = overclaiming if i % 2 else candidate_quadratic(2.0)
        tally.add(check_tree(i, tree, cand))
    data = tally.to_dict()
    assert data["rejected"] >= 1
    assert data["checked"] == 6 - data["rejected"]
    assert data["rejected_fraction"] == pytest.approx(data["rejected"] / 6)
    assert data["violations"] == 0
    assert data["ok"] is False


def test_para_check_small_run(capsys):
    code = haarlab.main(["para-check", "--trees", "20", "--n-max", "2", "--seed", "5"])
    data = stdout_json(capsys)
    assert code == EXIT_OK
    assert data["violations"] == 0


def test_multiplier_scan_small_run(capsys):
    code = haarlab.main(["multiplier-scan", "--depth", "6", "--alphas", "0,0.5", "--trials", "2", "--seed", "1", "--max-slope", "100"])
    data = stdout_json(capsys)
    assert code == EXIT_OK
    assert data["slope_ok"] is True
    assert [row["alpha"] for row in data["max_ratio_by_alpha"]] == [0.0, 0.5]


# =========================================================
# profile / 配置
# =========================================================
def test_profiles_load():
    profiles = load_profiles()
    assert {"quick", "acceptance", "strict"} <= set(profiles)
    assert profiles["quick"]["norm_scan"]["trials"] == 2


def test_command_line_beats_profile():
    cfg = build_run_config("norm-scan", {"seed": 1, "depth": 5}, {"depth": 6, "power_tol": 1e-7})
    assert isinstance(cfg, RunConfig)
    assert cfg.depth == 5
    assert cfg.power_tol == 1e-7


def test_tolerance_overrides_are_restored():
    before = settings.MARGIN_TOL
    cfg = build_run_config("verify-lemma", {"seed": 1, "margin_tol": 1e-3}, {})
    with tolerance_overrides(cfg):
        assert settings.MARGIN_TOL == 1e-3
    assert settings.MARGIN_TOL == before


def test_margin_tol_override_reaches_gain_check():
    # gamma 比真实 gain 大 1e-4 倍，只有放宽容差才能通过
    cand = replace(candidate_quadratic(2.0), gamma=1.0001)
    X1 = np.array([1.0, 1.0, 1.0, 1.0, 1.0, 1.0])
    X2 = np.array([-1.0, -1.0, 1.0, 1.0, 1.0, 1.0])
    with pytest.raises(CandidateGainError):
        cand.check_gain(X1, X2)
    cfg = build_run_config("verify-lemma", {"seed": 1, "margin_tol": 1e-3}, {})
    with tolerance_overrides(cfg):
        assert cand.check_gain(X1, X2) < 0.0
    with pytest.raises(CandidateGainError):
        cand.check_gain(X1, X2)


def test_rel_tol_override_reaches_degeneracy_test():
    leaves = np.array([[0.5 + 1e-6, -0.5, 1.0, 1.0, 1.0, 1.0], [0.5 - 1e-6, -0.5, 1.0, 1.0, 1.0, 1.0]])
    tree = MartingaleTree.from_leaves(2.0, leaves)
    assert not tree.is_degenerate()
    cfg = build_run_config("verify-lemma", {"seed": 1, "rel_tol": 1e-2}, {})
    with tolerance_overrides(cfg):
        assert tree.is_degenerate()
    assert not tree.is_degenerate()


# =========================================================
# Tool Runner / schema
# =========================================================
def test_tool_schema_matches_runner():
    tools = get_tools()
    assert len(tools) == 6
    names = {t["function"]["name"] for t in tools}
    assert names == set(TOOLS)
    for t in tools:
        assert "seed" in t["function"]["parameters"]["required"]


def test_run_tool_ok():
    res = run_tool("bellman_check", {"seed": 1, "samples": 500})
    assert res["ok"] is True
    assert res["data"]["failures"] == 0


def test_run_tool_unknown():
    res = run_tool("nope", {})
    assert res == {"ok": False, "error": "UNKNOWN_TOOL", "detail": "Unknown tool: nope"}


def test_run_tool_reports_error_code():
    res = run_tool("remodel", {"d": 2})
    assert res["ok"] is False
    assert res["error"] == "INPUT_ERROR"
