# -*- coding: utf-8 -*-
"""
HaarLab Tool Schema
- 提供 tools 列表（function calling schema），与 tools_cli 子命令一一对应
"""

from __future__ import annotations

from typing import Any, Dict, List

VERSION = "haarlab-tools/1.0"

_COMMON = {
    "seed": {"type": "integer", "description": "随机种子（必填）"},
    "profile": {"type": ["string", "null"], "description": "profiles.yaml 里的 profile：quick / acceptance / strict"},
    "threads": {"type": ["integer", "null"], "description": "并行线程数（缺省 HAARLAB_THREADS）"},
    "power_tol": {"type": ["number", "null"]},
    "rel_tol": {"type": ["number", "null"]},
    "margin_tol": {"type": ["number", "null"]},
}


def _tool(name: str, description: str, properties: Dict[str, Any]) -> Dict[str, Any]:
    return {
        "type": "function",
        "function": {
            "name": name,
            "description": description,
            "parameters": {
                "type": "object",
                "properties": {**properties, **_COMMON},
                "required": ["seed"],
                "additionalProperties": False,
            },
        },
    }


def get_tools() -> List[Dict[str, Any]]:
    """
    返回：可注册的 tool schema 列表
    """
    return [
        _tool(
            "norm_scan",
            "随机 Haar shift 在级联 A2 权上的加权算子范数扫描，返回 CSV 与摘要（fitted_C、log-log 斜率）。",
            {
                "depth": {"type": ["integer", "null"], "description": "格点深度（叶子 2^depth）"},
                "complexities": {"type": ["string", "null"], "description": "复杂度列表，例如 1,2,3"},
                "a2_targets": {"type": ["string", "null"], "description": "A2 目标列表，例如 1,4,16"},
                "trials": {"type": ["integer", "null"]},
                "out": {"type": ["string", "null"], "description": "CSV 路径；摘要写同名 .json"},
            },
        ),
        _tool(
            "verify_lemma",
            "随机鞅树上验证 plank 泛函、修正鞅与主估计（系数 72），返回最差余量与见证树。",
            {
                "trees": {"type": ["integer", "null"]},
                "n_max": {"type": ["integer", "null"]},
                "a_max": {"type": ["number", "null"]},
                "candidate": {"type": ["string", "null"], "description": "quadratic:scale=2 或 dp:k=2"},
            },
        ),
        _tool(
            "remodel",
            "d 维方体到直线区间的重排：均值保持、A2 膨胀比 <= 4^(d-1)、shift 复杂度 n -> n d。",
            {
                "d": {"type": ["integer", "null"]},
                "depth": {"type": ["integer", "null"], "description": "方体层数"},
                "weights": {"type": ["integer", "null"]},
                "delta": {"type": ["number", "null"]},
                "shift_n": {"type": ["integer", "null"]},
                "dump_map": {"type": ["string", "null"]},
            },
        ),
        _tool(
            "bellman_check",
            "Bellman 定义域线段引理（max uv <= 9A/8）、候选 gain 抽样、DP 凹性检查。",
            {
                "samples": {"type": ["integer", "null"]},
                "A": {"type": ["number", "null"]},
                "candidate": {"type": ["string", "null"]},
                "dp_samples": {"type": ["integer", "null"]},
                "dp_k": {"type": ["integer", "null"]},
                "dp_res": {"type": ["number", "null"]},
            },
        ),
        _tool(
            "para_check",
            "paraproduct 版主估计（系数 36）：随机 Carleson 树上验证。",
            {
                "trees": {"type": ["integer", "null"]},
                "n_max": {"type": ["integer", "null"]},
                "a_max": {"type": ["number", "null"]},
                "candidate": {"type": ["string", "null"], "description": "para-quadratic:scale=2"},
            },
        ),
        _tool(
            "multiplier_scan",
            "幂权族上乘子双线性比值对 [w] 的 log-log 斜率。",
            {
                "depth": {"type": ["integer", "null"]},
                "alphas": {"type": ["string", "null"], "description": "例如 0,0.2,0.4"},
                "trials": {"type": ["integer", "null"]},
                "max_slope": {"type": ["number", "null"]},
                "out": {"type": ["string", "null"]},
            },
        ),
    ]
