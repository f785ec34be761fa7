# -*- coding: utf-8 -*-
"""
HaarLab Tool Runner
- 统一入口：run_tool(name, args)
- 不走 subprocess，直接调用 tools_cli 各模块的 tool_call
"""

from __future__ import annotations

import traceback
from typing import Any, Callable, Dict

from haarlab_1_0.errors import HaarLabError
from haarlab_1_0.tools_cli import (
    bellman_check,
    multiplier_scan,
    norm_scan,
    para_check,
    remodel_run,
    verify_lemma,
)

VERSION = "haarlab-tools/1.0"

TOOLS: Dict[str, Callable[[Dict[str, Any]], Dict[str, Any]]] = {
    "norm_scan": norm_scan.tool_call,
    "verify_lemma": verify_lemma.tool_call,
    "remodel": remodel_run.tool_call,
    "bellman_check": bellman_check.tool_call,
    "para_check": para_check.tool_call,
    "multiplier_scan": multiplier_scan.tool_call,
}


# =========================================================
# 统一入口
# =========================================================
def run_tool(name: str, args: Dict[str, Any]) -> Dict[str, Any]:
    """
    统一执行入口：返回 {ok, data/error}
    """
    fn = TOOLS.get(name)
    if fn is None:
        return {"ok": False, "error": "UNKNOWN_TOOL", "detail": f"Unknown tool: {name}"}
    try:
        return {"ok": True, "data": fn(dict(args or {}))}
    except HaarLabError as e:
        return {
            "ok": False,
            "error": e.code,
            "detail": str(e),
            "witness": e.detail,
            "trace": traceback.format_exc(),
        }
    except Exception as e:
        return {
            "ok": False,
            "error": "TOOL_RUNTIME_ERROR",
            "detail": str(e),
            "trace": traceback.format_exc(),
        }
