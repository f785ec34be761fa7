# -*- coding: utf-8 -*-
"""
统一异常层级

所有异常都带可选 detail（dict），CLI / tool_runner 直接塞进 JSON 报告。
参数类错误同时继承 ValueError，方便调用方按内置类型捕获。
"""

from __future__ import annotations

from typing import Any, Dict, Optional


class HaarLabError(Exception):
    code = "HAARLAB_ERROR"

    def __init__(self, message: str, detail: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.detail: Dict[str, Any] = dict(detail or {})

    def to_dict(self) -> Dict[str, Any]:
        return {"error": self.code, "detail": str(self), **({"witness": self.detail} if self.detail else {})}


class InputError(HaarLabError, ValueError):
    """参数非法：alpha 越界、非正权、零符号等"""

    code = "INPUT_ERROR"


class GridError(HaarLabError, ValueError):
    """节点越出格点、网格不匹配、CSV 行数不是 2 的幂"""

    code = "GRID_ERROR"


class NormalizationError(HaarLabError, ValueError):
    """|sigma| > 1、Haar 对 sup 积 > 1、核 sup 超界；detail 带第一个违规节点"""

    code = "NORMALIZATION_ERROR"


class DomainError(HaarLabError, ValueError):
    """Bellman 点不在 Dom(B_A)、线段前置条件失败、d < 0、树不合法"""

    code = "DOMAIN_ERROR"


class DegenerateTreeError(HaarLabError, ValueError):
    code = "DEGENERATE_TREE"


class QuadraticFormError(HaarLabError, ValueError):
    code = "QUADRATIC_FORM_ERROR"


class ConvergenceError(HaarLabError):
    code = "NON_CONVERGENCE"


class CandidateGainError(HaarLabError):
    """候选 Bellman 函数在某个三元组上达不到声明的 gain"""

    code = "CANDIDATE_GAIN"


class MarginViolation(HaarLabError):
    """断言的不等式失败（出现即实现 bug）"""

    code = "MARGIN_VIOLATION"
