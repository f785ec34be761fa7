# -*- coding: utf-8 -*-
"""
verify-lemma (CLI / Tool Runner)

对 N 棵随机鞅树逐棵跑：plank alpha -> 修正鞅 -> 定义域检查 -> 主估计（系数 72）
- 树 i 的深度、A、数据全部由 [seed, i] 决定，可并行，结果按 i 归并
- 候选 gain 失败计入 rejected（候选本身不合格，不是实现错误）；有被拒的树时 ok = false，退出码不变
- 任一余量 < -margin_tol 或链条断言失败 -> 退出码 4，并输出第一棵见证树

python -m haarlab_1_0.tools_cli.verify_lemma --trees 1000 --n-max 3 --candidate quadratic:scale=2 --seed 1
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from haarlab_1_0.bellman.candidates import BellmanCandidate, parse_candidate
from haarlab_1_0.config import settings
from haarlab_1_0.errors import CandidateGainError, InputError, MarginViolation
from haarlab_1_0.specnorm.scans import ordered_map
from haarlab_1_0.tools_cli.run_config import (
    EXIT_MARGIN,
    EXIT_OK,
    build_run_config,
    cli_main,
    emit_json,
    pick,
    profile_section,
    tolerance_overrides,
)
from haarlab_1_0.transference.estimates import EstimateReport, main_estimate_check, quadratic_stronger_check
from haarlab_1_0.transference.models import MartingaleTree
from haarlab_1_0.transference.modified import build_modified, verify_domains
from haarlab_1_0.transference.plank import plank_alpha
from haarlab_1_0.transference.random_trees import random_tree
from haarlab_1_0.transference.tree_io import tree_to_dict

logger = logging.getLogger(__name__)

VERSION = "haarlab-cli/1.0.verify-lemma"

DEFAULT_CANDIDATE = "quadratic:scale=2"
DEFAULT_A_MAX = 16.0


def tree_params(seed: int, i: int, n_max: int, a_max: float) -> tuple:
    """树 i 的 (n, A)：n 均匀于 [1, n_max]，log A 均匀于 [0, log a_max]"""
    rng = np.random.default_rng([seed, i, 0])
    n = int(rng.integers(1, n_max + 1))
    A = float(np.exp(rng.uniform(0.0, math.log(a_max))))
    return n, A


# =========================================================
# 逐树结果归并
# =========================================================
@dataclass
class TreeOutcome:
    index: int
    status: str  # ok / degenerate / rejected / violation
    report: Optional[EstimateReport] = None
    domain: Optional[dict] = None
    stronger_margin: Optional[float] = None
    witness: Optional[dict] = None


@dataclass
class LemmaTally:
    trees: int = 0
    degenerate: int = 0
    rejected: int = 0
    violations: int = 0
    worst: Dict[str, float] = field(default_factory=dict)
    witness: Optional[dict] = None

    def _min(self, key: str, value: float) -> None:
        if math.isfinite(value):
            self.worst[key] = min(self.worst.get(key, math.inf), value)

    def _max(self, key: str, value: float) -> None:
        if math.isfinite(value):
            self.worst[key] = max(self.worst.get(key, -math.inf), value)

    def add(self, out: TreeOutcome) -> None:
        self.trees += 1
        if out.status == "rejected":
            self.rejected += 1
        if out.status == "violation":
            self.violations += 1
            if self.witness is None:
                self.witness = {"tree_index": out.index, **(out.witness or {})}
        if out.status == "degenerate":
            self.degenerate += 1
        rep = out.report
        if rep is not None:
            self._min("margin", rep.margin)
            if rep.lhs > 0:
                self._min("rhs_over_lhs", rep.rhs / rep.lhs)
            if not rep.degenerate:
                self._min("first_step_margin", rep.first_step_margin)
                self._min("telescoping_margin", rep.telescoping_margin)
                self._min("final_diff_margin", rep.final_diff_margin)
                self._min("move_f", rep.move_f)
                self._min("move_g", rep.move_g)
                self._max("midpoint_error", rep.midpoint_error)
                self._max("product_error", rep.product_error)
        if out.domain is not None:
            self._max("max_uv_over_4A", out.domain["max_uv_over_4A"])
            self._max("max_segment_uv_over_4_5A", out.domain["max_segment_uv_over_4_5A"])
        if out.stronger_margin is not None:
            self._min("stronger_margin", out.stronger_margin)

    @property
    def checked(self) -> int:
        return self.trees - self.rejected

    @property
    def ok(self) -> bool:
        """候选被拒的树没有走完链条，也不算通过"""
        return self.violations == 0 and self.rejected == 0

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "trees": self.trees,
            "checked": self.checked,
            "degenerate": self.degenerate,
            "rejected": self.rejected,
            "rejected_fraction": self.rejected / self.trees if self.trees else 0.0,
            "violations": self.violations,
            "worst": dict(sorted(self.worst.items())),
            "witness": self.witness,
        }


def _violation_outcome(i: int, tree: MartingaleTree, e: MarginViolation, report=None) -> TreeOutcome:
    return TreeOutcome(i, "violation", report=report, witness={**e.to_dict(), "tree": tree_to_dict(tree)})


def check_tree(i: int, tree: MartingaleTree, candidate: BellmanCandidate) -> TreeOutcome:
    try:
        if tree.is_degenerate():
            rep = main_estimate_check(tree, candidate, strict=False)
            status = "degenerate" if rep.ok else "violation"
            return TreeOutcome(i, status, report=rep, witness=None if rep.ok else {"tree": tree_to_dict(tree)})
        plank = plank_alpha(tree)
        mod = build_modified(tree, plank)
        dom = verify_domains(mod).to_dict()
        rep = main_estimate_check(tree, candidate, plank, strict=False)
        stronger = None
        if candidate.kind == "quadratic":
            stronger = quadratic_stronger_check(tree, candidate, strict=False)[2]
    except CandidateGainError as e:
        logger.debug("tree %d: candidate rejected: %s", i, e)
        return TreeOutcome(i, "rejected", witness=e.to_dict())
    except MarginViolation as e:
        return _violation_outcome(i, tree, e)

    bad = not rep.ok or (stronger is not None and stronger < -settings.MARGIN_TOL * max(1.0, rep.rhs))
    if bad:
        return TreeOutcome(
            i, "violation", rep, dom, stronger,
            witness={"report": rep.to_dict(), "stronger_margin": stronger, "tree": tree_to_dict(tree)},
        )
    return TreeOutcome(i, "ok", rep, dom, stronger)


def tool_call(arguments: Dict[str, Any]) -> Dict[str, Any]:
    defaults = profile_section(arguments.get("profile"), "verify_lemma")
    cfg = build_run_config("verify-lemma", arguments, defaults)
    trees = int(pick(arguments, defaults, "trees", 100))
    n_max = int(pick(arguments, defaults, "n_max", 3))
    a_max = float(pick(arguments, defaults, "a_max", DEFAULT_A_MAX))
    text = str(pick(arguments, defaults, "candidate", DEFAULT_CANDIDATE))
    if trees < 1 or n_max < 1 or a_max < 1.0:
        raise InputError(f"need trees >= 1, n_max >= 1, a_max >= 1; got {trees}, {n_max}, {a_max}")
    # 先解析一次，名字 / 参数错误在建树前报出
    if parse_candidate(text).para:
        raise InputError(f"candidate {text!r} is a para candidate; use para-check")

    def run_one(i: int) -> TreeOutcome:
        n, A = tree_params(cfg.seed, i, n_max, a_max)
        tree = random_tree(n, A, seed=[cfg.seed, i])
        return check_tree(i, tree, parse_candidate(text, A))

    logger.info("verify-lemma: %d trees, n <= %d, A <= %g, candidate %s", trees, n_max, a_max, text)
    with tolerance_overrides(cfg):
        outcomes: List[TreeOutcome] = ordered_map(run_one, list(range(trees)), cfg.threads)
    tally = LemmaTally()
    for out in outcomes:
        tally.add(out)
    logger.info("verify-lemma: %d violations, %d rejected", tally.violations, tally.rejected)
    if tally.rejected:
        logger.warning("verify-lemma: candidate %s rejected on %d of %d trees, those trees are unchecked", text, tally.rejected, tally.trees)
    return {"version": VERSION, "candidate": text, "n_max": n_max, "a_max": a_max, "seed": cfg.seed, **tally.to_dict()}


def add_arguments(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--trees", type=int, default=None)
    ap.add_argument("--n-max", dest="n_max", type=int, default=None)
    ap.add_argument("--a-max", dest="a_max", type=float, default=None)
    ap.add_argument("--candidate", type=str, default=None, help="quadratic:scale=2 / dp:k=2")


def run(args: argparse.Namespace) -> int:
    data = tool_call(vars(args))
    emit_json(data)
    # 退出码只看余量违例；候选被拒体现在 ok / rejected_fraction
    return EXIT_MARGIN if data["violations"] else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    return cli_main("verify-lemma", add_arguments, run, argv)


if __name__ == "__main__":
    sys.exit(main())
