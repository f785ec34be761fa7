# -*- coding: utf-8 -*-
"""
para-check (CLI / Tool Runner)

paraproduct 版主估计（系数 36）：随机 TreePara，alpha 只控制 g（常数 1/6）
统计口径与 verify-lemma 相同（LemmaTally）。

python -m haarlab_1_0.tools_cli.para_check --trees 1000 --seed 4
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from haarlab_1_0.bellman.candidates import BellmanCandidate, parse_candidate
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
from haarlab_1_0.tools_cli.verify_lemma import DEFAULT_A_MAX, LemmaTally, TreeOutcome, tree_params
from haarlab_1_0.transference.estimates import para_estimate_check
from haarlab_1_0.transference.models import TreePara
from haarlab_1_0.transference.modified import build_modified, verify_domains
from haarlab_1_0.transference.plank import plank_alpha_single
from haarlab_1_0.transference.random_trees import random_tree_para
from haarlab_1_0.transference.tree_io import tree_to_dict

logger = logging.getLogger(__name__)

VERSION = "haarlab-cli/1.0.para-check"

DEFAULT_CANDIDATE = "para-quadratic:scale=2"


def check_tree_para(i: int, tree: TreePara, candidate: BellmanCandidate) -> TreeOutcome:
    try:
        if not np.any(tree.g_diffs()):
            rep = para_estimate_check(tree, candidate, strict=False)
            return TreeOutcome(i, "degenerate" if rep.ok else "violation", report=rep)
        plank = plank_alpha_single(tree)
        mod = build_modified(tree, plank)
        dom = verify_domains(mod).to_dict()
        rep = para_estimate_check(tree, candidate, plank, strict=False)
    except CandidateGainError as e:
        return TreeOutcome(i, "rejected", witness=e.to_dict())
    except MarginViolation as e:
        return TreeOutcome(i, "violation", witness={**e.to_dict(), "tree": tree_to_dict(tree)})
    if not rep.ok:
        return TreeOutcome(i, "violation", rep, dom, witness={"report": rep.to_dict(), "tree": tree_to_dict(tree)})
    return TreeOutcome(i, "ok", rep, dom)


def tool_call(arguments: Dict[str, Any]) -> Dict[str, Any]:
    defaults = profile_section(arguments.get("profile"), "para_check")
    cfg = build_run_config("para-check", arguments, defaults)
    trees = int(pick(arguments, defaults, "trees", 100))
    n_max = int(pick(arguments, defaults, "n_max", 3))
    a_max = float(pick(arguments, defaults, "a_max", DEFAULT_A_MAX))
    text = str(pick(arguments, defaults, "candidate", DEFAULT_CANDIDATE))
    if trees < 1 or n_max < 1 or a_max < 1.0:
        raise InputError(f"need trees >= 1, n_max >= 1, a_max >= 1; got {trees}, {n_max}, {a_max}")
    if not parse_candidate(text).para:
        raise InputError(f"candidate {text!r} is not a para candidate")

    def run_one(i: int) -> TreeOutcome:
        n, A = tree_params(cfg.seed, i, n_max, a_max)
        tree = random_tree_para(n, A, seed=[cfg.seed, i])
        return check_tree_para(i, tree, parse_candidate(text, A))

    logger.info("para-check: %d trees, n <= %d, candidate %s", trees, n_max, text)
    with tolerance_overrides(cfg):
        outcomes: List[TreeOutcome] = ordered_map(run_one, list(range(trees)), cfg.threads)
    tally = LemmaTally()
    for out in outcomes:
        tally.add(out)
    if tally.rejected:
        logger.warning("para-check: candidate %s rejected on %d of %d trees, those trees are unchecked", text, tally.rejected, tally.trees)
    return {"version": VERSION, "candidate": text, "n_max": n_max, "a_max": a_max, "seed": cfg.seed, **tally.to_dict()}


def add_arguments(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--trees", type=int, default=None)
    ap.add_argument("--n-max", dest="n_max", type=int, default=None)
    ap.add_argument("--a-max", dest="a_max", type=float, default=None)
    ap.add_argument("--candidate", type=str, default=None, help="para-quadratic:scale=2")


def run(args: argparse.Namespace) -> int:
    data = tool_call(vars(args))
    emit_json(data)
    # 退出码只看余量违例；候选被拒体现在 ok / rejected_fraction
    return EXIT_MARGIN if data["violations"] else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    return cli_main("para-check", add_arguments, run, argv)


if __name__ == "__main__":
    sys.exit(main())
