# -*- coding: utf-8 -*-
"""
norm-scan (CLI / Tool Runner)

随机紧归一化 Haar shift 在级联 A2 权上的加权范数扫描：
- 行数 = len(complexities) * len(a2_targets) * trials
- 无 --out：CSV 写 stdout；有 --out：CSV 写 out，摘要 JSON 写 out 同名 .json
- 任意一行幂迭代不收敛 -> 退出码 3（文件照常写出）

python -m haarlab_1_0.tools_cli.norm_scan --depth 8 --complexities 1,2,3 --a2-targets 1,4,16 --trials 5 --seed 7
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from haarlab_1_0.config import settings
from haarlab_1_0.core.dyadic import DyadicGrid
from haarlab_1_0.specnorm.scans import complexity_scan
from haarlab_1_0.tools_cli.run_config import (
    EXIT_NONCONVERGENCE,
    EXIT_OK,
    build_run_config,
    cli_main,
    dumps,
    parse_float_list,
    parse_int_list,
    pick,
    profile_section,
    tolerance_overrides,
)
from haarlab_1_0.weights.weights import gen_random_a2

logger = logging.getLogger(__name__)

VERSION = "haarlab-cli/1.0.norm-scan"


def tool_call(arguments: Dict[str, Any]) -> Dict[str, Any]:
    defaults = profile_section(arguments.get("profile"), "norm_scan")
    cfg = build_run_config("norm-scan", arguments, defaults)
    depth = cfg.depth or settings.DEFAULT_DEPTH
    complexities = parse_int_list(pick(arguments, defaults, "complexities", "1,2,3"))
    targets = parse_float_list(pick(arguments, defaults, "a2_targets", "1,4,16"))
    trials = int(pick(arguments, defaults, "trials", 5))

    grid = DyadicGrid(depth)
    weights = [gen_random_a2(grid, t, seed=[cfg.seed, i]) for i, t in enumerate(targets)]
    logger.info("norm-scan depth=%d n=%s targets=%s trials=%d", depth, complexities, targets, trials)
    with tolerance_overrides(cfg):
        report = complexity_scan(
            grid,
            complexities,
            weights,
            trials,
            cfg.seed,
            tol=settings.POWER_TOL,
            threads=cfg.threads,
        )

    summary = {
        "version": VERSION,
        "depth": depth,
        "complexities": complexities,
        "a2_targets": targets,
        "trials": trials,
        **report.summary(),
    }
    csv_text = report.to_csv()
    files = []
    if cfg.out is not None:
        out = Path(cfg.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(csv_text, encoding="utf-8")
        summary_path = out.with_suffix(".json")
        summary_path.write_text(dumps(summary) + "\n", encoding="utf-8")
        files = [str(out), str(summary_path)]
    return {"summary": summary, "csv": csv_text, "files": files}


def add_arguments(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--depth", type=int, default=None)
    ap.add_argument("--complexities", type=str, default=None, help="逗号分隔，例如 1,2,3")
    ap.add_argument("--a2-targets", dest="a2_targets", type=str, default=None, help="逗号分隔，例如 1,4,16")
    ap.add_argument("--trials", type=int, default=None)
    ap.add_argument("--out", type=Path, default=None)


def run(args: argparse.Namespace) -> int:
    data = tool_call(vars(args))
    if data["files"]:
        sys.stdout.write(dumps({"ok": True, "files": data["files"], **data["summary"]}) + "\n")
    else:
        sys.stdout.write(data["csv"])
    if not data["summary"]["all_converged"]:
        logger.error("power iteration did not converge on every row")
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    return cli_main("norm-scan", add_arguments, run, argv)


if __name__ == "__main__":
    sys.exit(main())
