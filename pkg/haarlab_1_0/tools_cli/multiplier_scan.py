# -*- coding: utf-8 -*-
"""
multiplier-scan (CLI / Tool Runner)

幂权 x^alpha 上乘子双线性比值的扫描：每个 alpha 取 trials 对随机 (f, g) 的最大比值，
对 [w] 做 log-log 回归；斜率超过 --max-slope（缺省 1.1）-> 退出码 4

python -m haarlab_1_0.tools_cli.multiplier_scan --depth 10 --alphas 0,0.2,0.4,0.6,0.8 --trials 50 --seed 5
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

from haarlab_1_0.core.dyadic import DyadicGrid
from haarlab_1_0.config import settings
from haarlab_1_0.specnorm.scans import witt_scan
from haarlab_1_0.tools_cli.run_config import (
    EXIT_MARGIN,
    EXIT_OK,
    build_run_config,
    cli_main,
    dumps,
    parse_float_list,
    pick,
    profile_section,
)

logger = logging.getLogger(__name__)

VERSION = "haarlab-cli/1.0.multiplier-scan"

DEFAULT_MAX_SLOPE = 1.1


def tool_call(arguments: Dict[str, Any]) -> Dict[str, Any]:
    defaults = profile_section(arguments.get("profile"), "multiplier_scan")
    cfg = build_run_config("multiplier-scan", arguments, defaults)
    depth = cfg.depth or settings.DEFAULT_DEPTH
    alphas = parse_float_list(pick(arguments, defaults, "alphas", "0,0.2,0.4,0.6,0.8"))
    trials = int(pick(arguments, defaults, "trials", 20))
    max_slope = float(pick(arguments, defaults, "max_slope", DEFAULT_MAX_SLOPE))

    report = witt_scan(DyadicGrid(depth), alphas, trials, cfg.seed, threads=cfg.threads)
    best = report.max_ratio_by_alpha()
    summary = {
        "version": VERSION,
        "depth": depth,
        "alphas": alphas,
        "trials": trials,
        "seed": cfg.seed,
        **report.summary(),
        "max_ratio_by_alpha": [{"alpha": a, "a2": v[0], "max_ratio": v[1]} for a, v in sorted(best.items())],
        "max_slope": max_slope,
        "slope_ok": report.fitted_slope is None or report.fitted_slope <= max_slope,
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
    ap.add_argument("--alphas", type=str, default=None, help="逗号分隔，|alpha| < 1")
    ap.add_argument("--trials", type=int, default=None)
    ap.add_argument("--max-slope", dest="max_slope", type=float, default=None)
    ap.add_argument("--out", type=Path, default=None)


def run(args: argparse.Namespace) -> int:
    data = tool_call(vars(args))
    summary = data["summary"]
    sys.stdout.write(dumps({"ok": summary["slope_ok"], "files": data["files"], **summary}) + "\n")
    return EXIT_OK if summary["slope_ok"] else EXIT_MARGIN


def main(argv: Optional[Sequence[str]] = None) -> int:
    return cli_main("multiplier-scan", add_arguments, run, argv)


if __name__ == "__main__":
    sys.exit(main())
