# -*- coding: utf-8 -*-
"""
haarlab 总入口

python -m haarlab_1_0.tools_cli.haarlab <subcommand> [flags]

子命令：norm-scan / verify-lemma / remodel / bellman-check / para-check / multiplier-scan
每个子命令也能单独跑：python -m haarlab_1_0.tools_cli.<module>
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from haarlab_1_0 import VERSION
from haarlab_1_0.tools_cli import (
    bellman_check,
    multiplier_scan,
    norm_scan,
    para_check,
    remodel_run,
    verify_lemma,
)
from haarlab_1_0.tools_cli.run_config import add_common_arguments, run_guarded

SUBCOMMANDS = {
    "norm-scan": norm_scan,
    "verify-lemma": verify_lemma,
    "remodel": remodel_run,
    "bellman-check": bellman_check,
    "para-check": para_check,
    "multiplier-scan": multiplier_scan,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="haarlab", description="dyadic Haar shift / A2 / Bellman workbench")
    ap.add_argument("--version", action="version", version=VERSION)
    sub = ap.add_subparsers(dest="subcommand", required=True)
    for name, module in SUBCOMMANDS.items():
        sp = sub.add_parser(name, help=(module.__doc__ or "").strip().splitlines()[0])
        module.add_arguments(sp)
        add_common_arguments(sp)
        sp.set_defaults(_run=module.run)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    return run_guarded(args._run, args)


if __name__ == "__main__":
    sys.exit(main())
