# -*- coding: utf-8 -*-
"""
remodel (CLI / Tool Runner)

d 维方体 -> 直线区间的重排：
- 随机级联权：均值保持（对所有方体 / 准孩子）+ A2 膨胀比 <= 4^(d-1)
- 随机 d 维 shift：重排后复杂度 = n d，活跃层 = d L，且与搬运交换
- 随机区间对上的嵌套单调性
- 可选 --dump-map：把 Φ 写成 JSON

python -m haarlab_1_0.tools_cli.remodel_run --d 2 --depth 3 --seed 3 --weights 50
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional, Sequence

import numpy as np

from haarlab_1_0.errors import InputError, MarginViolation
from haarlab_1_0.operators.shifts import apply_haar_shift
from haarlab_1_0.remodel.cubes import CubeFunction, apply_cube_shift, gen_cascade_weight_nd, gen_random_cube_shift
from haarlab_1_0.remodel.remodel import (
    RemodelMap,
    a2_inflation,
    average_defect,
    build_phi,
    dump_phi,
    inflation_bound,
    nesting_violations,
    remodel_shift,
    transfer_function,
)
from haarlab_1_0.tools_cli.run_config import (
    EXIT_MARGIN,
    EXIT_OK,
    build_run_config,
    cli_main,
    emit_json,
    pick,
    profile_section,
)

logger = logging.getLogger(__name__)

VERSION = "haarlab-cli/1.0.remodel"

AVERAGE_TOL = 1e-12
COMMUTE_TOL = 1e-10
NESTING_PAIRS = 2000


def shift_report(phi: RemodelMap, n: int, seed: int) -> Dict[str, Any]:
    grid = phi.cube_grid
    spec = gen_random_cube_shift(grid, n, seed=[seed, 1])
    rng = np.random.default_rng([seed, 2])
    f = CubeFunction(grid, rng.standard_normal(grid.n_cells))
    line = remodel_shift(phi, spec)
    lhs = transfer_function(phi, apply_cube_shift(spec, f)).values
    rhs = apply_haar_shift(line, transfer_function(phi, f)).values
    err = float(np.max(np.abs(lhs - rhs)))
    scale = max(1.0, float(np.max(np.abs(lhs))))
    expected_levels = [phi.d * L for L in spec.active_levels]
    return {
        "n": n,
        "remodeled_complexity": line.complexity,
        "active_levels": spec.active_levels,
        "remodeled_levels": line.active_levels,
        "commutation_error": err,
        "ok": line.complexity == n * phi.d and line.active_levels == expected_levels and err <= COMMUTE_TOL * scale,
    }


def tool_call(arguments: Dict[str, Any]) -> Dict[str, Any]:
    defaults = profile_section(arguments.get("profile"), "remodel")
    cfg = build_run_config("remodel", arguments, defaults)
    d = int(pick(arguments, defaults, "d", 2))
    depth = cfg.depth or 3
    count = int(pick(arguments, defaults, "weights", 10))
    delta = float(pick(arguments, defaults, "delta", 0.5))
    shift_n = int(pick(arguments, defaults, "shift_n", 1))
    dump_map = pick(arguments, defaults, "dump_map")
    if d < 1 or count < 0 or not 0 <= shift_n <= depth:
        raise InputError(f"need d >= 1, weights >= 0, 0 <= shift_n <= depth; got {d}, {count}, {shift_n}")

    phi = build_phi(d, depth, cfg.seed)
    bound = inflation_bound(d)
    logger.info("remodel d=%d cube depth=%d -> interval depth %d", d, depth, phi.depth)

    violations = 0
    witness = None
    max_ratio = 0.0
    max_defect = 0.0
    for i in range(count):
        rng = np.random.default_rng([cfg.seed, 3, i])
        w = gen_cascade_weight_nd(d, depth, delta * float(rng.uniform(0.2, 1.0)), seed=[cfg.seed, 4, i])
        try:
            rep = a2_inflation(phi, w)
            max_ratio = max(max_ratio, rep.ratio)
        except MarginViolation as e:
            violations += 1
            witness = witness or {"weight_index": i, **e.to_dict()}
        defect = average_defect(phi, w)
        max_defect = max(max_defect, defect / max(1.0, float(w.values.max())))
        measure = abs(float(np.sum(w.values)) - float(np.sum(transfer_function(phi, w).values)))
        if measure > AVERAGE_TOL * float(np.sum(w.values)):
            violations += 1
            witness = witness or {"weight_index": i, "measure_error": measure}
    if max_defect > AVERAGE_TOL:
        violations += 1

    nesting = nesting_violations(phi, NESTING_PAIRS, seed=[cfg.seed, 5])
    violations += nesting

    data: Dict[str, Any] = {
        "version": VERSION,
        "d": d,
        "cube_depth": depth,
        "interval_depth": phi.depth,
        "seed": cfg.seed,
        "weights": count,
        "inflation_bound": bound,
        "max_inflation_ratio": max_ratio,
        "max_average_defect": max_defect,
        "nesting_pairs": NESTING_PAIRS,
        "nesting_violations": nesting,
    }
    if shift_n > 0:
        data["shift"] = shift_report(phi, shift_n, cfg.seed)
        violations += 0 if data["shift"]["ok"] else 1
    if dump_map:
        dump_phi(phi, Path(dump_map))
        data["map_file"] = str(dump_map)
    data["violations"] = violations
    data["witness"] = witness
    return data


def add_arguments(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--d", dest="d", type=int, default=None)
    ap.add_argument("--depth", type=int, default=None, help="方体层数（区间深度 = d * depth）")
    ap.add_argument("--weights", type=int, default=None, help="随机级联权个数")
    ap.add_argument("--delta", type=float, default=None)
    ap.add_argument("--shift-n", dest="shift_n", type=int, default=None, help="0 = 跳过 shift 检查")
    ap.add_argument("--dump-map", dest="dump_map", type=Path, default=None)


def run(args: argparse.Namespace) -> int:
    data = tool_call(vars(args))
    emit_json({"ok": data["violations"] == 0, **data})
    return EXIT_MARGIN if data["violations"] else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    return cli_main("remodel", add_arguments, run, argv)


if __name__ == "__main__":
    sys.exit(main())
