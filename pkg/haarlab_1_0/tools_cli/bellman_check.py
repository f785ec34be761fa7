# -*- coding: utf-8 -*-
"""
bellman-check (CLI / Tool Runner)

1. 极值线段：max uv / A 应为 9/8
2. 随机合法线段（端点 uv ∈ [1, A]、中点 uv <= A）：max uv <= 9A/8
3. 可选 --candidate：在 Dom(B_A) 内抽样检查候选声明的 gain
4. 可选 --dp-samples：DP Bellman 的单调性与格点内中点凹性

python -m haarlab_1_0.tools_cli.bellman_check --samples 100000 --A 4 --seed 2
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Dict, Optional, Sequence

import numpy as np

from haarlab_1_0.bellman.candidates import parse_candidate, sample_gain_check
from haarlab_1_0.bellman.domain import extremal_segment, sample_valid_segments, segment_max_uv, segment_max_uv_batch
from haarlab_1_0.bellman.dp import GridSpec, dp_concavity_check
from haarlab_1_0.errors import CandidateGainError, InputError
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

logger = logging.getLogger(__name__)

VERSION = "haarlab-cli/1.0.bellman-check"

SEGMENT_FACTOR = 9.0 / 8.0
SEGMENT_TOL = 1e-9


def segment_report(samples: int, A: float, seed: int) -> Dict[str, Any]:
    xm, xp = extremal_segment(A)
    extremal = segment_max_uv(xm.as_array(), xp.as_array(), A=A)

    rng = np.random.default_rng([seed, 0])
    um, up = sample_valid_segments(samples, A, rng)
    best, t_best = segment_max_uv_batch(um, up)
    ratio = best / A
    j = int(np.argmax(ratio))
    over = np.flatnonzero(best > SEGMENT_FACTOR * A + SEGMENT_TOL)
    out: Dict[str, Any] = {
        "samples": samples,
        "extremal_max_uv": extremal,
        "extremal_ratio": extremal / A,
        "max_segment_uv": float(best[j]),
        "max_segment_ratio": float(ratio[j]),
        "bound": SEGMENT_FACTOR * A,
        "violations": int(over.size),
        "worst": {"uv_minus": um[j].tolist(), "uv_plus": up[j].tolist(), "t": float(t_best[j])},
    }
    return out


def tool_call(arguments: Dict[str, Any]) -> Dict[str, Any]:
    defaults = profile_section(arguments.get("profile"), "bellman_check")
    cfg = build_run_config("bellman-check", arguments, defaults)
    samples = int(pick(arguments, defaults, "samples", 10000))
    A = float(pick(arguments, defaults, "A", 4.0))
    text = pick(arguments, defaults, "candidate")
    dp_samples = int(pick(arguments, defaults, "dp_samples", 0))
    dp_k = int(pick(arguments, defaults, "dp_k", 1))
    dp_res = pick(arguments, defaults, "dp_res")
    if samples < 1 or A < 1.0:
        raise InputError(f"need samples >= 1 and A >= 1, got {samples}, {A}")

    with tolerance_overrides(cfg):
        data: Dict[str, Any] = {"version": VERSION, "A": A, "seed": cfg.seed}
        data["segments"] = segment_report(samples, A, cfg.seed)
        failures = data["segments"]["violations"]

        if text:
            cand = parse_candidate(str(text), A)
            try:
                margin = sample_gain_check(cand, samples, A, seed=[cfg.seed, 1])
                data["candidate"] = {"name": cand.name, "accepted": True, "min_margin": margin}
            except CandidateGainError as e:
                data["candidate"] = {"name": cand.name, "accepted": False, **e.to_dict()}

        if dp_samples > 0:
            spec = GridSpec(float(dp_res) if dp_res is not None else None)
            rep = dp_concavity_check(A, dp_k, spec, samples=dp_samples, seed=[cfg.seed, 2])
            data["dp"] = {**rep.to_dict(), "ok": rep.ok}
            failures += 0 if rep.ok else 1

    data["failures"] = failures
    logger.info("bellman-check: max segment ratio %.9g", data["segments"]["max_segment_ratio"])
    return data


def add_arguments(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--samples", type=int, default=None)
    ap.add_argument("--A", dest="A", type=float, default=None)
    ap.add_argument("--candidate", type=str, default=None)
    ap.add_argument("--dp-samples", dest="dp_samples", type=int, default=None)
    ap.add_argument("--dp-k", dest="dp_k", type=int, default=None)
    ap.add_argument("--dp-res", dest="dp_res", type=float, default=None)


def run(args: argparse.Namespace) -> int:
    data = tool_call(vars(args))
    emit_json({"ok": data["failures"] == 0, **data})
    return EXIT_MARGIN if data["failures"] else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    return cli_main("bellman-check", add_arguments, run, argv)


if __name__ == "__main__":
    sys.exit(main())
