# -*- coding: utf-8 -*-
"""
子命令公共部分

- RunConfig：pydantic 校验（随机子命令必须给 seed）
- 参数取值顺序：命令行显式值 > --profile 里的缺省 > 代码缺省
- 退出码：0 通过 / 2 用法 / 3 不收敛 / 4 不等式失败
- stdout 只写 JSON（norm-scan 无 --out 时写 CSV），日志走 stderr
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from haarlab_1_0.config import load_profiles, settings
from haarlab_1_0.errors import ConvergenceError, HaarLabError, InputError, MarginViolation

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3
EXIT_MARGIN = 4
# 库外异常（numpy LinAlgError 等）
EXIT_RUNTIME = 5

# RunConfig 字段 -> settings 常量
TOLERANCE_FIELDS = {"power_tol": "POWER_TOL", "rel_tol": "REL_TOL", "margin_tol": "MARGIN_TOL"}


class RunConfig(BaseModel):
    subcommand: str
    seed: int
    depth: Optional[int] = Field(default=None, ge=1)
    power_tol: Optional[float] = Field(default=None, gt=0)
    rel_tol: Optional[float] = Field(default=None, gt=0)
    margin_tol: Optional[float] = Field(default=None, ge=0)
    out: Optional[Path] = None
    threads: Optional[int] = Field(default=None, ge=1)
    profile: Optional[str] = None


def profile_section(profile: Optional[str], section: str) -> Dict[str, Any]:
    if not profile:
        return {}
    profiles = load_profiles()
    if profile not in profiles:
        raise InputError(f"unknown profile {profile!r}, expected one of {sorted(profiles)}")
    out = dict(profiles[profile].get(section) or {})
    for key, val in (profiles[profile].get("tolerances") or {}).items():
        out.setdefault(key, val)
    return out


def pick(arguments: Dict[str, Any], defaults: Dict[str, Any], key: str, fallback: Any = None) -> Any:
    val = arguments.get(key)
    if val is not None:
        return val
    return defaults.get(key, fallback)


def build_run_config(subcommand: str, arguments: Dict[str, Any], defaults: Dict[str, Any]) -> RunConfig:
    raw = {"subcommand": subcommand, "profile": arguments.get("profile")}
    for key in ("seed", "depth", "out", "threads", *TOLERANCE_FIELDS):
        val = pick(arguments, defaults, key)
        if val is not None:
            raw[key] = val
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as e:
        err = e.errors()[0]
        where = ".".join(str(x) for x in err["loc"])
        raise InputError(f"{subcommand}: {where}: {err['msg']}") from e


@contextmanager
def tolerance_overrides(cfg: RunConfig) -> Iterator[None]:
    """运行期间临时改 settings 容差，结束后还原"""
    saved = {}
    try:
        for field_name, const in TOLERANCE_FIELDS.items():
            val = getattr(cfg, field_name)
            if val is not None:
                saved[const] = getattr(settings, const)
                setattr(settings, const, float(val))
        yield
    finally:
        for const, val in saved.items():
            setattr(settings, const, val)


def parse_int_list(text: Any) -> List[int]:
    if isinstance(text, (list, tuple)):
        return [int(x) for x in text]
    try:
        return [int(x) for x in str(text).split(",") if x.strip()]
    except ValueError as e:
        raise InputError(f"expected comma separated integers, got {text!r}") from e


def parse_float_list(text: Any) -> List[float]:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError as e:
        raise InputError(f"expected comma separated numbers, got {text!r}") from e


# =========================================================
# argparse / main 包装
# =========================================================
def add_common_arguments(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--seed", type=int, default=None, help="随机种子（随机子命令必填）")
    ap.add_argument("--profile", type=str, default=None, help="config/profiles.yaml 里的 profile 名")
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--power-tol", dest="power_tol", type=float, default=None)
    ap.add_argument("--rel-tol", dest="rel_tol", type=float, default=None)
    ap.add_argument("--margin-tol", dest="margin_tol", type=float, default=None)
    ap.add_argument("--log-level", dest="log_level", type=str, default=None)


def setup_logging(level: Optional[str]) -> None:
    logging.basicConfig(
        stream=sys.stderr,
        level=(level or settings.LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def dumps(data: Dict[str, Any]) -> str:
    return json.dumps(data, ensure_ascii=False, indent=2, sort_keys=True, default=_jsonable)


def emit_json(data: Dict[str, Any]) -> None:
    print(dumps(data))


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ConvergenceError):
        return EXIT_NONCONVERGENCE
    if isinstance(exc, MarginViolation):
        return EXIT_MARGIN
    return EXIT_USAGE


def cli_main(
    prog: str,
    add_arguments: Callable[[argparse.ArgumentParser], None],
    run: Callable[[argparse.Namespace], int],
    argv: Optional[Sequence[str]] = None,
) -> int:
    ap = argparse.ArgumentParser(prog=prog)
    add_arguments(ap)
    add_common_arguments(ap)
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    return run_guarded(run, args)


def run_guarded(run: Callable[[argparse.Namespace], int], args: argparse.Namespace) -> int:
    setup_logging(getattr(args, "log_level", None))
    try:
        return run(args)
    except HaarLabError as e:
        code = exit_code_for(e)
        logger.error("%s: %s", e.code, e)
        emit_json({"ok": False, **e.to_dict()})
        return code
    except Exception as e:
        logger.exception("unexpected error")
        emit_json({"ok": False, "error": "RUNTIME_ERROR", "detail": f"{type(e).__name__}: {e}"})
        return EXIT_RUNTIME
