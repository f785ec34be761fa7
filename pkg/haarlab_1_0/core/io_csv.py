# -*- coding: utf-8 -*-
"""
StepFunction CSV：表头 leaf,value；行 j,v_j（j = 0..2^N-1）
浮点一律 17 位有效数字输出，保证重跑逐字节一致。
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from haarlab_1_0.core.dyadic import StepFunction
from haarlab_1_0.errors import GridError

PathLike = Union[str, Path]


def fmt_float(x: float) -> str:
    return f"{float(x):.17g}"


def read_indexed_csv(path: PathLike, header: Tuple[str, str]) -> np.ndarray:
    """读 `<index>,value` 两列表；索引必须恰好是 0..n-1（顺序可乱）"""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        head = next(reader, None)
        if head is None or tuple(h.strip() for h in head) != header:
            raise GridError(f"{path}: expected header {','.join(header)}, got {head}")
        rows: List[Tuple[int, float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append((int(row[0]), float(row[1])))
            except (ValueError, IndexError) as e:
                raise GridError(f"{path}:{lineno}: bad row {row}", {"row": lineno}) from e
    n = len(rows)
    values = np.empty(n)
    seen = np.zeros(n, dtype=bool)
    for idx, v in rows:
        if not 0 <= idx < n or seen[idx]:
            raise GridError(f"{path}: index {idx} missing or duplicated", {"index": idx})
        values[idx] = v
        seen[idx] = True
    return values


def write_indexed_csv(path: PathLike, header: Tuple[str, str], values: Iterable[float]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for j, v in enumerate(values):
            w.writerow([j, fmt_float(v)])


def read_step_csv(path: PathLike) -> StepFunction:
    return StepFunction.from_values(read_indexed_csv(path, ("leaf", "value")))


def write_step_csv(f: StepFunction, path: PathLike) -> None:
    write_indexed_csv(path, ("leaf", "value"), f.values)


def rows_to_csv(header: Sequence[str], rows: Iterable[Sequence[object]]) -> str:
    """表格转 CSV 文本；float 统一 17 位"""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt_float(c) if isinstance(c, float) else c for c in row])
    return buf.getvalue()
