# -*- coding: utf-8 -*-
"""
Shift spec JSON

{
  "kind": "elementary" | "general",
  "depth": N,
  "m": ..., "n": ...,              # general 只用 n（复杂度）
  "entries": [
    {"Q": [level, pos], "left": [...], "right": [...]},   # elementary，形状 (2^m, 2^n, 2)
    {"Q": [level, pos], "kernel": [[...]]}                # general，形状 (2^n, 2^n)
  ]
}

格式校验交给 pydantic；归一化校验交给 spec 构造器（报第一个违规 Q）。
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from haarlab_1_0.core.dyadic import DyadicGrid, DyadicNode
from haarlab_1_0.errors import InputError
from haarlab_1_0.operators.shifts import ElementaryShiftSpec, HaarShiftSpec


class ShiftEntry(BaseModel):
    Q: Tuple[int, int]
    left: Optional[List] = None
    right: Optional[List] = None
    kernel: Optional[List] = None


class ShiftDoc(BaseModel):
    kind: Literal["elementary", "general"]
    depth: int = Field(ge=1)
    m: int = Field(default=0, ge=0)
    n: int = Field(ge=0)
    entries: List[ShiftEntry] = Field(default_factory=list)


ShiftSpec = Union[ElementaryShiftSpec, HaarShiftSpec]


def spec_from_doc(doc: ShiftDoc) -> ShiftSpec:
    grid = DyadicGrid(doc.depth)
    if doc.kind == "elementary":
        entries = {}
        for e in doc.entries:
            if e.left is None or e.right is None:
                raise InputError(f"elementary entry Q={list(e.Q)} needs left and right")
            entries[DyadicNode(*e.Q)] = (np.asarray(e.left, dtype=float), np.asarray(e.right, dtype=float))
        return ElementaryShiftSpec(grid, doc.m, doc.n, entries)

    cells = 1 << doc.n
    kernels: Dict[int, np.ndarray] = {}
    for e in doc.entries:
        if e.kernel is None:
            raise InputError(f"general entry Q={list(e.Q)} needs kernel")
        q = DyadicNode(*e.Q)
        grid.check(q)
        k = kernels.setdefault(q.level, np.zeros((1 << q.level, cells, cells)))
        arr = np.asarray(e.kernel, dtype=float)
        if arr.shape != (cells, cells):
            raise InputError(f"Q={q.key}: kernel shape {arr.shape} != {(cells, cells)}")
        k[q.position] = arr
    return HaarShiftSpec(grid, doc.n, kernels)


def spec_to_doc(spec: ShiftSpec) -> ShiftDoc:
    if isinstance(spec, ElementaryShiftSpec):
        entries = [
            ShiftEntry(Q=(q.level, q.position), left=left.tolist(), right=right.tolist())
            for q, (left, right) in spec.entries.items()
        ]
        return ShiftDoc(kind="elementary", depth=spec.grid.depth, m=spec.m, n=spec.n, entries=entries)
    entries = []
    for lv, ker in spec.kernels.items():
        for p in range(ker.shape[0]):
            entries.append(ShiftEntry(Q=(lv, p), kernel=ker[p].tolist()))
    return ShiftDoc(kind="general", depth=spec.grid.depth, n=spec.n, entries=entries)


def load_shift_spec(path: Union[str, Path]) -> ShiftSpec:
    with open(path, "r", encoding="utf-8") as f:
        raw = json.load(f)
    try:
        doc = ShiftDoc.model_validate(raw)
    except ValidationError as e:
        raise InputError(f"{path}: invalid shift spec: {e.errors()[0]['msg']}") from e
    return spec_from_doc(doc)


def dump_shift_spec(spec: ShiftSpec, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(spec_to_doc(spec).model_dump_json(exclude_none=True))
