# -*- coding: utf-8 -*-
"""
Tree JSON

{ "A": 4.0, "n": 2, "nodes": { "0/0": [f, g, F, G, u, v], "1/0": [...], ... } }
节点键 "k/pos" 相对 I0（k = 0 是 I0 本身）；para 树每个节点 7 个数（末位是 M）。
可选 "root": "level/pos" 记录 I0 在全局格点中的位置。
载入时走 MartingaleTree / TreePara 构造器：鞅动力学 + 定义域都校验。
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from haarlab_1_0.core.dyadic import ROOT, DyadicNode
from haarlab_1_0.errors import InputError
from haarlab_1_0.transference.models import MartingaleTree, TreePara


class TreeDoc(BaseModel):
    A: float = Field(ge=1.0)
    n: int = Field(ge=1)
    nodes: Dict[str, List[float]]
    root: Optional[str] = None


def tree_from_doc(doc: TreeDoc) -> MartingaleTree:
    expected = {f"{k}/{p}" for k in range(doc.n + 1) for p in range(1 << k)}
    missing = sorted(expected - doc.nodes.keys())
    extra = sorted(doc.nodes.keys() - expected)
    if missing or extra:
        raise InputError(f"tree nodes mismatch: missing {missing[:5]}, unexpected {extra[:5]}")
    widths = {len(v) for v in doc.nodes.values()}
    if len(widths) != 1 or widths.pop() not in (6, 7):
        raise InputError("every node needs 6 values (or 7 with M for para trees)")
    root = DyadicNode.from_key(doc.root) if doc.root else ROOT

    rows = [np.array([doc.nodes[f"{k}/{p}"] for p in range(1 << k)], dtype=float) for k in range(doc.n + 1)]
    if rows[0].shape[1] == 6:
        return MartingaleTree(doc.A, tuple(rows), root)
    return TreePara(doc.A, tuple(r[:, :6] for r in rows), root, tuple(r[:, 6] for r in rows))


def tree_to_dict(tree: MartingaleTree) -> dict:
    nodes: Dict[str, List[float]] = {}
    for k in range(tree.n + 1):
        states = tree.states(k)
        for p in range(1 << k):
            nodes[tree.node_key(k, p)] = [float(x) for x in states[p]]
    out: dict = {"A": tree.A, "n": tree.n, "nodes": nodes}
    if tree.root != ROOT:
        out["root"] = tree.root.key
    return out


def load_tree(path: Union[str, Path]) -> MartingaleTree:
    with open(path, "r", encoding="utf-8") as f:
        raw = json.load(f)
    try:
        doc = TreeDoc.model_validate(raw)
    except ValidationError as e:
        raise InputError(f"{path}: invalid tree: {e.errors()[0]['msg']}") from e
    return tree_from_doc(doc)


def dump_tree(tree: MartingaleTree, path: Union[str, Path]) -> None:
    doc = TreeDoc.model_validate(tree_to_dict(tree))
    with open(path, "w", encoding="utf-8") as f:
        f.write(doc.model_dump_json(exclude_none=True))
