# -*- coding: utf-8 -*-
"""
Plank 泛函：叶子上的 alpha，sum alpha = 0，|alpha| <= 1/3

双向量情形（主估计）：a = {f_I - f0}，b = {g_I - g0}，归一化 â = a/||a||_1, b̂ = b/||b||_1，
  最大化 min(s1 <â, alpha>, s2 <b̂, alpha>)，(s1, s2) ∈ {±1}^2。
  可行集 {sum = 0, |alpha| <= 1/3}（N 为偶数）在 (<â,.>, <b̂,.>) 下的像是凸多边形：
  - 方向 phi 上的支撑点 = 按 cos(phi) â + sin(phi) b̂ 排序，前 N/2 取 +1/3，其余 -1/3
  - 排序只在两坐标相等的方向改变：phi = atan2(-Δâ, Δb̂) 及 +pi
  - 顶点取相邻断点的中间方向；min 的最优在顶点或边上 s1 x = s2 y 处
  平局按 alpha 字典序取最大（n = 1 时为 (1/3, -1/3)）。
  结果断言两条移动约束 |<alpha, a>| >= ||a||_1 / 12，|<alpha, b>| >= ||b||_1 / 12。

单向量情形（paraproduct）：只控制 b，平衡排序直接给出 >= ||b||_1 / 6。
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from haarlab_1_0.errors import DegenerateTreeError, InputError, MarginViolation
from haarlab_1_0.transference.models import MartingaleTree

logger = logging.getLogger(__name__)

THIRD = 1.0 / 3.0
MOVE_CONST = 1.0 / 12.0
MOVE_CONST_SINGLE = 1.0 / 6.0
TIE_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class PlankFunctional:
    alpha: np.ndarray
    move_f: float
    move_g: float

    def __post_init__(self) -> None:
        a = np.array(self.alpha, dtype=float)
        a.setflags(write=False)
        object.__setattr__(self, "alpha", a)

    @property
    def x_plus(self) -> np.ndarray:
        return 1.0 + self.alpha

    @property
    def x_minus(self) -> np.ndarray:
        return 1.0 - self.alpha

    def to_dict(self) -> dict:
        # 零向量的移动比为 inf（约束平凡成立），JSON 里记 null
        def clean(x: float) -> Optional[float]:
            return x if math.isfinite(x) else None

        return {"alpha": self.alpha.tolist(), "move_f": clean(self.move_f), "move_g": clean(self.move_g)}


def balanced_vertex(c: np.ndarray) -> np.ndarray:
    """最大化 <c, alpha>：前 N/2 个 +1/3，后 N/2 个 -1/3（稳定排序）"""
    n = c.shape[0]
    order = np.argsort(-c, kind="stable")
    alpha = np.full(n, -THIRD)
    alpha[order[: n // 2]] = THIRD
    return alpha


def _ratio(alpha: np.ndarray, v: np.ndarray) -> float:
    norm = float(np.abs(v).sum())
    if norm == 0.0:
        return math.inf
    return abs(float(alpha @ v)) / norm


def _breakpoints(ah: np.ndarray, bh: np.ndarray) -> np.ndarray:
    da = ah[:, None] - ah[None, :]
    db = bh[:, None] - bh[None, :]
    iu = np.triu_indices(ah.shape[0], k=1)
    da, db = da[iu], db[iu]
    keep = (da != 0.0) | (db != 0.0)
    phi = np.arctan2(-da[keep], db[keep])
    phi = np.concatenate([phi, phi + math.pi]) % (2.0 * math.pi)
    return np.unique(phi)


def _polygon_vertices(ah: np.ndarray, bh: np.ndarray) -> List[np.ndarray]:
    """按方向角排列的支撑顶点（alpha 向量），首尾相接"""
    phis = _breakpoints(ah, bh)
    if phis.size == 0:
        dirs = np.array([0.0])
    else:
        nxt = np.append(phis[1:], phis[0] + 2.0 * math.pi)
        dirs = (phis + nxt) / 2.0
    verts: List[np.ndarray] = []
    for phi in dirs:
        v = balanced_vertex(math.cos(phi) * ah + math.sin(phi) * bh)
        if not verts or not np.array_equal(v, verts[-1]):
            verts.append(v)
    if len(verts) > 1 and np.array_equal(verts[0], verts[-1]):
        verts.pop()
    return verts


def _edge_point(va: np.ndarray, vb: np.ndarray, t: float) -> np.ndarray:
    """(1-t) va + t vb，差异坐标成对取 ±e 使和严格为 0"""
    out = va.copy()
    up = (va > 0) & (vb < 0)
    down = (va < 0) & (vb > 0)
    e = (1.0 - 2.0 * t) * THIRD
    out[up] = e
    out[down] = -e
    return out


def _two_vector_alpha(ah: np.ndarray, bh: np.ndarray) -> np.ndarray:
    verts = _polygon_vertices(ah, bh)
    pts = [(v, float(v @ ah), float(v @ bh)) for v in verts]
    cands: List[Tuple[float, np.ndarray]] = []

    for s1 in (1.0, -1.0):
        for s2 in (1.0, -1.0):
            for v, x, y in pts:
                cands.append((min(s1 * x, s2 * y), v))
            m = len(pts)
            for i in range(m if m > 2 else m - 1):
                va, xa, ya = pts[i]
                vb, xb, yb = pts[(i + 1) % m]
                den = s1 * (xb - xa) - s2 * (yb - ya)
                if den == 0.0:
                    continue
                t = (s2 * ya - s1 * xa) / den
                if not 0.0 < t < 1.0:
                    continue
                alpha = _edge_point(va, vb, t)
                cands.append((min(s1 * float(alpha @ ah), s2 * float(alpha @ bh)), alpha))

    best_val = max(c[0] for c in cands)
    tied = [a for val, a in cands if val >= best_val - TIE_TOL]
    return max(tied, key=lambda a: tuple(a.tolist()))


def plank_alpha(tree: MartingaleTree) -> PlankFunctional:
    a = tree.f_diffs()
    b = tree.g_diffs()
    na, nb = float(np.abs(a).sum()), float(np.abs(b).sum())
    if na == 0.0 and nb == 0.0:
        raise DegenerateTreeError("degenerate tree: both leaf difference vectors are zero", {"n": tree.n})

    if na == 0.0:
        alpha = balanced_vertex(b)
    elif nb == 0.0:
        alpha = balanced_vertex(a)
    else:
        alpha = _two_vector_alpha(a / na, b / nb)

    move_f, move_g = _ratio(alpha, a), _ratio(alpha, b)
    _assert_contracts(alpha, {"f": move_f, "g": move_g}, MOVE_CONST)
    logger.debug("plank alpha n=%d move_f=%.4g move_g=%.4g", tree.n, move_f, move_g)
    return PlankFunctional(alpha, move_f, move_g)


def plank_alpha_single(tree: MartingaleTree) -> PlankFunctional:
    """只控制 g：alpha = (1/3) 按 g 差值平衡排序的符号"""
    b = tree.g_diffs()
    alpha = balanced_vertex(b)
    move_g = _ratio(alpha, b)
    move_f = _ratio(alpha, tree.f_diffs())
    _assert_contracts(alpha, {"g": move_g}, MOVE_CONST_SINGLE)
    return PlankFunctional(alpha, move_f, move_g)


def _assert_contracts(alpha: np.ndarray, moves: dict, const: float) -> None:
    if math.fsum(alpha.tolist()) != 0.0:
        raise MarginViolation("plank alpha does not sum to zero", {"sum": math.fsum(alpha.tolist())})
    if float(np.abs(alpha).max()) > THIRD + 1e-12:
        raise MarginViolation("plank alpha exceeds 1/3", {"max": float(np.abs(alpha).max())})
    for name, ratio in moves.items():
        if ratio < const - 1e-12:
            raise MarginViolation(
                f"plank move contract for {name} fails: {ratio:.6g} < {const:.6g}",
                {"vector": name, "ratio": ratio, "alpha": alpha.tolist()},
            )


def check_alpha(alpha: np.ndarray, n_leaves: Optional[int] = None) -> np.ndarray:
    a = np.asarray(alpha, dtype=float)
    if n_leaves is not None and a.shape != (n_leaves,):
        raise InputError(f"alpha has shape {a.shape}, expected ({n_leaves},)")
    if math.fsum(a.tolist()) != 0.0 or float(np.abs(a).max(initial=0.0)) > THIRD + 1e-12:
        raise InputError("alpha must sum to zero with |alpha| <= 1/3")
    return a
