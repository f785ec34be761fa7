# -*- coding: utf-8 -*-
"""
鞅树数据模型

MartingaleTree：I0 以下 n 层的 Bellman 点，levels[k] 形状 (2^k, 6)，
  节点 (k, p) 对应 chld_k(I0) 自左向右第 p 个区间。
  构造即校验：X_I = (X_{I1} + X_{I2}) / 2（相对 1e-12），且每个 X_I ∈ Dom(B_A)。
TreePara：再带一列 Carleson 量 M（levels 仍是 6 列，M 单独存）。
  除根以外 M_I = (M_{I1} + M_{I2}) / 2；M ∈ [0, 1]；d0 = M_{I0} - 2^{-n} sum M_leaf（可为负，由估计检查报错）。
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from haarlab_1_0.bellman.domain import IF, IG, domain_margins, in_domain_batch
from haarlab_1_0.config import settings
from haarlab_1_0.core.dyadic import ROOT, DyadicNode
from haarlab_1_0.errors import DomainError, InputError

MARTINGALE_TOL = 1e-12


def pairwise_means(leaves: np.ndarray) -> List[np.ndarray]:
    """从叶子逐层两两平均，返回 [level 0, ..., level n]"""
    out = [np.asarray(leaves, dtype=float)]
    while out[0].shape[0] > 1:
        cur = out[0]
        out.insert(0, (cur[0::2] + cur[1::2]) / 2.0)
    return out


def _martingale_defect(levels: Sequence[np.ndarray]) -> Tuple[float, int, int]:
    """返回 (最大相对偏差, 层, 位置)"""
    worst, where = 0.0, (0, 0)
    for k in range(len(levels) - 1):
        parent = levels[k]
        kids = levels[k + 1]
        avg = (kids[0::2] + kids[1::2]) / 2.0
        scale = np.maximum(1.0, np.maximum(np.abs(kids[0::2]), np.abs(kids[1::2])))
        rel = np.abs(parent - avg) / scale
        if rel.ndim > 1:
            rel = rel.max(axis=1)
        j = int(np.argmax(rel))
        if rel[j] > worst:
            worst, where = float(rel[j]), (k, j)
    return worst, where[0], where[1]


@dataclass(frozen=True, eq=False)
class MartingaleTree:
    A: float
    levels: Tuple[np.ndarray, ...]
    root: DyadicNode = ROOT

    def __post_init__(self) -> None:
        if self.A < 1.0:
            raise InputError(f"A must be >= 1, got {self.A}")
        lv = tuple(np.array(x, dtype=float) for x in self.levels)
        if len(lv) < 2:
            raise InputError("tree needs depth n >= 1")
        for k, arr in enumerate(lv):
            if arr.shape != (1 << k, 6):
                raise InputError(f"tree level {k} has shape {arr.shape}, expected {(1 << k, 6)}")
            if not np.all(np.isfinite(arr)):
                raise InputError(f"tree level {k} has non-finite entries")
            arr.setflags(write=False)
        object.__setattr__(self, "levels", lv)

        worst, k, p = _martingale_defect(lv)
        if worst > MARTINGALE_TOL:
            raise DomainError(
                f"martingale dynamics broken at {self.node_key(k, p)} (relative defect {worst:.3g})",
                {"node": self.node_key(k, p), "defect": worst},
            )
        for k, arr in enumerate(lv):
            ok = in_domain_batch(arr, self.A)
            if not ok.all():
                j = int(np.argmin(ok))
                raise DomainError(
                    f"tree point at {self.node_key(k, j)} not in Dom(B_A), A={self.A}",
                    {"node": self.node_key(k, j), "point": arr[j].tolist(), "A": self.A,
                     "margins": domain_margins(arr[j], self.A)[0].tolist()},
                )

    @classmethod
    def from_leaves(cls, A: float, leaves: np.ndarray, root: DyadicNode = ROOT) -> "MartingaleTree":
        return cls(A, tuple(pairwise_means(leaves)), root)

    @property
    def n(self) -> int:
        return len(self.levels) - 1

    @property
    def n_leaves(self) -> int:
        return 1 << self.n

    @property
    def leaves(self) -> np.ndarray:
        return self.levels[-1]

    @property
    def root_point(self) -> np.ndarray:
        return self.levels[0][0]

    def node(self, k: int, p: int) -> DyadicNode:
        return DyadicNode(self.root.level + k, (self.root.position << k) + p)

    def node_key(self, k: int, p: int) -> str:
        return f"{k}/{p}"

    def f_diffs(self) -> np.ndarray:
        return self.leaves[:, IF] - self.root_point[IF]

    def g_diffs(self) -> np.ndarray:
        return self.leaves[:, IG] - self.root_point[IG]

    def is_degenerate(self, tol: Optional[float] = None) -> bool:
        tol = settings.REL_TOL if tol is None else tol
        scale = max(1.0, float(np.abs(self.leaves[:, [IF, IG]]).max()))
        return bool(np.all(np.abs(self.f_diffs()) <= tol * scale) and np.all(np.abs(self.g_diffs()) <= tol * scale))

    def states(self, k: int) -> np.ndarray:
        """第 k 层给候选函数求值用的状态（普通树 6 列）"""
        return self.levels[k]


@dataclass(frozen=True, eq=False)
class TreePara(MartingaleTree):
    M_levels: Tuple[np.ndarray, ...] = field(default=())

    def __post_init__(self) -> None:
        super().__post_init__()
        ml = tuple(np.array(x, dtype=float).reshape(-1) for x in self.M_levels)
        if len(ml) != len(self.levels):
            raise InputError(f"need {len(self.levels)} levels of M, got {len(ml)}")
        tol = settings.DOMAIN_TOL
        for k, arr in enumerate(ml):
            if arr.shape != (1 << k,):
                raise InputError(f"M level {k} has shape {arr.shape}, expected {(1 << k,)}")
            bad = np.flatnonzero((arr < -tol) | (arr > 1.0 + tol))
            if bad.size:
                j = int(bad[0])
                raise DomainError(
                    f"M at {self.node_key(k, j)} = {arr[j]:.17g} not in [0, 1]", {"node": self.node_key(k, j)}
                )
            arr.setflags(write=False)
        # 根以外满足平均动力学
        worst, k, p = _martingale_defect(ml[1:])
        if worst > MARTINGALE_TOL:
            raise DomainError(
                f"M dynamics broken at {self.node_key(k + 1, p)} (relative defect {worst:.3g})",
                {"node": self.node_key(k + 1, p), "defect": worst},
            )
        object.__setattr__(self, "M_levels", ml)

    @classmethod
    def from_leaves_para(
        cls, A: float, leaves: np.ndarray, leaf_M: np.ndarray, root_M: float, root: DyadicNode = ROOT
    ) -> "TreePara":
        levels = pairwise_means(leaves)
        ml = pairwise_means(np.asarray(leaf_M, dtype=float))
        ml[0] = np.array([float(root_M)])
        return cls(A, tuple(levels), root, tuple(ml))

    @property
    def d0(self) -> float:
        return float(self.M_levels[0][0] - self.M_levels[-1].mean())

    def states(self, k: int) -> np.ndarray:
        return np.column_stack([self.levels[k], self.M_levels[k]])
