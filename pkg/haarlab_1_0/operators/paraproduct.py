# -*- coding: utf-8 -*-
"""
二进 paraproduct：Pi_phi f = sum_I <f>_I Delta_I phi（I 取全部内部节点）

Delta_I phi 在 I1 上为 +delta_I，在 I2 上为 -delta_I，delta_I = (<phi>_{I1} - <phi>_{I2}) / 2
||Delta_I phi||_2^2 = delta_I^2 |I|

BMO^d：sup_J |J|^{-1} sum_{I ⊂ J} ||Delta_I phi||_2^2，自底向上累加 Carleson 和。
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from haarlab_1_0.core.dyadic import DyadicGrid, StepFunction, level_averages
from haarlab_1_0.operators.base import HaarOperator


def half_jumps(values: np.ndarray, depth: int) -> List[np.ndarray]:
    """delta_I 按层，delta[L] 长度 2^L"""
    out = []
    for lv in range(depth):
        kids = level_averages(values, lv + 1).reshape(-1, 2)
        out.append((kids[:, 0] - kids[:, 1]) / 2.0)
    return out


def carleson_sums(phi: StepFunction) -> List[np.ndarray]:
    """S_J = sum_{I ⊂ J, I 内部} ||Delta_I phi||_2^2，按层（叶子层为 0）"""
    depth = phi.grid.depth
    deltas = half_jumps(phi.values, depth)
    sums: List[np.ndarray] = [np.zeros(1 << depth)]
    for lv in range(depth - 1, -1, -1):
        below = sums[0]
        sums.insert(0, deltas[lv] ** 2 * 2.0 ** (-lv) + below[0::2] + below[1::2])
    return sums


def bmo_norm_squared(phi: StepFunction) -> float:
    depth = phi.grid.depth
    sums = carleson_sums(phi)
    return max(float(np.max(sums[lv] * 2.0**lv)) for lv in range(depth))


def bmo_norm(phi: StepFunction) -> float:
    """||phi||_{BMO^d}；返回范数本身（Carleson 上确界的平方根）"""
    return float(np.sqrt(bmo_norm_squared(phi)))


@dataclass(frozen=True, eq=False)
class ParaproductSpec(HaarOperator):
    phi: StepFunction
    deltas: Tuple[np.ndarray, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "deltas", tuple(half_jumps(self.phi.values, self.phi.grid.depth)))

    @property
    def grid(self) -> DyadicGrid:  # type: ignore[override]
        return self.phi.grid

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        depth = self.grid.depth
        out = np.zeros(self.grid.n_leaves)
        for lv, d in enumerate(self.deltas):
            c = level_averages(x, lv) * d
            out += np.repeat(np.stack([c, -c], axis=1).reshape(-1), 1 << (depth - lv - 1))
        return out

    def rmatvec(self, y: np.ndarray) -> np.ndarray:
        """Pi_phi^* g = sum_I <g, Delta_I phi> |I|^{-1} 1_I"""
        y = np.asarray(y, dtype=float)
        depth = self.grid.depth
        out = np.zeros(self.grid.n_leaves)
        for lv, d in enumerate(self.deltas):
            kids = level_averages(y, lv + 1).reshape(-1, 2)
            c = d * (kids[:, 0] - kids[:, 1]) / 2.0
            out += np.repeat(c, 1 << (depth - lv))
        return out


def apply_paraproduct(spec: ParaproductSpec, f: StepFunction) -> StepFunction:
    return spec.apply(f)
