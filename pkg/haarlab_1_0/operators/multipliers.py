# -*- coding: utf-8 -*-
"""
鞅乘子 T_sigma f = <f>_root + sum_I sigma_I (f, h_I) h_I，|sigma_I| <= 1
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Tuple

import numpy as np

from haarlab_1_0.core.dyadic import (
    DyadicGrid,
    DyadicNode,
    StepFunction,
    haar_details,
    haar_synthesize,
)
from haarlab_1_0.errors import NormalizationError
from haarlab_1_0.operators.base import HaarOperator
from haarlab_1_0.weights.weights import SeedLike

SIGMA_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MultiplierSpec(HaarOperator):
    """
    sigma 按层存：sigma[level] 长度 2^level，level = 0..N-1
    average_factor 作用在根均值上（默认 1：根均值保持不变）
    """

    grid: DyadicGrid
    sigma: Tuple[np.ndarray, ...] = field(repr=False)
    average_factor: float = 1.0

    def __post_init__(self) -> None:
        if len(self.sigma) != self.grid.depth:
            raise NormalizationError(f"sigma needs {self.grid.depth} levels, got {len(self.sigma)}")
        levels = []
        for level, arr in enumerate(self.sigma):
            a = np.array(arr, dtype=float).reshape(-1)
            if a.shape[0] != 1 << level:
                raise NormalizationError(f"sigma level {level} needs {1 << level} entries, got {a.shape[0]}")
            bad = np.flatnonzero(np.abs(a) > 1.0 + SIGMA_TOL)
            if bad.size:
                node = DyadicNode(level, int(bad[0]))
                raise NormalizationError(
                    f"|sigma| > 1 at {node.key}: {a[bad[0]]}", {"node": node.key, "sigma": float(a[bad[0]])}
                )
            a.setflags(write=False)
            levels.append(a)
        object.__setattr__(self, "sigma", tuple(levels))

    # ---------- 构造 ----------
    @classmethod
    def constant(cls, grid: DyadicGrid, c: float = 1.0) -> "MultiplierSpec":
        return cls(grid, tuple(np.full(1 << lv, float(c)) for lv in range(grid.depth)))

    @classmethod
    def from_mapping(cls, grid: DyadicGrid, sigma: Mapping[DyadicNode, float], default: float = 0.0) -> "MultiplierSpec":
        levels = [np.full(1 << lv, float(default)) for lv in range(grid.depth)]
        for node, s in sigma.items():
            grid.check(node)
            if node.level >= grid.depth:
                raise NormalizationError(f"sigma on leaf {node.key} (no Haar function there)")
            levels[node.level][node.position] = float(s)
        return cls(grid, tuple(levels))

    @classmethod
    def random(cls, grid: DyadicGrid, seed: SeedLike, signs_only: bool = False) -> "MultiplierSpec":
        rng = np.random.default_rng(seed)
        if signs_only:
            return cls(grid, tuple(rng.integers(0, 2, 1 << lv) * 2.0 - 1.0 for lv in range(grid.depth)))
        return cls(grid, tuple(rng.uniform(-1.0, 1.0, 1 << lv) for lv in range(grid.depth)))

    def value(self, node: DyadicNode) -> float:
        return float(self.sigma[node.level][node.position])

    @property
    def max_abs(self) -> float:
        return max(float(np.max(np.abs(a))) for a in self.sigma)

    # ---------- 作用 ----------
    def matvec(self, x: np.ndarray) -> np.ndarray:
        depth = self.grid.depth
        details = haar_details(np.asarray(x, dtype=float), depth)
        scaled = [d * s for d, s in zip(details, self.sigma)]
        return haar_synthesize(self.average_factor * float(np.mean(x)), scaled, depth)

    # 对角算子，无权 L2 下自伴
    rmatvec = matvec


def apply_multiplier(spec: MultiplierSpec, f: StepFunction) -> StepFunction:
    return spec.apply(f)
