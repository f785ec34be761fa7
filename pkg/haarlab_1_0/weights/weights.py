# -*- coding: utf-8 -*-
"""
A2 权

- Weight：正的 StepFunction + 缓存的逐叶倒数
- a2_norm：sup_I <w>_I <w^{-1}>_I，遍历全部节点（含叶子），带见证节点
- gen_power_weight：x^alpha 的精确格均值
- gen_random_a2：乘性级联 w = exp(delta * S)，S 为沿树路径的 ±1 累加，二分标定 delta
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from haarlab_1_0.core.dyadic import DyadicGrid, DyadicNode, StepFunction, check_same_grid, level_averages
from haarlab_1_0.core.io_csv import read_indexed_csv
from haarlab_1_0.errors import ConvergenceError, InputError

logger = logging.getLogger(__name__)

SeedLike = Union[int, Sequence[int], np.random.SeedSequence, None]

MAX_BISECTION_STEPS = 60


@dataclass(frozen=True, eq=False)
class Weight:
    w: StepFunction
    inverse: StepFunction = field(init=False, repr=False)

    def __post_init__(self) -> None:
        vals = self.w.values
        bad = np.flatnonzero(~(vals > 0))
        if bad.size:
            j = int(bad[0])
            raise InputError(f"weight must be positive, leaf {j} has {vals[j]!r}", {"leaf": j})
        object.__setattr__(self, "inverse", StepFunction(self.w.grid, 1.0 / vals))

    @classmethod
    def from_values(cls, values: Sequence[float] | np.ndarray) -> "Weight":
        return cls(StepFunction.from_values(values))

    @classmethod
    def ones(cls, grid: DyadicGrid) -> "Weight":
        return cls(StepFunction.constant(grid, 1.0))

    @property
    def grid(self) -> DyadicGrid:
        return self.w.grid

    @property
    def values(self) -> np.ndarray:
        return self.w.values

    def scaled(self, c: float) -> "Weight":
        return Weight(self.w * c)

    def reciprocal(self) -> "Weight":
        return Weight(self.inverse)


@dataclass(frozen=True)
class A2Report:
    a2_norm: float
    witness_node: DyadicNode

    def to_dict(self) -> dict:
        return {"a2_norm": self.a2_norm, "witness": self.witness_node.key}


def a2_products(values: np.ndarray, depth: int) -> list:
    """每层的 <w>_I <w^{-1}>_I"""
    inv = 1.0 / values
    return [level_averages(values, lv) * level_averages(inv, lv) for lv in range(depth + 1)]


def a2_norm(w: Weight) -> A2Report:
    best = -np.inf
    witness = DyadicNode(0, 0)
    # 自上而下 + 严格大于：平局时取最粗的节点（w 常数时见证为根）
    for level, prod in enumerate(a2_products(w.values, w.grid.depth)):
        j = int(np.argmax(prod))
        if prod[j] > best:
            best = float(prod[j])
            witness = DyadicNode(level, j)
    return A2Report(best, witness)


def weighted_norm(f: StepFunction, w: Weight) -> float:
    """||f||_{L2(w)} = (sum |f|^2 w |leaf|)^{1/2}"""
    check_same_grid(f, w.w)
    return float(np.sqrt(np.mean(f.values**2 * w.values)))


# =========================================================
# 生成器
# =========================================================
def gen_power_weight(grid: DyadicGrid, alpha: float) -> Weight:
    """叶值 = x^alpha 在叶上的精确均值：(b^{a+1} - a^{a+1}) / ((alpha+1)(b-a))"""
    if not -1.0 < alpha < 1.0:
        raise InputError(f"power weight needs |alpha| < 1, got {alpha}")
    edges = np.arange(grid.n_leaves + 1, dtype=float) / grid.n_leaves
    p = alpha + 1.0
    prim = np.power(edges, p)
    vals = (prim[1:] - prim[:-1]) / (p * np.diff(edges))
    return Weight(StepFunction(grid, vals))


def cascade_path_sums(grid: DyadicGrid, rng: np.random.Generator) -> np.ndarray:
    """每条树边独立 ±1，返回每片叶子到根的路径和"""
    s = np.zeros(grid.n_leaves)
    for level in range(1, grid.depth + 1):
        signs = rng.integers(0, 2, size=1 << level) * 2 - 1
        s += np.repeat(signs.astype(float), 1 << (grid.depth - level))
    return s


def cascade_weight(grid: DyadicGrid, delta: float, seed: SeedLike) -> Weight:
    s = cascade_path_sums(grid, np.random.default_rng(seed))
    return Weight(StepFunction(grid, np.exp(delta * s)))


def gen_random_a2(grid: DyadicGrid, target_A: float, seed: SeedLike) -> Weight:
    """
    级联权，标定 delta 使 a2_norm ∈ [0.5 T, 2 T]
    - 符号一次抽好，delta 只做缩放，结果是 (grid, T, seed) 的纯函数
    - 先倍增找上界，再二分；总步数 <= 60
    """
    if target_A < 1.0:
        raise InputError(f"target_A must be >= 1, got {target_A}")
    if target_A == 1.0:
        return Weight.ones(grid)

    s = cascade_path_sums(grid, np.random.default_rng(seed))
    span = float(np.max(np.abs(s))) or 1.0
    delta_cap = 600.0 / span

    def realized(delta: float) -> A2Report:
        return a2_norm(Weight(StepFunction(grid, np.exp(delta * s))))

    def fail(msg: str, rep: A2Report) -> ConvergenceError:
        return ConvergenceError(msg, {"target": target_A, **rep.to_dict()})

    lo, hi = 0.0, min(1.0, delta_cap)
    rep = realized(hi)
    steps = 1
    while rep.a2_norm < 0.5 * target_A:
        if hi >= delta_cap or steps >= MAX_BISECTION_STEPS:
            raise fail(f"cascade cannot reach a2 target {target_A} on depth {grid.depth}", rep)
        lo, hi = hi, min(2.0 * hi, delta_cap)
        rep = realized(hi)
        steps += 1

    delta = hi
    while not 0.5 * target_A <= rep.a2_norm <= 2.0 * target_A:
        if steps >= MAX_BISECTION_STEPS:
            raise fail(f"cascade calibration failed after {steps} steps", rep)
        delta = (lo + hi) / 2.0
        rep = realized(delta)
        steps += 1
        logger.debug("a2 calibration step=%d delta=%.6g a2=%.6g", steps, delta, rep.a2_norm)
        if rep.a2_norm < 0.5 * target_A:
            lo = delta
        elif rep.a2_norm > 2.0 * target_A:
            hi = delta
    return Weight(StepFunction(grid, np.exp(delta * s)))


def read_weight_csv(path: Union[str, Path]) -> Weight:
    vals = read_indexed_csv(path, ("leaf", "value"))
    bad = np.flatnonzero(~(vals > 0))
    if bad.size:
        j = int(bad[0])
        # 表头占第 1 行
        raise InputError(f"{path}: nonpositive weight at row {j + 2} (leaf {j})", {"row": j + 2})
    return Weight.from_values(vals)
