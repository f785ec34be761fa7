# -*- coding: utf-8 -*-
"""
鞅树的构造

- tree_from_data：由具体 (f, g, w) 取 I0 以下各层的六个均值
    X_I = (<f>_I, <g>_I, <f^2 w>_I, <g^2 w^{-1}>_I, <w>_I, <w^{-1}>_I)
- tree_para_from_symbol：再由符号 phi 的 Carleson 和给出 M（除以 ||phi||_BMO^2 归一化）
    叶子与根取真实值，中间层按平均动力学补齐（引理的假设形式），于是 d0 = 叶层以上各层 Haar 能量之和 >= 0
- random_tree / random_tree_para：深度 n+2 的数据格点，随机信号族 + 级联权，
    delta 逐次减半直到树上 max uv <= A
"""

from __future__ import annotations

import logging
from typing import Optional, Tuple

import numpy as np

from haarlab_1_0.bellman.domain import IU, IV
from haarlab_1_0.core.dyadic import ROOT, DyadicGrid, DyadicNode, StepFunction, check_same_grid, level_averages
from haarlab_1_0.errors import ConvergenceError, InputError
from haarlab_1_0.operators.paraproduct import bmo_norm_squared, carleson_sums
from haarlab_1_0.transference.models import MartingaleTree, TreePara, pairwise_means
from haarlab_1_0.weights.weights import SeedLike, Weight, cascade_path_sums

logger = logging.getLogger(__name__)

SIGNAL_KINDS = ("gaussian", "sparse", "haar", "constant")
MAX_HALVINGS = 60


def _leaf_states(f: StepFunction, g: StepFunction, w: Weight, n: int, root: DyadicNode) -> np.ndarray:
    grid = check_same_grid(f, g, w.w)
    grid.check(root)
    if root.level + n > grid.depth:
        raise InputError(f"tree depth {n} below {root.key} exceeds grid depth {grid.depth}")
    sl = grid.leaf_slice(root)
    fv, gv, wv = f.values[sl], g.values[sl], w.values[sl]
    cols = (fv, gv, fv**2 * wv, gv**2 / wv, wv, 1.0 / wv)
    return np.column_stack([level_averages(c, n) for c in cols])


def _max_uv(levels) -> float:
    return max(float(np.max(x[:, IU] * x[:, IV])) for x in levels)


def tree_from_data(
    f: StepFunction,
    g: StepFunction,
    w: Weight,
    n: int,
    A: Optional[float] = None,
    root: DyadicNode = ROOT,
) -> MartingaleTree:
    """A 缺省取树上 max uv（至少 1）"""
    if n < 1:
        raise InputError(f"tree depth must be >= 1, got {n}")
    leaves = _leaf_states(f, g, w, n, root)
    levels = pairwise_means(leaves)
    if A is None:
        A = max(1.0, _max_uv(levels))
    return MartingaleTree(float(A), tuple(levels), root)


def tree_para_from_symbol(
    phi: StepFunction,
    f: StepFunction,
    g: StepFunction,
    w: Weight,
    n: int,
    A: Optional[float] = None,
    root: DyadicNode = ROOT,
) -> TreePara:
    base = tree_from_data(f, g, w, n, A, root)
    check_same_grid(phi, f)
    bmo2 = bmo_norm_squared(phi)
    sums = carleson_sums(phi)
    leaf_level = root.level + n
    lo = root.position << n
    if bmo2 > 0:
        leaf_M = sums[leaf_level][lo : lo + (1 << n)] * 2.0**leaf_level / bmo2
        root_M = float(sums[root.level][root.position] * 2.0**root.level / bmo2)
    else:
        leaf_M = np.zeros(1 << n)
        root_M = 0.0
    # 浮点误差可能让 M 稍微越过 1
    leaf_M = np.clip(leaf_M, 0.0, 1.0)
    root_M = min(max(root_M, 0.0), 1.0)
    ml = pairwise_means(leaf_M)
    ml[0] = np.array([root_M])
    return TreePara(base.A, base.levels, root, tuple(ml))


# =========================================================
# 随机树
# =========================================================
def _random_signal(rng: np.random.Generator, N: int, kind: str) -> np.ndarray:
    offset = rng.normal()
    if kind == "gaussian":
        return offset + rng.standard_normal(N)
    if kind == "sparse":
        out = np.full(N, offset)
        idx = rng.choice(N, size=int(rng.integers(1, 4)), replace=False)
        out[idx] += rng.normal(scale=3.0, size=idx.size)
        return out
    if kind == "haar":
        level = int(rng.integers(0, int(np.log2(N))))
        span = N >> level
        start = int(rng.integers(0, 1 << level)) * span
        out = np.full(N, offset) + 0.1 * rng.standard_normal(N)
        out[start : start + span // 2] += 1.0
        out[start + span // 2 : start + span] -= 1.0
        return out
    return np.full(N, offset)


def _random_data(n: int, A: float, rng: np.random.Generator) -> Tuple[StepFunction, StepFunction, Weight]:
    if A < 1.0:
        raise InputError(f"A must be >= 1, got {A}")
    grid = DyadicGrid(n + 2)
    N = grid.n_leaves
    kf = SIGNAL_KINDS[int(rng.integers(len(SIGNAL_KINDS)))]
    kg = SIGNAL_KINDS[int(rng.integers(len(SIGNAL_KINDS)))]
    if kf == "constant" and kg == "constant":
        kg = "gaussian"
    f = StepFunction(grid, _random_signal(rng, N, kf))
    g = StepFunction(grid, _random_signal(rng, N, kg))

    s = cascade_path_sums(grid, rng)
    delta = float(rng.uniform(0.1, 1.5))
    for _ in range(MAX_HALVINGS):
        w = Weight(StepFunction(grid, np.exp(delta * s)))
        uv = _max_uv(pairwise_means(_leaf_states(f, g, w, n, ROOT)))
        if uv <= A:
            return f, g, w
        delta /= 2.0
    raise ConvergenceError(f"cannot fit a cascade weight under A={A}", {"A": A, "n": n})


def random_tree(n: int, A: float, seed: SeedLike) -> MartingaleTree:
    rng = np.random.default_rng(seed)
    f, g, w = _random_data(n, A, rng)
    return tree_from_data(f, g, w, n, A)


def random_tree_para(n: int, A: float, seed: SeedLike) -> TreePara:
    """叶子 M 随机，d0 ∈ [0, 1 - mean M]（十分之一概率取 0）"""
    rng = np.random.default_rng(seed)
    f, g, w = _random_data(n, A, rng)
    base = tree_from_data(f, g, w, n, A)
    leaf_M = rng.uniform(0.0, 1.0, 1 << n) * rng.uniform(0.0, 1.0)
    mean = float(leaf_M.mean())
    d0 = 0.0 if rng.random() < 0.1 else float(rng.uniform(0.0, 1.0)) * (1.0 - mean)
    ml = pairwise_means(leaf_M)
    ml[0] = np.array([min(1.0, ml[0][0] + d0)])
    return TreePara(base.A, base.levels, ROOT, tuple(ml))
