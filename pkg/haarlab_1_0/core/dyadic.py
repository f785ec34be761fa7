# -*- coding: utf-8 -*-
"""
有限深度二进格点（[0,1) 上）

约定：
- 节点 = (level, position)，level=0 为根 [0,1)，position ∈ [0, 2^level)
- 叶子是 2^N 个长度 2^{-N} 的区间，自左向右
- StepFunction 的值按叶子顺序存放；所有叶子等测度，所以节点均值 = 叶值算术平均
- L2 内积按 Lebesgue 测度：<f,g> = mean(f*g)

Haar 系数用 L2 归一化的标准 Haar：h_I = |I|^{-1/2}(1_{I1} - 1_{I2})，
所以 coef_I = |I|^{1/2}(<f>_{I1} - <f>_{I2})/2，||Delta_I f||_2 = |coef_I|。
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from haarlab_1_0.errors import GridError, InputError


# =========================================================
# 节点 / 网格
# =========================================================
@dataclass(frozen=True, order=True)
class DyadicNode:
    level: int
    position: int

    def __post_init__(self) -> None:
        if self.level < 0:
            raise GridError(f"negative level: {self.level}")
        if not 0 <= self.position < (1 << self.level):
            raise GridError(f"position {self.position} out of [0, 2^{self.level})")

    @property
    def length(self) -> float:
        return 2.0 ** (-self.level)

    @property
    def left(self) -> float:
        return self.position * self.length

    @property
    def key(self) -> str:
        return f"{self.level}/{self.position}"

    @classmethod
    def from_key(cls, key: str) -> "DyadicNode":
        try:
            a, b = key.split("/")
            return cls(int(a), int(b))
        except ValueError as e:
            raise GridError(f"bad node key: {key!r}") from e

    def parent(self) -> "DyadicNode":
        if self.level == 0:
            raise GridError("root has no parent")
        return DyadicNode(self.level - 1, self.position >> 1)

    def contains(self, other: "DyadicNode") -> bool:
        if other.level < self.level:
            return False
        return (other.position >> (other.level - self.level)) == self.position

    def __str__(self) -> str:
        lo = self.position
        hi = self.position + 1
        return f"[{lo}/2^{self.level}, {hi}/2^{self.level})"


ROOT = DyadicNode(0, 0)


@dataclass(frozen=True)
class DyadicGrid:
    depth: int

    def __post_init__(self) -> None:
        if self.depth < 1:
            raise GridError(f"grid depth must be >= 1, got {self.depth}")

    @property
    def n_leaves(self) -> int:
        return 1 << self.depth

    @property
    def leaf_measure(self) -> float:
        return 2.0 ** (-self.depth)

    def check(self, node: DyadicNode) -> DyadicNode:
        if node.level > self.depth:
            raise GridError(f"node {node.key} below grid depth {self.depth}", {"node": node.key})
        return node

    def leaf_slice(self, node: DyadicNode) -> slice:
        self.check(node)
        span = 1 << (self.depth - node.level)
        return slice(node.position * span, (node.position + 1) * span)

    def nodes(self, level: int) -> List[DyadicNode]:
        if not 0 <= level <= self.depth:
            raise GridError(f"level {level} outside [0, {self.depth}]")
        return [DyadicNode(level, p) for p in range(1 << level)]

    def internal_nodes(self) -> Iterator[DyadicNode]:
        for level in range(self.depth):
            yield from self.nodes(level)

    def all_nodes(self) -> Iterator[DyadicNode]:
        for level in range(self.depth + 1):
            yield from self.nodes(level)


def children(node: DyadicNode, k: int = 1, grid: DyadicGrid | None = None) -> List[DyadicNode]:
    """chld_k(node)，自左向右；chld_0 = [node]"""
    if k < 0:
        raise InputError(f"k must be >= 0, got {k}")
    if grid is not None and node.level + k > grid.depth:
        raise GridError(
            f"chld_{k} of {node.key} leaves the grid (depth {grid.depth})",
            {"node": node.key, "k": k},
        )
    base = node.position << k
    return [DyadicNode(node.level + k, base + j) for j in range(1 << k)]


# =========================================================
# 数组层面的工具（向量化，所有算子都走这里）
# =========================================================
def level_averages(values: np.ndarray, level: int) -> np.ndarray:
    """第 level 层所有节点上的均值，长度 2^level"""
    return values.reshape(1 << level, -1).mean(axis=1)


def expand_level(cells: np.ndarray, depth: int) -> np.ndarray:
    """把第 ell 层的常值（长度 2^ell）展开到叶子"""
    level = int(cells.shape[0]).bit_length() - 1
    return np.repeat(cells, 1 << (depth - level))


def haar_details(values: np.ndarray, depth: int) -> List[np.ndarray]:
    """每层的 L2 归一化 Haar 系数，details[ell] 长度 2^ell"""
    out: List[np.ndarray] = []
    for level in range(depth):
        kids = level_averages(values, level + 1).reshape(-1, 2)
        out.append(np.sqrt(2.0 ** (-level)) * (kids[:, 0] - kids[:, 1]) / 2.0)
    return out


def haar_synthesize(root_average: float, details: Sequence[np.ndarray], depth: int) -> np.ndarray:
    avg = np.array([root_average], dtype=float)
    for level in range(depth):
        step = np.asarray(details[level], dtype=float) * np.sqrt(2.0**level)
        nxt = np.empty(2 * avg.shape[0])
        nxt[0::2] = avg + step
        nxt[1::2] = avg - step
        avg = nxt
    return avg


# =========================================================
# StepFunction
# =========================================================
@dataclass(frozen=True, eq=False)
class StepFunction:
    grid: DyadicGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float).reshape(-1)
        if arr.shape[0] != self.grid.n_leaves:
            raise GridError(
                f"expected {self.grid.n_leaves} leaf values, got {arr.shape[0]}",
                {"depth": self.grid.depth},
            )
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_values(cls, values: Sequence[float] | np.ndarray) -> "StepFunction":
        arr = np.asarray(values, dtype=float).reshape(-1)
        n = arr.shape[0]
        if n < 2 or n & (n - 1):
            raise GridError(f"leaf count must be a power of two >= 2, got {n}")
        return cls(DyadicGrid(n.bit_length() - 1), arr)

    @classmethod
    def constant(cls, grid: DyadicGrid, c: float) -> "StepFunction":
        return cls(grid, np.full(grid.n_leaves, float(c)))

    @classmethod
    def indicator(cls, grid: DyadicGrid, node: DyadicNode) -> "StepFunction":
        arr = np.zeros(grid.n_leaves)
        arr[grid.leaf_slice(node)] = 1.0
        return cls(grid, arr)

    # ---------- 算术 ----------
    def _other(self, other: "StepFunction") -> np.ndarray:
        if other.grid != self.grid:
            raise GridError(f"grid mismatch: depth {self.grid.depth} vs {other.grid.depth}")
        return other.values

    def __add__(self, other: "StepFunction") -> "StepFunction":
        return StepFunction(self.grid, self.values + self._other(other))

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        return StepFunction(self.grid, self.values - self._other(other))

    def __mul__(self, c: float) -> "StepFunction":
        return StepFunction(self.grid, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "StepFunction":
        return StepFunction(self.grid, -self.values)

    # ---------- 度量 ----------
    def inner(self, other: "StepFunction") -> float:
        return float(np.mean(self.values * self._other(other)))

    def l2_norm(self) -> float:
        return float(np.sqrt(np.mean(self.values**2)))

    def mean(self) -> float:
        return float(np.mean(self.values))


def check_same_grid(*fs: StepFunction) -> DyadicGrid:
    grid = fs[0].grid
    for f in fs[1:]:
        if f.grid != grid:
            raise GridError(f"grid mismatch: depth {grid.depth} vs {f.grid.depth}")
    return grid


# =========================================================
# 均值 / 鞅差
# =========================================================
def average(f: StepFunction, node: DyadicNode) -> float:
    return float(f.values[f.grid.leaf_slice(node)].mean())


def mart_diff_n(f: StepFunction, node: DyadicNode, n: int) -> StepFunction:
    """Delta^n_Q：投影到 支撑在 Q、在 chld_n(Q) 上为常数、Q 上均值为 0 的函数"""
    grid = f.grid
    if n < 0:
        raise InputError(f"n must be >= 0, got {n}")
    if node.level + n > grid.depth:
        raise GridError(
            f"Delta^{n} at {node.key} needs depth {node.level + n} > {grid.depth}",
            {"node": node.key, "n": n},
        )
    out = np.zeros(grid.n_leaves)
    if n == 0:
        return StepFunction(grid, out)
    sl = grid.leaf_slice(node)
    block = f.values[sl].reshape(1 << n, -1)
    cells = block.mean(axis=1)
    cells = cells - cells.mean()
    out[sl] = np.repeat(cells, block.shape[1])
    return StepFunction(grid, out)


def mart_diff(f: StepFunction, node: DyadicNode) -> StepFunction:
    if node.level >= f.grid.depth:
        raise GridError(f"Delta_I undefined on leaf {node.key}", {"node": node.key})
    return mart_diff_n(f, node, 1)


# =========================================================
# Haar 向量
# =========================================================
@dataclass(frozen=True)
class HaarVector:
    """支撑在 node 上、在两个孩子上取常值 (c1, c2)、c1 + c2 = 0"""

    node: DyadicNode
    coefficients: Tuple[float, float]
    unit_sup: bool = False

    def __post_init__(self) -> None:
        c = tuple(float(x) for x in self.coefficients)
        if len(c) != 2:
            raise InputError(f"Haar vector needs 2 child coefficients, got {len(c)}")
        if abs(c[0] + c[1]) > 1e-12 * max(1.0, abs(c[0])):
            raise InputError(f"Haar vector at {self.node.key} is not mean-zero: {c}")
        if self.unit_sup and abs(max(abs(c[0]), abs(c[1])) - 1.0) > 1e-12:
            raise InputError(f"Haar vector at {self.node.key} flagged unit_sup but sup={max(map(abs, c))}")
        object.__setattr__(self, "coefficients", c)

    @property
    def sup_norm(self) -> float:
        return max(abs(self.coefficients[0]), abs(self.coefficients[1]))

    def to_step(self, grid: DyadicGrid) -> StepFunction:
        kids = children(self.node, 1, grid)
        out = np.zeros(grid.n_leaves)
        for kid, c in zip(kids, self.coefficients):
            out[grid.leaf_slice(kid)] = c
        return StepFunction(grid, out)

    def inner(self, f: StepFunction) -> float:
        """(f, h) = sum_j c_j <f>_{child_j} |child_j|"""
        half = self.node.length / 2.0
        kids = children(self.node, 1, f.grid)
        return sum(c * average(f, kid) * half for kid, c in zip(kids, self.coefficients))


def standard_haar(node: DyadicNode, normalization: str = "l2") -> HaarVector:
    if normalization == "l2":
        c = node.length ** (-0.5)
        return HaarVector(node, (c, -c))
    if normalization == "sup":
        return HaarVector(node, (1.0, -1.0), unit_sup=True)
    raise InputError(f"unknown normalization: {normalization!r}")


# =========================================================
# Haar 展开
# =========================================================
@dataclass(frozen=True, eq=False)
class HaarExpansion:
    grid: DyadicGrid
    root_average: float
    details: Tuple[np.ndarray, ...] = field(repr=False)

    def coefficient(self, node: DyadicNode) -> float:
        if node.level >= self.grid.depth:
            raise GridError(f"no Haar coefficient on leaf {node.key}")
        return float(self.details[node.level][node.position])

    def items(self) -> Iterator[Tuple[DyadicNode, float]]:
        for level, arr in enumerate(self.details):
            for pos, c in enumerate(arr):
                yield DyadicNode(level, pos), float(c)

    def energy(self) -> float:
        """root_average^2 + sum coef^2（Parseval 右端）"""
        return self.root_average**2 + float(sum(np.sum(d**2) for d in self.details))

    def reconstruct(self) -> StepFunction:
        return haar_reconstruct(self)


def haar_expand(f: StepFunction) -> HaarExpansion:
    details = tuple(haar_details(f.values, f.grid.depth))
    return HaarExpansion(f.grid, f.mean(), details)


def haar_reconstruct(exp: HaarExpansion) -> StepFunction:
    return StepFunction(exp.grid, haar_synthesize(exp.root_average, exp.details, exp.grid.depth))
