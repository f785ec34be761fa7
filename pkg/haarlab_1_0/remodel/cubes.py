# -*- coding: utf-8 -*-
"""
d 维二进方体格点 [0,1)^d

- CubeGrid(d, depth)：每个坐标 2^depth 格，叶子 = 2^{d depth} 个小方体，值按行主序存放
- CubeNode(d, level, position, stage)：stage = s 表示方体在 level 上、前 s 个坐标再对半切过一次
    （s = 0 是真方体，0 < s < d 是“准孩子”长方体；s = d 规范化为 level+1 的真方体）
    坐标 i 的分辨率 r_i = level + (1 if i < s else 0)
- CubeShiftSpec：d 维复杂度 n 的 Haar shift，核按 chld_n(Q) 的行主序格编号
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from haarlab_1_0.core.io_csv import read_indexed_csv, write_indexed_csv
from haarlab_1_0.errors import GridError, InputError, NormalizationError
from haarlab_1_0.weights.weights import SeedLike

logger = logging.getLogger(__name__)

CUBE_CSV_HEADER = ("cell", "value")
NORM_TOL = 1e-12


# =========================================================
# 节点 / 网格
# =========================================================
@dataclass(frozen=True, order=True)
class CubeNode:
    d: int
    level: int
    position: Tuple[int, ...]
    stage: int = 0

    def __post_init__(self) -> None:
        if self.d < 1:
            raise InputError(f"dimension must be >= 1, got {self.d}")
        pos = tuple(int(p) for p in self.position)
        if len(pos) != self.d:
            raise GridError(f"position {pos} is not a {self.d}-tuple")
        if not 0 <= self.stage <= self.d or self.level < 0:
            raise GridError(f"bad level/stage: level={self.level}, stage={self.stage}")
        level, stage = self.level, self.stage
        if stage == self.d:
            level, stage = level + 1, 0
        for i, p in enumerate(pos):
            r = level + (1 if i < stage else 0)
            if not 0 <= p < (1 << r):
                raise GridError(f"coordinate {i} position {p} out of [0, 2^{r})")
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "level", level)
        object.__setattr__(self, "stage", stage)

    @property
    def resolution(self) -> Tuple[int, ...]:
        return tuple(self.level + (1 if i < self.stage else 0) for i in range(self.d))

    @property
    def is_cube(self) -> bool:
        return self.stage == 0

    @property
    def measure(self) -> float:
        return 2.0 ** (-(self.d * self.level + self.stage))

    def contains(self, other: "CubeNode") -> bool:
        if other.d != self.d:
            return False
        for rs, ro, ps, po in zip(self.resolution, other.resolution, self.position, other.position):
            if ro < rs or (po >> (ro - rs)) != ps:
                return False
        return True

    def cube_children(self) -> list:
        """真方体的 2^d 个孩子（行主序）"""
        if not self.is_cube:
            raise GridError("cube_children needs a genuine cube")
        out = []
        for j in range(1 << self.d):
            bits = [(j >> (self.d - 1 - i)) & 1 for i in range(self.d)]
            out.append(CubeNode(self.d, self.level + 1, tuple(2 * p + b for p, b in zip(self.position, bits))))
        return out


@dataclass(frozen=True)
class CubeGrid:
    d: int
    depth: int

    def __post_init__(self) -> None:
        if self.d < 1:
            raise InputError(f"dimension must be >= 1, got {self.d}")
        if self.depth < 1:
            raise GridError(f"cube depth must be >= 1, got {self.depth}")

    @property
    def side(self) -> int:
        return 1 << self.depth

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.side,) * self.d

    @property
    def n_cells(self) -> int:
        return 1 << (self.d * self.depth)

    def cubes(self, level: int) -> Iterable[CubeNode]:
        for idx in np.ndindex(*((1 << level,) * self.d)):
            yield CubeNode(self.d, level, idx)

    def cell_slices(self, node: CubeNode) -> Tuple[slice, ...]:
        if node.d != self.d or max(node.resolution) > self.depth:
            raise GridError(f"node {node} not on this grid")
        out = []
        for r, p in zip(node.resolution, node.position):
            span = 1 << (self.depth - r)
            out.append(slice(p * span, (p + 1) * span))
        return tuple(out)


def block_means(arr: np.ndarray, resolution: Sequence[int]) -> np.ndarray:
    """按各坐标分辨率取块均值，输出形状 (2^{r_0}, ..., 2^{r_{d-1}})"""
    side = arr.shape[0]
    shape = []
    for r in resolution:
        shape.extend([1 << r, side >> r])
    return arr.reshape(shape).mean(axis=tuple(range(1, 2 * len(resolution), 2)))


def upsample(cells: np.ndarray, depth: int) -> np.ndarray:
    """把每轴 2^L 的块值展开到每轴 2^depth"""
    out = cells
    for axis in range(cells.ndim):
        out = np.repeat(out, (1 << depth) // cells.shape[axis], axis=axis)
    return out


@dataclass(frozen=True, eq=False)
class CubeFunction:
    grid: CubeGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float)
        if arr.size != self.grid.n_cells:
            raise GridError(f"expected {self.grid.n_cells} cell values, got {arr.size}")
        arr = arr.reshape(self.grid.shape)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @classmethod
    def from_flat(cls, d: int, values: Sequence[float] | np.ndarray) -> "CubeFunction":
        arr = np.asarray(values, dtype=float).reshape(-1)
        bits = arr.size.bit_length() - 1
        if arr.size < 2 or arr.size & (arr.size - 1) or bits % d:
            raise GridError(f"cell count {arr.size} is not 2^(d*depth) for d={d}")
        return cls(CubeGrid(d, bits // d), arr)

    def average(self, node: CubeNode) -> float:
        return float(self.values[self.grid.cell_slices(node)].mean())

    def mean(self) -> float:
        return float(self.values.mean())


def cube_a2(w: CubeFunction) -> Tuple[float, CubeNode]:
    """sup_Q <w>_Q <w^{-1}>_Q，只取真方体；平局取最粗的"""
    if np.any(~(w.values > 0)):
        raise InputError("cube weight must be positive")
    inv = 1.0 / w.values
    best, witness = -np.inf, CubeNode(w.grid.d, 0, (0,) * w.grid.d)
    for L in range(w.grid.depth + 1):
        res = (L,) * w.grid.d
        prod = block_means(w.values, res) * block_means(inv, res)
        j = int(np.argmax(prod))
        if prod.flat[j] > best:
            best = float(prod.flat[j])
            witness = CubeNode(w.grid.d, L, np.unravel_index(j, prod.shape))
    return best, witness


def gen_cascade_weight_nd(d: int, cube_depth: int, delta: float, seed: SeedLike) -> CubeFunction:
    """每个方体一个独立 ±1，w = exp(delta * 路径和)"""
    grid = CubeGrid(d, cube_depth)
    rng = np.random.default_rng(seed)
    s = np.zeros(grid.shape)
    for L in range(1, cube_depth + 1):
        signs = rng.integers(0, 2, size=(1 << L,) * d) * 2.0 - 1.0
        s += upsample(signs, cube_depth)
    return CubeFunction(grid, np.exp(delta * s))


def read_cube_csv(path: Union[str, Path], d: int) -> CubeFunction:
    return CubeFunction.from_flat(d, read_indexed_csv(path, CUBE_CSV_HEADER))


def write_cube_csv(f: CubeFunction, path: Union[str, Path]) -> None:
    write_indexed_csv(path, CUBE_CSV_HEADER, f.values.reshape(-1))


# =========================================================
# d 维 Haar shift
# =========================================================
@dataclass(frozen=True, eq=False)
class CubeShiftSpec:
    grid: CubeGrid
    n: int
    kernels: Mapping[int, np.ndarray] = field(repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InputError(f"complexity must be >= 1, got {self.n}")
        d = self.grid.d
        cells = 1 << (d * self.n)
        clean: Dict[int, np.ndarray] = {}
        for L in sorted(self.kernels):
            k = np.array(self.kernels[L], dtype=float)
            if L < 0 or L + self.n > self.grid.depth:
                raise GridError(f"active level {L} + complexity {self.n} exceeds cube depth {self.grid.depth}")
            if k.shape != (1 << (d * L), cells, cells):
                raise InputError(f"level {L}: kernel shape {k.shape} != {(1 << (d * L), cells, cells)}")
            bound = 2.0 ** (d * L)
            over = np.abs(k).reshape(k.shape[0], -1).max(axis=1) > bound * (1.0 + NORM_TOL)
            if np.any(over):
                q = int(np.flatnonzero(over)[0])
                raise NormalizationError(f"cube kernel {q} at level {L} exceeds |Q|^-1", {"level": L, "cube": q})
            k.setflags(write=False)
            clean[L] = k
        object.__setattr__(self, "kernels", clean)

    @property
    def active_levels(self) -> list:
        return sorted(self.kernels)

    def local_cells(self, values: np.ndarray, L: int) -> np.ndarray:
        """(2^{dL}, 2^{dn})：每个 Q 的 chld_n(Q) 格均值（行主序），减去 Q 上均值"""
        d, n = self.grid.d, self.n
        means = block_means(values, (L + n,) * d)
        # 轴拆成 (Q 坐标, 局部坐标) 再把 Q 坐标排到前面
        shape = []
        for _ in range(d):
            shape.extend([1 << L, 1 << n])
        blocks = means.reshape(shape).transpose(list(range(0, 2 * d, 2)) + list(range(1, 2 * d, 2)))
        local = blocks.reshape(1 << (d * L), 1 << (d * n))
        return local - local.mean(axis=1, keepdims=True)

    def _expand(self, local: np.ndarray, L: int) -> np.ndarray:
        d, n = self.grid.d, self.n
        blocks = local.reshape((1 << L,) * d + (1 << n,) * d)
        order = []
        for i in range(d):
            order.extend([i, d + i])
        cells = blocks.transpose(order).reshape((1 << (L + n),) * d)
        return upsample(cells, self.grid.depth)

    def apply(self, f: CubeFunction) -> CubeFunction:
        if f.grid != self.grid:
            raise GridError("cube function and shift live on different grids")
        out = np.zeros(self.grid.shape)
        for L, k in self.kernels.items():
            cell = 2.0 ** (-self.grid.d * (L + self.n))
            y = np.einsum("qij,qj->qi", k, self.local_cells(f.values, L)) * cell
            y -= y.mean(axis=1, keepdims=True)
            out += self._expand(y, L)
        return CubeFunction(self.grid, out)


def gen_random_cube_shift(grid: CubeGrid, n: int, seed: SeedLike, levels: Optional[Iterable[int]] = None) -> CubeShiftSpec:
    """核元素取 ±|Q|^{-1}"""
    if grid.depth < n:
        raise GridError(f"cube depth {grid.depth} < complexity {n}")
    rng = np.random.default_rng(seed)
    d = grid.d
    use = sorted(levels) if levels is not None else list(range(grid.depth - n + 1))
    cells = 1 << (d * n)
    kernels = {
        L: (rng.integers(0, 2, size=(1 << (d * L), cells, cells)) * 2.0 - 1.0) * 2.0 ** (d * L) for L in use
    }
    return CubeShiftSpec(grid, n, kernels)


def apply_cube_shift(spec: CubeShiftSpec, f: CubeFunction) -> CubeFunction:
    return spec.apply(f)
