# -*- coding: utf-8 -*-
"""
方体 -> 直线的重排

构造：区间层 t -> t+1 对应把当前长方体沿第 (t mod d) 个坐标对半切；
低半边 eta = 0、高半边 eta = 1，对应的区间孩子 = eta xor flip[t][p]。
flip 只在 t mod d != 0 的层随机（种子决定），所以 d = 1 时 Φ 就是恒等映射。
区间深度 = d * cube_depth；区间层 t 对应方体 level = t // d、stage = t % d。
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np
from pydantic import BaseModel

from haarlab_1_0.core.dyadic import DyadicGrid, DyadicNode, StepFunction, level_averages
from haarlab_1_0.errors import GridError, InputError, MarginViolation
from haarlab_1_0.operators.shifts import HaarShiftSpec
from haarlab_1_0.remodel.cubes import CubeFunction, CubeGrid, CubeNode, CubeShiftSpec, block_means, cube_a2
from haarlab_1_0.weights.weights import SeedLike, Weight, a2_norm

logger = logging.getLogger(__name__)

INFLATION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class RemodelMap:
    d: int
    cube_depth: int
    flips: Tuple[np.ndarray, ...] = field(repr=False)
    leaf_perm: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.d < 1:
            raise InputError(f"dimension must be >= 1, got {self.d}")
        if len(self.flips) != self.depth:
            raise InputError(f"need {self.depth} flip levels, got {len(self.flips)}")
        flips = []
        for t, fl in enumerate(self.flips):
            arr = np.asarray(fl, dtype=np.int64).reshape(-1)
            if arr.shape[0] != 1 << t or np.any((arr != 0) & (arr != 1)):
                raise InputError(f"flip level {t} must hold 2^{t} bits")
            arr.setflags(write=False)
            flips.append(arr)
        object.__setattr__(self, "flips", tuple(flips))

        coords = np.indices(self.cube_grid.shape).reshape(self.d, -1)
        perm = np.zeros(coords.shape[1], dtype=np.int64)
        for s in range(self.depth):
            eta = (coords[s % self.d] >> (self.cube_depth - 1 - s // self.d)) & 1
            perm = 2 * perm + (eta ^ self.flips[s][perm])
        if np.unique(perm).size != perm.size:
            raise MarginViolation("remodel leaf map is not a bijection")
        perm.setflags(write=False)
        object.__setattr__(self, "leaf_perm", perm)

    @property
    def depth(self) -> int:
        return self.d * self.cube_depth

    @property
    def grid(self) -> DyadicGrid:
        return DyadicGrid(self.depth)

    @property
    def cube_grid(self) -> CubeGrid:
        return CubeGrid(self.d, self.cube_depth)

    def resolution(self, t: int) -> Tuple[int, ...]:
        return tuple(t // self.d + (1 if i < t % self.d else 0) for i in range(self.d))

    def cube_positions(self, t: int, p: np.ndarray) -> List[np.ndarray]:
        """区间层 t 上位置 p（数组）对应的长方体各坐标位置"""
        p = np.asarray(p, dtype=np.int64)
        pos = [np.zeros_like(p) for _ in range(self.d)]
        for s in range(t):
            prefix = p >> (t - s)
            bit = (p >> (t - 1 - s)) & 1
            axis = s % self.d
            pos[axis] = 2 * pos[axis] + (bit ^ self.flips[s][prefix])
        return pos

    def cube_of(self, node: DyadicNode) -> CubeNode:
        self.grid.check(node)
        pos = self.cube_positions(node.level, np.array([node.position]))
        return CubeNode(self.d, node.level // self.d, tuple(int(a[0]) for a in pos), node.level % self.d)

    def interval_of(self, q: CubeNode) -> DyadicNode:
        if q.d != self.d:
            raise GridError(f"cube of dimension {q.d} on a {self.d}-dimensional map")
        t = self.d * q.level + q.stage
        if t > self.depth:
            raise GridError(f"cube level {q.level} below map depth {self.cube_depth}")
        res = q.resolution
        p = 0
        for s in range(t):
            axis = s % self.d
            eta = (q.position[axis] >> (res[axis] - 1 - s // self.d)) & 1
            p = 2 * p + (eta ^ int(self.flips[s][p]))
        return DyadicNode(t, p)


def build_phi(d: int, cube_depth: int, seed: SeedLike) -> RemodelMap:
    if d < 1:
        raise InputError(f"dimension must be >= 1, got {d}")
    if cube_depth < 1:
        raise GridError(f"cube depth must be >= 1, got {cube_depth}")
    rng = np.random.default_rng(seed)
    flips = []
    for t in range(d * cube_depth):
        if t % d:
            flips.append(rng.integers(0, 2, size=1 << t))
        else:
            flips.append(np.zeros(1 << t, dtype=np.int64))
    return RemodelMap(d, cube_depth, tuple(flips))


# =========================================================
# 函数 / 权的搬运
# =========================================================
def transfer_function(phi: RemodelMap, f: CubeFunction) -> StepFunction:
    if f.grid != phi.cube_grid:
        raise GridError(
            f"function on d={f.grid.d} depth={f.grid.depth} vs map d={phi.d} depth={phi.cube_depth}",
            {"function": [f.grid.d, f.grid.depth], "map": [phi.d, phi.cube_depth]},
        )
    out = np.empty(phi.grid.n_leaves)
    out[phi.leaf_perm] = f.values.reshape(-1)
    return StepFunction(phi.grid, out)


def transfer_weight(phi: RemodelMap, w: CubeFunction) -> Weight:
    return Weight(transfer_function(phi, w))


def average_defect(phi: RemodelMap, f: CubeFunction) -> float:
    """max over 所有区间 I 的 |<f>_{Φ^{-1}(I)} - <transfer f>_I|"""
    g = transfer_function(phi, f).values
    worst = 0.0
    for t in range(phi.depth + 1):
        means = block_means(f.values, phi.resolution(t))
        pos = phi.cube_positions(t, np.arange(1 << t))
        err = np.abs(means[tuple(pos)] - level_averages(g, t))
        worst = max(worst, float(err.max()))
    return worst


def nesting_violations(phi: RemodelMap, pairs: int, seed: SeedLike) -> int:
    """随机 (祖先, 后代) 区间对：Φ^{-1} 保持包含，且 interval_of ∘ cube_of = id"""
    rng = np.random.default_rng(seed)
    bad = 0
    for _ in range(pairs):
        t = int(rng.integers(0, phi.depth + 1))
        s = int(rng.integers(0, t + 1))
        node = DyadicNode(t, int(rng.integers(0, 1 << t)))
        anc = DyadicNode(s, node.position >> (t - s))
        q, qa = phi.cube_of(node), phi.cube_of(anc)
        if not qa.contains(q) or phi.interval_of(q) != node:
            bad += 1
    return bad


@dataclass(frozen=True)
class InflationReport:
    a2_before: float
    a2_after: float
    ratio: float
    witness_cube: CubeNode
    witness_interval: DyadicNode

    def to_dict(self) -> dict:
        out = asdict(self)
        out["witness_cube"] = {
            "level": self.witness_cube.level,
            "position": list(self.witness_cube.position),
            "stage": self.witness_cube.stage,
        }
        out["witness_interval"] = self.witness_interval.key
        return out


def inflation_bound(d: int) -> float:
    return 4.0 ** (d - 1)


def a2_inflation(phi: RemodelMap, w: CubeFunction) -> InflationReport:
    before, wc = cube_a2(w)
    after = a2_norm(transfer_weight(phi, w))
    ratio = after.a2_norm / before
    if ratio > inflation_bound(phi.d) * (1.0 + INFLATION_TOL):
        q = phi.cube_of(after.witness_node)
        raise MarginViolation(
            f"A2 inflation {ratio:.6g} exceeds 4^(d-1) = {inflation_bound(phi.d):g}",
            {"interval": after.witness_node.key, "cube": [q.level, list(q.position), q.stage], "ratio": ratio},
        )
    return InflationReport(before, after.a2_norm, ratio, wc, after.witness_node)


# =========================================================
# shift 重排：复杂度 n -> n d，活跃层 L -> d L
# =========================================================
def remodel_shift(phi: RemodelMap, spec: CubeShiftSpec) -> HaarShiftSpec:
    if spec.grid != phi.cube_grid:
        raise GridError("cube shift and remodel map live on different grids")
    d, n = phi.d, spec.n
    mask = (1 << n) - 1
    kernels: Dict[int, np.ndarray] = {}
    for L, k in spec.kernels.items():
        t, T = d * L, d * (L + n)
        qpos = phi.cube_positions(t, np.arange(1 << t))
        qidx = np.ravel_multi_index(qpos, (1 << L,) * d)
        cpos = phi.cube_positions(T, np.arange(1 << T))
        local = np.ravel_multi_index([a & mask for a in cpos], (1 << n,) * d).reshape(1 << t, 1 << (d * n))
        kernels[t] = k[qidx[:, None, None], local[:, :, None], local[:, None, :]]
    return HaarShiftSpec(phi.grid, d * n, kernels)


# =========================================================
# Φ 的 JSON 导出
# =========================================================
class PhiNode(BaseModel):
    level: int
    stage: int
    position: List[int]
    children: List[str]


class PhiDoc(BaseModel):
    d: int
    cube_depth: int
    nodes: Dict[str, PhiNode]


def phi_to_doc(phi: RemodelMap) -> PhiDoc:
    nodes: Dict[str, PhiNode] = {}
    for t in range(phi.depth + 1):
        pos = phi.cube_positions(t, np.arange(1 << t))
        for p in range(1 << t):
            kids = [DyadicNode(t + 1, 2 * p + b).key for b in (0, 1)] if t < phi.depth else []
            nodes[DyadicNode(t, p).key] = PhiNode(
                level=t // phi.d, stage=t % phi.d, position=[int(a[p]) for a in pos], children=kids
            )
    return PhiDoc(d=phi.d, cube_depth=phi.cube_depth, nodes=nodes)


def dump_phi(phi: RemodelMap, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(phi_to_doc(phi).model_dump_json())
