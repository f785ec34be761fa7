# -*- coding: utf-8 -*-
"""
二进 shift

ElementaryShiftSpec（参数 m, n）：
    Ш f = sum_Q sum_{Q' ∈ chld_m Q, Q'' ∈ chld_n Q} |Q|^{-1} (f, h_{Q'}^{Q''}) h_{Q''}^{Q'}
    每对 Haar 向量 sup 积 <= 1；复杂度 max(m, n) + 1

HaarShiftSpec（复杂度 n）：
    Ш f = sum_Q Ш_Q Delta^n_Q f，Ш_Q 的核在 chld_n(Q) 的格上为常数，|a_Q| <= |Q|^{-1}
    输入、输出两侧都投影到 Delta^n_Q L2（Q 上均值为 0）

存储：
- 初等 shift：entries[Q] = (left, right)，形状 (2^m, 2^n, 2)，
  left[i, j] 是 h_{Q'_i}^{Q''_j} 在 Q'_i 两个孩子上的取值，right[i, j] 是 h_{Q''_j}^{Q'_i}
- 一般 shift：kernels[L] 形状 (2^L, 2^n, 2^n)，按层整块存，便于 einsum
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from haarlab_1_0.core.dyadic import DyadicGrid, DyadicNode, HaarVector, StepFunction, level_averages
from haarlab_1_0.errors import GridError, InputError, NormalizationError
from haarlab_1_0.operators.base import HaarOperator
from haarlab_1_0.weights.weights import SeedLike

NORM_TOL = 1e-12


# =========================================================
# 初等 shift
# =========================================================
@dataclass(frozen=True, eq=False)
class ElementaryShiftSpec(HaarOperator):
    grid: DyadicGrid
    m: int
    n: int
    entries: Mapping[DyadicNode, Tuple[np.ndarray, np.ndarray]] = field(repr=False)

    def __post_init__(self) -> None:
        if self.m < 0 or self.n < 0:
            raise InputError(f"m, n must be >= 0, got m={self.m} n={self.n}")
        shape = (1 << self.m, 1 << self.n, 2)
        clean: Dict[DyadicNode, Tuple[np.ndarray, np.ndarray]] = {}
        for q in sorted(self.entries):
            left, right = (np.array(a, dtype=float) for a in self.entries[q])
            if q.level + max(self.m, self.n) + 1 > self.grid.depth:
                raise GridError(
                    f"Q={q.key} needs depth {q.level + max(self.m, self.n) + 1} > {self.grid.depth}",
                    {"Q": q.key},
                )
            if left.shape != shape or right.shape != shape:
                raise InputError(f"Q={q.key}: Haar pair arrays must have shape {shape}", {"Q": q.key})
            for name, arr in (("left", left), ("right", right)):
                if np.any(np.abs(arr.sum(axis=2)) > NORM_TOL * np.maximum(1.0, np.abs(arr).max(axis=2))):
                    raise NormalizationError(f"Q={q.key}: {name} Haar vectors are not mean-zero", {"Q": q.key})
            prod = np.abs(left).max(axis=2) * np.abs(right).max(axis=2)
            if np.any(prod > 1.0 + NORM_TOL):
                i, j = np.unravel_index(int(np.argmax(prod)), prod.shape)
                raise NormalizationError(
                    f"Q={q.key}: sup-norm product {prod[i, j]:.17g} > 1 at pair ({i}, {j})",
                    {"Q": q.key, "pair": [int(i), int(j)], "product": float(prod[i, j])},
                )
            left.setflags(write=False)
            right.setflags(write=False)
            clean[q] = (left, right)
        object.__setattr__(self, "entries", clean)

    @property
    def complexity(self) -> int:
        return max(self.m, self.n) + 1

    def pair(self, q: DyadicNode, i: int, j: int) -> Tuple[HaarVector, HaarVector]:
        """(h_{Q'}^{Q''}, h_{Q''}^{Q'})，Q' = chld_m(Q)[i]，Q'' = chld_n(Q)[j]"""
        left, right = self.entries[q]
        q1 = DyadicNode(q.level + self.m, (q.position << self.m) + i)
        q2 = DyadicNode(q.level + self.n, (q.position << self.n) + j)
        return HaarVector(q1, tuple(left[i, j])), HaarVector(q2, tuple(right[i, j]))

    def _transfer(self, x: np.ndarray, src: int, dst: int, adjoint: bool) -> np.ndarray:
        """src/dst 为 m 或 n；adjoint 时两侧 Haar 角色互换"""
        depth = self.grid.depth
        cache: Dict[int, np.ndarray] = {}
        out_levels: Dict[int, np.ndarray] = {}
        for q, (left, right) in self.entries.items():
            a_vec, b_vec = (right, left) if adjoint else (left, right)
            lv_in = q.level + src + 1
            if lv_in not in cache:
                cache[lv_in] = level_averages(x, lv_in)
            span_in = 1 << (src + 1)
            a = cache[lv_in][q.position * span_in:(q.position + 1) * span_in].reshape(1 << src, 2)
            # (f, h) = sum_c h_c <f>_c |P|/2，|P| = 2^{-(L+src)}；再乘 |Q|^{-1} = 2^L
            half = 2.0 ** (-(q.level + src)) / 2.0
            if adjoint:
                s = np.einsum("ijc,jc->ij", a_vec, a) * half * 2.0**q.level
                contrib = np.einsum("ij,ijc->ic", s, b_vec)
            else:
                s = np.einsum("ijc,ic->ij", a_vec, a) * half * 2.0**q.level
                contrib = np.einsum("ij,ijc->jc", s, b_vec)
            lv_out = q.level + dst + 1
            buf = out_levels.setdefault(lv_out, np.zeros(1 << lv_out))
            span_out = 1 << (dst + 1)
            buf[q.position * span_out:(q.position + 1) * span_out] += contrib.reshape(-1)
        out = np.zeros(self.grid.n_leaves)
        for lv, buf in out_levels.items():
            out += np.repeat(buf, 1 << (depth - lv))
        return out

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self._transfer(np.asarray(x, dtype=float), self.m, self.n, adjoint=False)

    def rmatvec(self, y: np.ndarray) -> np.ndarray:
        return self._transfer(np.asarray(y, dtype=float), self.n, self.m, adjoint=True)


def gen_random_elementary(
    grid: DyadicGrid,
    m: int,
    n: int,
    seed: SeedLike,
    target: float = 1.0,
    levels: Optional[Iterable[int]] = None,
) -> ElementaryShiftSpec:
    """随机均值为零的 Haar 对，缩放到 sup 积恰为 target（默认 1，归一化取紧）"""
    rng = np.random.default_rng(seed)
    top = grid.depth - max(m, n) - 1
    if top < 0:
        raise GridError(f"depth {grid.depth} too shallow for m={m}, n={n}")
    use = sorted(levels) if levels is not None else list(range(top + 1))
    entries: Dict[DyadicNode, Tuple[np.ndarray, np.ndarray]] = {}
    for lv in use:
        for p in range(1 << lv):
            c1 = rng.standard_normal((1 << m, 1 << n))
            c2 = rng.standard_normal((1 << m, 1 << n))
            c1[c1 == 0.0] = 1.0
            c2[c2 == 0.0] = 1.0
            k = np.sqrt(target / (np.abs(c1) * np.abs(c2)))
            c1, c2 = c1 * k, c2 * k
            entries[DyadicNode(lv, p)] = (np.stack([c1, -c1], axis=2), np.stack([c2, -c2], axis=2))
    return ElementaryShiftSpec(grid, m, n, entries)


# =========================================================
# 一般 Haar shift
# =========================================================
@dataclass(frozen=True, eq=False)
class HaarShiftSpec(HaarOperator):
    grid: DyadicGrid
    n: int
    kernels: Mapping[int, np.ndarray] = field(repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InputError(f"complexity must be >= 1, got {self.n}")
        clean: Dict[int, np.ndarray] = {}
        for lv in sorted(self.kernels):
            k = np.array(self.kernels[lv], dtype=float)
            if lv < 0 or lv + self.n > self.grid.depth:
                raise GridError(
                    f"active level {lv} + complexity {self.n} exceeds depth {self.grid.depth}",
                    {"level": lv},
                )
            cells = 1 << self.n
            if k.shape != (1 << lv, cells, cells):
                raise InputError(f"level {lv}: kernel shape {k.shape} != {(1 << lv, cells, cells)}")
            bound = 2.0**lv
            over = np.abs(k).reshape(k.shape[0], -1).max(axis=1) > bound * (1.0 + NORM_TOL)
            if np.any(over):
                p = int(np.flatnonzero(over)[0])
                node = DyadicNode(lv, p)
                raise NormalizationError(
                    f"kernel at Q={node.key} exceeds |Q|^-1 = {bound}: {np.abs(k[p]).max():.17g}",
                    {"Q": node.key, "sup": float(np.abs(k[p]).max()), "bound": bound},
                )
            k.setflags(write=False)
            clean[lv] = k
        object.__setattr__(self, "kernels", clean)

    @property
    def complexity(self) -> int:
        return self.n

    @property
    def active_levels(self) -> List[int]:
        return sorted(self.kernels)

    def kernel(self, q: DyadicNode) -> np.ndarray:
        if q.level not in self.kernels:
            return np.zeros((1 << self.n, 1 << self.n))
        return self.kernels[q.level][q.position]

    def kernel_sup_ratio(self) -> float:
        """max_Q |Q| * ||a_Q||_inf，归一化要求 <= 1"""
        ratios = [float(np.abs(k).max()) * 2.0 ** (-lv) for lv, k in self.kernels.items() if k.size]
        return max(ratios, default=0.0)

    def _local(self, x: np.ndarray, lv: int) -> np.ndarray:
        cells = level_averages(x, lv + self.n).reshape(1 << lv, 1 << self.n)
        return cells - cells.mean(axis=1, keepdims=True)

    def _apply(self, x: np.ndarray, spec: str) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        depth = self.grid.depth
        out = np.zeros(self.grid.n_leaves)
        for lv, k in self.kernels.items():
            cell = 2.0 ** (-(lv + self.n))
            d = self._local(x, lv)
            y = np.einsum(spec, k, d) * cell
            y -= y.mean(axis=1, keepdims=True)
            out += np.repeat(y.reshape(-1), 1 << (depth - lv - self.n))
        return out

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self._apply(x, "qij,qj->qi")

    def rmatvec(self, y: np.ndarray) -> np.ndarray:
        return self._apply(y, "qji,qj->qi")

    def bilinear_terms(self, f: StepFunction, g: StepFunction) -> Tuple[List[DyadicNode], np.ndarray, np.ndarray]:
        """
        每个活跃 Q：
          term_Q  = <Ш_Q Delta^n_Q f, Delta^n_Q g>
          bound_Q = |Q|^{-1} ||Delta^n_Q f||_1 ||Delta^n_Q g||_1
        sum term_Q = <Ш f, g>
        """
        self._check(f)
        self._check(g)
        nodes: List[DyadicNode] = []
        terms: List[np.ndarray] = []
        bounds: List[np.ndarray] = []
        for lv, k in self.kernels.items():
            cell = 2.0 ** (-(lv + self.n))
            df = self._local(f.values, lv)
            dg = self._local(g.values, lv)
            y = np.einsum("qij,qj->qi", k, df) * cell
            terms.append(np.sum(y * dg, axis=1) * cell)
            bounds.append(2.0**lv * np.abs(df).sum(axis=1) * cell * np.abs(dg).sum(axis=1) * cell)
            nodes.extend(DyadicNode(lv, p) for p in range(1 << lv))
        if not nodes:
            return [], np.zeros(0), np.zeros(0)
        return nodes, np.concatenate(terms), np.concatenate(bounds)


def gen_random_shift(
    grid: DyadicGrid,
    n: int,
    seed: SeedLike,
    tight: bool = True,
    levels: Optional[Iterable[int]] = None,
) -> HaarShiftSpec:
    """tight=True：核元素全取 ±|Q|^{-1}；否则在 [-|Q|^{-1}, |Q|^{-1}] 上均匀"""
    if grid.depth < n:
        raise GridError(f"depth {grid.depth} < complexity {n}")
    rng = np.random.default_rng(seed)
    use = sorted(levels) if levels is not None else list(range(grid.depth - n + 1))
    cells = 1 << n
    kernels: Dict[int, np.ndarray] = {}
    for lv in use:
        shape = (1 << lv, cells, cells)
        if tight:
            k = (rng.integers(0, 2, size=shape) * 2.0 - 1.0) * 2.0**lv
        else:
            k = rng.uniform(-1.0, 1.0, size=shape) * 2.0**lv
        kernels[lv] = k
    return HaarShiftSpec(grid, n, kernels)


def elementary_to_general(spec: ElementaryShiftSpec) -> HaarShiftSpec:
    """
    a_Q(x, y) = |Q|^{-1} sum h_{Q''}^{Q'}(x) h_{Q'}^{Q''}(y)，在 chld_c(Q) 的格上取值，c = max(m,n)+1
    每对 (x, y) 只有一个 (Q', Q'') 贡献，所以 sup 仍 <= |Q|^{-1}
    """
    c = spec.complexity
    m, n = spec.m, spec.n
    cells = 1 << c
    kernels: Dict[int, np.ndarray] = {}
    for q, (left, right) in spec.entries.items():
        k = kernels.setdefault(q.level, np.zeros((1 << q.level, cells, cells)))
        # Q'_i 的两个孩子各占 2^{c-m-1} 个格
        hl = np.zeros((1 << m, 1 << n, cells))
        hr = np.zeros((1 << m, 1 << n, cells))
        wl = 1 << (c - m - 1)
        wr = 1 << (c - n - 1)
        for i in range(1 << m):
            for j in range(1 << n):
                base = i * 2 * wl
                hl[i, j, base:base + wl] = left[i, j, 0]
                hl[i, j, base + wl:base + 2 * wl] = left[i, j, 1]
                base = j * 2 * wr
                hr[i, j, base:base + wr] = right[i, j, 0]
                hr[i, j, base + wr:base + 2 * wr] = right[i, j, 1]
        k[q.position] += 2.0**q.level * np.einsum("ijx,ijy->xy", hr, hl)
    return HaarShiftSpec(spec.grid, c, kernels)


def slice_shift(spec: HaarShiftSpec, k: int) -> HaarShiftSpec:
    """
    第 k 层片：l(Q) = 2^{k + n j}，即 level ≡ -k (mod n)
    sum_k slice_shift(spec, k) = spec
    """
    if not 0 <= k < spec.n:
        raise InputError(f"slice index k must be in [0, {spec.n}), got {k}")
    kept = {lv: ker for lv, ker in spec.kernels.items() if (lv + k) % spec.n == 0}
    return HaarShiftSpec(spec.grid, spec.n, kept)


def apply_elementary_shift(spec: ElementaryShiftSpec, f: StepFunction) -> StepFunction:
    return spec.apply(f)


def apply_haar_shift(spec: HaarShiftSpec, f: StepFunction) -> StepFunction:
    return spec.apply(f)
