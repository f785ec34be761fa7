# -*- coding: utf-8 -*-
"""
有限深度 Bellman DP（真 B_A 的下界近似）

B^0 = 0
B^k(X) = sup_{X = (X1+X2)/2, X1,X2 ∈ Dom(B_A)} |f1 - f2||g1 - g2| + (B^{k-1}(X1) + B^{k-1}(X2)) / 2

分裂参数化：X± = X ± D，
  du = a u, dv = b v, dF = c F, dG = c' G，a, b, c, c' 取 (-1, 1) 内步长 res 的格点（含 0）
  给定 (b, c)，df 的可行集是区间 [max(-f - r+, f - r-), min(-f + r+, f + r-)]，r± = sqrt((F ± dF)(v ± dv))
  dg 同理（用 (G ± dG)(u ± du)）
  两半都要 1 <= uv <= A
k = 1 可分离：max 4 |df||dg| = max_{(a,b) 合法} 4 Mf[b] Mg[a]
k >= 2 枚举全部格点组合，每个区间取 f_points 个样本（含端点，可行时加上 0）

F, G 的分裂落在 (0, 2F) x (0, 2G) 内（⊂ [0, 4F] x [0, 4G]）。
memo 只在一次求值内有效（BellmanDP 实例）。
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from haarlab_1_0.bellman.domain import IF, IFF, IG, IGG, IU, IV, PointLike, as_state, in_domain, sample_domain_points
from haarlab_1_0.config import settings
from haarlab_1_0.errors import DomainError, InputError
from haarlab_1_0.weights.weights import SeedLike

logger = logging.getLogger(__name__)

MAX_DEPTH = 3
BOUNDARY_TOL = 1e-12

# k = 1 默认 0.05；k >= 2 枚举规模是 levels^4 * f_points^2，默认放粗
DEFAULT_RES_K1 = 0.05
DEFAULT_RES_DEEP = 0.5


@dataclass(frozen=True)
class GridSpec:
    res: Optional[float] = None
    f_points: int = 3

    def __post_init__(self) -> None:
        if self.res is not None and not 0.0 < self.res < 1.0:
            raise InputError(f"grid res must be in (0, 1), got {self.res}")
        if self.f_points < 2:
            raise InputError(f"f_points must be >= 2, got {self.f_points}")

    def resolved(self, k: int) -> "GridSpec":
        if self.res is not None:
            return self
        return GridSpec(DEFAULT_RES_K1 if k <= 1 else DEFAULT_RES_DEEP, self.f_points)

    def levels(self) -> np.ndarray:
        assert self.res is not None
        m = int(math.ceil(1.0 / self.res)) - 1
        return self.res * np.arange(-m, m + 1, dtype=float)


def _intervals(x: float, X2: float, other: np.ndarray, c: np.ndarray, o: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    x = f（或 g），X2 = F（或 G），other = v（或 u）
    c: 二阶矩分裂比例，o: 对偶权分裂比例，广播成同形数组
    返回 (lo, hi)；lo > hi 表示不可行
    """
    rp = np.sqrt(np.maximum(X2 * (1.0 + c) * other * (1.0 + o), 0.0))
    rm = np.sqrt(np.maximum(X2 * (1.0 - c) * other * (1.0 - o), 0.0))
    lo = np.maximum(-x - rp, x - rm)
    hi = np.minimum(-x + rp, x + rm)
    # 边界 f^2 = F v 上允许 1e-12 的相对松弛
    slack = BOUNDARY_TOL * np.maximum(1.0, np.maximum(rp, rm))
    bad = lo > hi + slack
    mid = (lo + hi) / 2.0
    lo = np.where(lo > hi, mid, lo)
    hi = np.where(hi < lo, mid, hi)
    return np.where(bad, np.inf, lo), np.where(bad, -np.inf, hi)


def _uv_valid(u: float, v: float, a: np.ndarray, b: np.ndarray, A: float) -> np.ndarray:
    ok = np.ones(np.broadcast(a, b).shape, dtype=bool)
    for s in (1.0, -1.0):
        p = u * (1.0 + s * a) * v * (1.0 + s * b)
        ok &= (p >= 1.0 - BOUNDARY_TOL * max(1.0, p.max())) & (p <= A * (1.0 + BOUNDARY_TOL))
    return ok


def _depth_one(X: np.ndarray, A: float, levels: np.ndarray) -> float:
    f, g, F, G, u, v = X[:6]
    c = levels[None, :]
    lo_f, hi_f = _intervals(f, F, v, c, levels[:, None])  # [b, c]
    lo_g, hi_g = _intervals(g, G, u, c, levels[:, None])  # [a, c']
    best_f = np.where(lo_f <= hi_f, np.maximum(np.abs(lo_f), np.abs(hi_f)), -np.inf).max(axis=1)
    best_g = np.where(lo_g <= hi_g, np.maximum(np.abs(lo_g), np.abs(hi_g)), -np.inf).max(axis=1)
    valid = _uv_valid(u, v, levels[:, None], levels[None, :], A)  # [a, b]
    with np.errstate(invalid="ignore"):
        prod = 4.0 * best_g[:, None] * best_f[None, :]
    prod = np.where(valid & np.isfinite(prod), prod, -np.inf)
    out = float(prod.max())
    return max(out, 0.0)


def admissible_splits(X: PointLike, A: float, grid_spec: GridSpec) -> np.ndarray:
    """
    格点上全部合法分裂向量 D（形状 (m, 6)），X ± D 都在 Dom(B_A) 内；D = 0 总在其中
    """
    x = as_state(X)[:6]
    f, g, F, G, u, v = x
    lv = grid_spec.levels()
    a, b, c, c2 = (arr.ravel() for arr in np.meshgrid(lv, lv, lv, lv, indexing="ij"))
    keep = _uv_valid(u, v, a, b, A)
    lo_f, hi_f = _intervals(f, F, v, c, b)
    lo_g, hi_g = _intervals(g, G, u, c2, a)
    keep &= (lo_f <= hi_f) & (lo_g <= hi_g)
    a, b, c, c2 = a[keep], b[keep], c[keep], c2[keep]
    lo_f, hi_f, lo_g, hi_g = lo_f[keep], hi_f[keep], lo_g[keep], hi_g[keep]

    s = np.linspace(0.0, 1.0, grid_spec.f_points)
    df = lo_f[:, None] + (hi_f - lo_f)[:, None] * s[None, :]
    dg = lo_g[:, None] + (hi_g - lo_g)[:, None] * s[None, :]
    zf = np.where((lo_f <= 0.0) & (hi_f >= 0.0), 0.0, np.nan)
    zg = np.where((lo_g <= 0.0) & (hi_g >= 0.0), 0.0, np.nan)
    df = np.concatenate([df, zf[:, None]], axis=1)
    dg = np.concatenate([dg, zg[:, None]], axis=1)

    P = df.shape[1]
    DF = np.repeat(df, P, axis=1)
    DG = np.tile(dg, (1, P))
    m = DF.shape[0]
    D = np.empty((m, P * P, 6))
    D[:, :, IF] = DF
    D[:, :, IG] = DG
    D[:, :, IFF] = (c * F)[:, None]
    D[:, :, IGG] = (c2 * G)[:, None]
    D[:, :, IU] = (a * u)[:, None]
    D[:, :, IV] = (b * v)[:, None]
    D = D.reshape(-1, 6)
    D = D[np.all(np.isfinite(D), axis=1)]
    return np.unique(D, axis=0)


@dataclass
class BellmanDP:
    """一次求值的求解器；memo 以 (k, 精确状态元组) 为键"""

    A: float
    grid_spec: GridSpec
    memo: Dict[Tuple[int, Tuple[float, ...]], float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.A < 1.0:
            raise InputError(f"A must be >= 1, got {self.A}")
        if self.grid_spec.res is None:
            raise InputError("BellmanDP needs a resolved grid spec")
        self._levels = self.grid_spec.levels()

    def value(self, X: np.ndarray, k: int) -> float:
        if k == 0:
            return 0.0
        key = (k, tuple(float(t) for t in X[:6]))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if k == 1:
            out = _depth_one(X, self.A, self._levels)
        else:
            out = 0.0
            for D in admissible_splits(X, self.A, self.grid_spec):
                gain = 4.0 * abs(D[IF]) * abs(D[IG])
                cand = gain + 0.5 * (self.value(X[:6] + D, k - 1) + self.value(X[:6] - D, k - 1))
                if cand > out:
                    out = cand
        self.memo[key] = out
        return out


def dp_bellman(X: PointLike, A: float, k: int, grid_spec: Optional[GridSpec] = None) -> float:
    if not 0 <= k <= MAX_DEPTH:
        raise InputError(f"dp depth k must be in [0, {MAX_DEPTH}], got {k}")
    x = as_state(X)[:6]
    if not in_domain(x, A):
        raise DomainError(f"point {x.tolist()} not in Dom(B_A) for A={A}", {"point": x.tolist(), "A": A})
    if k == 0:
        return 0.0
    spec = (grid_spec or GridSpec()).resolved(k)
    return BellmanDP(A, spec).value(x, k)


# =========================================================
# 抽样检查：单调性 + 格点分辨率内的中点凹性
# =========================================================
@dataclass(frozen=True)
class DPConcavityReport:
    samples: int
    k: int
    A: float
    res: float
    monotone_failures: int
    step_failures: int
    concavity_failures: int
    max_defect: float
    max_range_ratio: float

    @property
    def ok(self) -> bool:
        return self.monotone_failures == 0 and self.step_failures == 0 and self.concavity_failures == 0

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "k": self.k,
            "A": self.A,
            "res": self.res,
            "monotone_failures": self.monotone_failures,
            "step_failures": self.step_failures,
            "concavity_failures": self.concavity_failures,
            "max_defect": self.max_defect,
            "max_range_ratio": self.max_range_ratio,
            "ok": self.ok,
        }


def dp_concavity_check(
    A: float,
    k: int,
    grid_spec: Optional[GridSpec] = None,
    samples: int = 100,
    seed: SeedLike = 0,
) -> DPConcavityReport:
    """
    对每个样本 X 随机取一个非零格点分裂 X± = X ± D：
      单调：B^k(X) >= B^{k-1}(X)
      DP 步：B^k(X) >= 4|df||dg| + (B^{k-1}(X+) + B^{k-1}(X-)) / 2（格点上精确成立）
      凹性：(B^k(X+) + B^k(X-)) / 2 - B^k(X) <= eps_grid，
            eps_grid = ((B^k - B^{k-1})(X+) + (B^k - B^{k-1})(X-)) / 2
    另外记录值域比 B^k / (A sqrt(FG)) 的最大值（拟合常数）
    """
    if not 1 <= k <= MAX_DEPTH:
        raise InputError(f"k must be in [1, {MAX_DEPTH}], got {k}")
    spec = (grid_spec or GridSpec()).resolved(k)
    rng = np.random.default_rng(seed)
    points = sample_domain_points(samples, A, rng)
    tol = settings.MARGIN_TOL

    mono = step = conc = 0
    max_defect = -np.inf
    max_range = 0.0
    for X in points:
        solver = BellmanDP(A, spec)
        splits = admissible_splits(X, A, spec)
        nonzero = splits[np.any(splits != 0.0, axis=1)]
        D = nonzero[rng.integers(len(nonzero))] if len(nonzero) else np.zeros(6)
        Xp, Xm = X + D, X - D

        bk = solver.value(X, k)
        bk1 = solver.value(X, k - 1)
        bk_p, bk_m = solver.value(Xp, k), solver.value(Xm, k)
        bk1_p, bk1_m = solver.value(Xp, k - 1), solver.value(Xm, k - 1)
        scale = max(1.0, abs(bk))

        if bk < bk1 - tol * scale:
            mono += 1
        if bk < 4.0 * abs(D[IF]) * abs(D[IG]) + 0.5 * (bk1_p + bk1_m) - tol * scale:
            step += 1
        defect = 0.5 * (bk_p + bk_m) - bk
        eps = 0.5 * ((bk_p - bk1_p) + (bk_m - bk1_m))
        if defect > eps + tol * scale:
            conc += 1
        max_defect = max(max_defect, defect)
        fg = math.sqrt(X[IFF] * X[IGG])
        if fg > 0:
            max_range = max(max_range, bk / (A * fg))

    if mono or step or conc:
        logger.warning("dp concavity check: monotone=%d step=%d concavity=%d failures", mono, step, conc)
    logger.info("dp concavity check k=%d A=%g: %d samples, max defect %.3g", k, A, samples, max_defect)
    return DPConcavityReport(samples, k, A, float(spec.res), mono, step, conc, float(max_defect), float(max_range))
