# -*- coding: utf-8 -*-
"""
Bellman 定义域几何

状态 X = (f, g, F, G, u, v)，数据上对应
  f = <f>, g = <g>, F = <f^2 w>, G = <g^2 w^{-1}>, u = <w>, v = <w^{-1}>
Dom(B_A)：u, v > 0，1 <= uv <= A，f^2 <= F v，g^2 <= G u

segment_max_uv：线段上 u(t) v(t) 是 t 的二次式，闭式求顶点 + 网格交叉验证。
端点和中点都满足 uv <= A 时，最大值 <= 9A/8。
"""

from __future__ import annotations

import logging
from dataclasses import astuple, dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from haarlab_1_0.config import settings
from haarlab_1_0.errors import DomainError, InputError, MarginViolation

logger = logging.getLogger(__name__)

STATE_FIELDS = ("f", "g", "F", "G", "u", "v")
IF, IG, IFF, IGG, IU, IV = range(6)
IM = 6

SEGMENT_GRID_POINTS = 1001


@dataclass(frozen=True)
class BellmanPoint:
    f: float
    g: float
    F: float
    G: float
    u: float
    v: float

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, arr: Sequence[float]) -> "BellmanPoint":
        a = [float(x) for x in arr]
        if len(a) < 6:
            raise InputError(f"Bellman point needs 6 coordinates, got {len(a)}")
        return cls(*a[:6])

    def midpoint(self, other: "BellmanPoint") -> "BellmanPoint":
        return BellmanPoint.from_array((self.as_array() + other.as_array()) / 2.0)


@dataclass(frozen=True)
class BellmanPointPara:
    """X + Carleson 变量 M ∈ [0,1]，可选递减量 d >= 0"""

    point: BellmanPoint
    M: float
    d: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.append(self.point.as_array(), self.M)

    @classmethod
    def from_array(cls, arr: Sequence[float], d: float = 0.0) -> "BellmanPointPara":
        a = [float(x) for x in arr]
        if len(a) != 7:
            raise InputError(f"para point needs 7 coordinates, got {len(a)}")
        return cls(BellmanPoint(*a[:6]), a[6], d)


PointLike = Union[BellmanPoint, BellmanPointPara, Sequence[float], np.ndarray]


def as_state(X: PointLike) -> np.ndarray:
    if isinstance(X, (BellmanPoint, BellmanPointPara)):
        return X.as_array()
    return np.asarray(X, dtype=float)


# =========================================================
# 定义域
# =========================================================
def domain_margins(states: np.ndarray, A: float) -> np.ndarray:
    """
    按行返回相对余量（>= 0 表示满足）：
      [A - uv, uv - 1, Fv - f^2, Gu - g^2]，各自除以 max(1, |参照量|)
    """
    s = np.atleast_2d(np.asarray(states, dtype=float))
    uv = s[:, IU] * s[:, IV]
    fv = s[:, IFF] * s[:, IV]
    gu = s[:, IGG] * s[:, IU]
    return np.stack(
        [
            (A - uv) / max(1.0, A),
            (uv - 1.0) / np.maximum(1.0, uv),
            (fv - s[:, IF] ** 2) / np.maximum(1.0, np.abs(fv)),
            (gu - s[:, IG] ** 2) / np.maximum(1.0, np.abs(gu)),
        ],
        axis=1,
    )


def in_domain_batch(states: np.ndarray, A: float, tol: Optional[float] = None) -> np.ndarray:
    tol = settings.DOMAIN_TOL if tol is None else tol
    if A < 1.0:
        raise InputError(f"A must be >= 1, got {A}")
    s = np.atleast_2d(np.asarray(states, dtype=float))
    positive = (s[:, IU] > 0) & (s[:, IV] > 0)
    return positive & np.all(domain_margins(s, A) >= -tol, axis=1)


def in_domain(X: PointLike, A: float, tol: Optional[float] = None) -> bool:
    return bool(in_domain_batch(as_state(X)[:6], A, tol)[0])


# =========================================================
# 线段上的 uv 最大值
# =========================================================
def segment_max_uv_batch(uv_minus: np.ndarray, uv_plus: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    p(t) = (u0 + t du)(v0 + t dv)，t ∈ [0,1]
    du dv < 0 时为开口向下的抛物线，顶点 t* = -(u0 dv + v0 du) / (2 du dv)
    返回 (最大值, 取到最大值的 t)
    """
    a = np.atleast_2d(np.asarray(uv_minus, dtype=float))
    b = np.atleast_2d(np.asarray(uv_plus, dtype=float))
    u0, v0 = a[:, 0], a[:, 1]
    du, dv = b[:, 0] - u0, b[:, 1] - v0
    p0 = u0 * v0
    p1 = b[:, 0] * b[:, 1]
    best = np.maximum(p0, p1)
    t_best = np.where(p1 > p0, 1.0, 0.0)
    q = du * dv
    concave = q < 0
    safe_q = np.where(concave, q, 1.0)
    ts = np.where(concave, -(u0 * dv + v0 * du) / (2.0 * safe_q), 0.0)
    inside = concave & (ts > 0.0) & (ts < 1.0)
    pv = (u0 + ts * du) * (v0 + ts * dv)
    take = inside & (pv > best)
    best = np.where(take, pv, best)
    t_best = np.where(take, ts, t_best)
    return best, t_best


def check_segment_preconditions(X_minus: np.ndarray, X_plus: np.ndarray, A: float, tol: float) -> None:
    mid = (X_minus + X_plus) / 2.0
    for name, x in (("X_minus", X_minus), ("midpoint", mid), ("X_plus", X_plus)):
        u, v = x[IU], x[IV]
        if not (u > 0 and v > 0):
            raise DomainError(f"segment precondition: {name} has nonpositive u or v", {"point": name, "u": u, "v": v})
        if u * v > A * (1.0 + tol):
            raise DomainError(
                f"segment precondition: uv = {u * v:.17g} > A = {A} at {name}",
                {"point": name, "uv": float(u * v), "A": A},
            )


def segment_max_uv(
    X_minus: PointLike,
    X_plus: PointLike,
    A: Optional[float] = None,
    tol: Optional[float] = None,
) -> float:
    """
    A 给出时先验证端点和中点 uv <= A（相对容差 tol）。
    闭式结果与 1001 点网格搜索交叉验证，不一致即 MarginViolation。
    """
    xm = as_state(X_minus)
    xp = as_state(X_plus)
    if A is not None:
        check_segment_preconditions(xm, xp, A, settings.SEGMENT_PRE_TOL if tol is None else tol)
    best, _ = segment_max_uv_batch(xm[[IU, IV]], xp[[IU, IV]])
    value = float(best[0])

    t = np.linspace(0.0, 1.0, SEGMENT_GRID_POINTS)
    grid_vals = (xm[IU] + t * (xp[IU] - xm[IU])) * (xm[IV] + t * (xp[IV] - xm[IV]))
    grid_max = float(grid_vals.max())
    # 网格最大值不会超过真最大值；二次式在顶点附近的落差 <= |du dv| (dt/2)^2
    slack = abs((xp[IU] - xm[IU]) * (xp[IV] - xm[IV])) * (0.5 / (SEGMENT_GRID_POINTS - 1)) ** 2
    scale = max(1.0, abs(value))
    if grid_max > value + 1e-12 * scale or value - grid_max > slack + 1e-12 * scale:
        raise MarginViolation(
            f"closed-form segment max {value:.17g} disagrees with grid max {grid_max:.17g}",
            {"closed_form": value, "grid": grid_max},
        )
    if A is not None:
        logger.debug("segment max uv=%.12g (A=%g, ratio=%.6g)", value, A, value / A)
    return value


def extremal_segment(A: float = 1.0, eps: float = 1e-9) -> Tuple[BellmanPoint, BellmanPoint]:
    """u 从 1/2 走到 3/2，v 从 2A 走到 ~0，中点 uv ≈ A，最大值 ≈ 9A/8"""
    xm = BellmanPoint(0.0, 0.0, 1.0, 1.0, 0.5, 2.0 * A)
    xp = BellmanPoint(0.0, 0.0, 1.0, 1.0, 1.5, eps)
    return xm, xp


def sample_valid_segments(count: int, A: float, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """
    拒绝采样：端点 uv ∈ [1, A]，中点 uv <= A
    返回两组 (u, v)，形状 (count, 2)
    """
    if A < 1.0:
        raise InputError(f"A must be >= 1, got {A}")
    out_m: list = []
    out_p: list = []
    have = 0
    while have < count:
        k = max(2 * (count - have), 64)
        c_m = rng.uniform(1.0, A, k)
        c_p = rng.uniform(1.0, A, k)
        um = np.exp(rng.uniform(-3.0, 3.0, k))
        up = np.exp(rng.uniform(-3.0, 3.0, k))
        m = np.stack([um, c_m / um], axis=1)
        p = np.stack([up, c_p / up], axis=1)
        mid = (m + p) / 2.0
        ok = mid[:, 0] * mid[:, 1] <= A
        out_m.append(m[ok])
        out_p.append(p[ok])
        have += int(ok.sum())
    return np.concatenate(out_m)[:count], np.concatenate(out_p)[:count]


def sample_domain_points(count: int, A: float, rng: np.random.Generator) -> np.ndarray:
    """Dom(B_A) 内部的随机点，形状 (count, 6)"""
    u = np.exp(rng.uniform(-1.0, 1.0, count))
    v = rng.uniform(1.0, A, count) / u
    F = rng.uniform(0.1, 2.0, count)
    G = rng.uniform(0.1, 2.0, count)
    f = rng.uniform(-1.0, 1.0, count) * np.sqrt(F * v)
    g = rng.uniform(-1.0, 1.0, count) * np.sqrt(G * u)
    return np.stack([f, g, F, G, u, v], axis=1)
