# -*- coding: utf-8 -*-
"""
测试用 Bellman 候选

- quadratic:      Phi(X) = -s (f^2 + g^2)
                  中点亏量 = s (Δf^2 + Δg^2) / 4 >= (s/2) |Δf||Δg|，gamma = s/2
- para-quadratic: Phi(X, M) = s (F - f^2 / (1 + M)) - s g^2
                  M = (M1 + M2)/2 + d，d ∈ [0, 1] 时亏量 >= (s/2) d |f| |Δg|，gamma = s/2
- dp:             有限深度 DP，定义域参数取 A' = 4.5 A；声明 gamma = 1，不保证成立，
                  在三元组上失败即 CandidateGainError（调用方计作“候选被拒”）

注册名格式："quadratic:scale=2"、"para-quadratic:scale=2"、"dp:k=2,res=0.5,f_points=3"
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from haarlab_1_0.bellman.domain import IF, IFF, IG, IM, PointLike, as_state, in_domain_batch, sample_domain_points
from haarlab_1_0.bellman.dp import MAX_DEPTH, GridSpec, dp_bellman
from haarlab_1_0.config import settings
from haarlab_1_0.errors import CandidateGainError, InputError

logger = logging.getLogger(__name__)

# 引理里的定义域放大倍数
DOMAIN_GROWTH = 4.5

Evaluator = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class BellmanCandidate:
    name: str
    A: float
    gamma: float
    evaluate: Evaluator = field(repr=False, compare=False)
    para: bool = False
    kind: str = "quadratic"
    scale: Optional[float] = None

    def __post_init__(self) -> None:
        if self.gamma <= 0:
            raise InputError(f"candidate gain must be > 0, got {self.gamma}")

    @property
    def width(self) -> int:
        return 7 if self.para else 6

    def values(self, states: np.ndarray) -> np.ndarray:
        s = np.atleast_2d(np.asarray(states, dtype=float))
        if s.shape[1] < self.width:
            raise InputError(f"candidate {self.name} needs {self.width} coordinates, got {s.shape[1]}")
        return np.asarray(self.evaluate(s[:, : self.width]), dtype=float)

    def __call__(self, X: PointLike) -> float:
        return float(self.values(as_state(X))[0])

    def gain_margins(
        self, X1: np.ndarray, X2: np.ndarray, M: Optional[np.ndarray] = None
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        按行返回 (亏量 - 声明 gain, 声明 gain)
        para 候选的父点 M 由调用方给出（M >= (M1+M2)/2），d = M - (M1+M2)/2
        """
        a = np.atleast_2d(np.asarray(X1, dtype=float))[:, : self.width]
        b = np.atleast_2d(np.asarray(X2, dtype=float))[:, : self.width]
        mid = (a + b) / 2.0
        if self.para:
            if M is None:
                raise InputError("para candidate needs the parent Carleson value M")
            d = np.asarray(M, dtype=float) - mid[:, IM]
            mid = mid.copy()
            mid[:, IM] = M
            gain = self.gamma * d * np.abs(mid[:, IF]) * np.abs(a[:, IG] - b[:, IG])
        else:
            gain = self.gamma * np.abs(a[:, IF] - b[:, IF]) * np.abs(a[:, IG] - b[:, IG])
        deficit = self.values(mid) - 0.5 * (self.values(a) + self.values(b))
        return deficit - gain, gain

    def check_gain(
        self,
        X1: np.ndarray,
        X2: np.ndarray,
        M: Optional[np.ndarray] = None,
        tol: Optional[float] = None,
        where: str = "",
    ) -> float:
        """返回最小余量；低于 -tol（按量级放缩）抛 CandidateGainError，detail 带三元组"""
        tol = settings.MARGIN_TOL if tol is None else tol
        margins, gain = self.gain_margins(X1, X2, M)
        scale = np.maximum(1.0, np.abs(gain))
        bad = margins < -tol * scale
        if np.any(bad):
            i = int(np.argmax(bad))
            a = np.atleast_2d(X1)[i]
            b = np.atleast_2d(X2)[i]
            raise CandidateGainError(
                f"candidate {self.name} misses its declared gain{' at ' + where if where else ''}",
                {"X1": a.tolist(), "X2": b.tolist(), "margin": float(margins[i]), "gamma": self.gamma},
            )
        return float(margins.min()) if margins.size else 0.0


# =========================================================
# 具体候选
# =========================================================
def candidate_quadratic(scale: float = 2.0, A: float = 1.0) -> BellmanCandidate:
    if scale <= 0:
        raise InputError(f"scale must be > 0, got {scale}")

    def evaluate(s: np.ndarray) -> np.ndarray:
        return -scale * (s[:, IF] ** 2 + s[:, IG] ** 2)

    return BellmanCandidate(f"quadratic:scale={scale:g}", A, scale / 2.0, evaluate, kind="quadratic", scale=scale)


def candidate_para_quadratic(scale: float = 2.0, A: float = 1.0) -> BellmanCandidate:
    if scale <= 0:
        raise InputError(f"scale must be > 0, got {scale}")

    def evaluate(s: np.ndarray) -> np.ndarray:
        M = s[:, IM]
        if np.any((M < -settings.DOMAIN_TOL) | (M > 1.0 + settings.DOMAIN_TOL)):
            raise InputError("para candidate needs M in [0, 1]")
        return scale * (s[:, IFF] - s[:, IF] ** 2 / (1.0 + M)) - scale * s[:, IG] ** 2

    return BellmanCandidate(
        f"para-quadratic:scale={scale:g}", A, scale / 2.0, evaluate, para=True, kind="para-quadratic", scale=scale
    )


def candidate_dp(A: float, k: int = 2, grid_spec: Optional[GridSpec] = None) -> BellmanCandidate:
    """A 为树的 A；DP 在 Dom(B_{4.5A}) 上求值"""
    if not 1 <= k <= MAX_DEPTH:
        raise InputError(f"dp candidate depth must be in [1, {MAX_DEPTH}], got {k}")
    A_dom = DOMAIN_GROWTH * A
    spec = (grid_spec or GridSpec()).resolved(k)

    def evaluate(s: np.ndarray) -> np.ndarray:
        logger.debug("dp candidate: %d evaluations at k=%d", len(s), k)
        return np.array([dp_bellman(x, A_dom, k, spec) for x in s])

    return BellmanCandidate(f"dp:k={k},res={spec.res:g}", A_dom, 1.0, evaluate, kind="dp")


def _parse_params(body: str) -> Dict[str, str]:
    out: Dict[str, str] = {}
    if not body:
        return out
    for part in body.split(","):
        key, sep, val = part.partition("=")
        if not sep or not key.strip():
            raise InputError(f"bad candidate parameter: {part!r}")
        out[key.strip()] = val.strip()
    return out


def parse_candidate(text: str, A: float = 1.0) -> BellmanCandidate:
    name, _, body = (text or "").strip().partition(":")
    if name not in ("quadratic", "para-quadratic", "dp"):
        raise InputError(f"unknown candidate: {text!r} (expected quadratic, para-quadratic or dp)")
    params = _parse_params(body)
    try:
        if name == "quadratic":
            cand = candidate_quadratic(float(params.pop("scale", 2.0)), A)
        elif name == "para-quadratic":
            cand = candidate_para_quadratic(float(params.pop("scale", 2.0)), A)
        else:
            k = int(params.pop("k", 2))
            res = params.pop("res", None)
            spec = GridSpec(float(res) if res is not None else None, int(params.pop("f_points", 3)))
            cand = candidate_dp(A, k, spec)
    except InputError:
        raise
    except ValueError as e:
        raise InputError(f"bad candidate parameter in {text!r}: {e}") from e
    if params:
        raise InputError(f"unknown parameters for candidate {name}: {sorted(params)}")
    return cand


# =========================================================
# 抽样验证声明的 gain
# =========================================================
def sample_gain_check(candidate: BellmanCandidate, count: int, A: float, seed=0) -> float:
    """
    在 Dom(B_A) 内随机取中点 X 和方向，构造 X1, X2 = X ± t D（都在定义域内）
    返回最小余量；违规抛 CandidateGainError
    """
    rng = np.random.default_rng(seed)
    X = sample_domain_points(count, A, rng)
    D = rng.standard_normal((count, 6)) * np.abs(X) * 0.5
    X1, X2 = X + D, X - D
    ok = in_domain_batch(X1, A) & in_domain_batch(X2, A)
    X1, X2 = X1[ok], X2[ok]
    if candidate.para:
        M1 = rng.uniform(0.0, 1.0, len(X1))
        M2 = rng.uniform(0.0, 1.0, len(X1))
        avg = (M1 + M2) / 2.0
        M = avg + rng.uniform(0.0, 1.0, len(X1)) * (1.0 - avg)
        return candidate.check_gain(np.column_stack([X1, M1]), np.column_stack([X2, M2]), M)
    return candidate.check_gain(X1, X2)
