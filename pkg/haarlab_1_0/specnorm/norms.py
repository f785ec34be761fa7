# -*- coding: utf-8 -*-
"""
加权算子范数

||T||_{L2(w) -> L2(w)} = 无权 L2 下 M = D T D^{-1} 的谱范数，D = sqrt(w)
M^* = D^{-1} T^* D

- dense：2^N <= DENSE_MAX_LEAVES 时直接把 M 拼成矩阵做 2-范数（SVD）
- power：在 Gram 映射 M^* M 上做幂迭代，按 Rayleigh 商增量收敛
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Literal, Optional

import numpy as np
from scipy.sparse.linalg import LinearOperator

from haarlab_1_0.config import settings
from haarlab_1_0.errors import ConvergenceError, InputError
from haarlab_1_0.operators.base import HaarOperator
from haarlab_1_0.weights.weights import SeedLike, Weight

logger = logging.getLogger(__name__)

Method = Literal["auto", "power", "dense"]


@dataclass(frozen=True)
class NormEstimate:
    value: float
    residual: float
    iterations: int
    method: str
    converged: bool = True

    def to_dict(self) -> dict:
        return asdict(self)


def conjugated_operator(T: HaarOperator, w: Weight) -> LinearOperator:
    if T.grid != w.grid:
        raise InputError(f"grid mismatch: operator depth {T.grid.depth}, weight depth {w.grid.depth}")
    d = np.sqrt(w.values)
    n = w.grid.n_leaves
    return LinearOperator(
        shape=(n, n),
        matvec=lambda x: d * T.matvec(np.ravel(x) / d),
        rmatvec=lambda y: T.rmatvec(np.ravel(y) * d) / d,
        dtype=float,
    )


def dense_norm(op: LinearOperator) -> NormEstimate:
    mat = op.matmat(np.eye(op.shape[1]))
    return NormEstimate(float(np.linalg.norm(mat, 2)), 0.0, 0, "dense")


def power_norm(
    op: LinearOperator,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    seed: SeedLike = 0,
) -> NormEstimate:
    tol = settings.POWER_TOL if tol is None else tol
    max_iter = settings.POWER_MAX_ITER if max_iter is None else max_iter
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(op.shape[1])
    x /= np.linalg.norm(x)
    lam_old = 0.0
    residual = np.inf
    for it in range(1, max_iter + 1):
        z = op.rmatvec(op.matvec(x))
        lam = float(np.dot(x, z))
        nz = float(np.linalg.norm(z))
        if nz == 0.0:
            return NormEstimate(0.0, 0.0, it, "power")
        residual = abs(lam - lam_old) / max(abs(lam), np.finfo(float).tiny)
        if residual <= tol:
            logger.debug("power iteration converged at %d iterations, norm=%.12g", it, np.sqrt(lam))
            return NormEstimate(float(np.sqrt(max(lam, 0.0))), residual, it, "power")
        lam_old = lam
        x = z / nz
    logger.warning("power iteration hit max_iter=%d, residual=%.3g", max_iter, residual)
    return NormEstimate(float(np.sqrt(max(lam_old, 0.0))), float(residual), max_iter, "power", converged=False)


def operator_norm_weighted(
    T: HaarOperator,
    w: Weight,
    tol: Optional[float] = None,
    method: Method = "auto",
    max_iter: Optional[int] = None,
    seed: SeedLike = 0,
    strict: bool = False,
) -> NormEstimate:
    """strict=True 时不收敛直接抛 ConvergenceError；否则估计带 converged=False 返回"""
    tol = settings.POWER_TOL if tol is None else tol
    max_iter = settings.POWER_MAX_ITER if max_iter is None else max_iter
    if tol <= 0:
        raise InputError(f"tol must be > 0, got {tol}")
    op = conjugated_operator(T, w)
    if method == "auto":
        method = "dense" if w.grid.n_leaves <= settings.DENSE_MAX_LEAVES else "power"
    if method == "dense":
        return dense_norm(op)
    if method != "power":
        raise InputError(f"unknown method: {method!r}")
    est = power_norm(op, tol=tol, max_iter=max_iter, seed=seed)
    if strict and not est.converged:
        raise ConvergenceError(
            f"power iteration did not converge in {max_iter} iterations", est.to_dict()
        )
    return est

