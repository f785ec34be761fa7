# -*- coding: utf-8 -*-
"""
二次型工具

Q[..., x, y, ...] >= 2|xy| 对全部自变量成立时，存在 alpha > 0 使 Q >= alpha x^2 + alpha^{-1} y^2。

先把其余变量 z 极小化掉得到 (x, y) 边缘形式 a x^2 + 2 b xy + c y^2（Schur 补），
假设等价于 [[a, b -+ 1], [b -+ 1, c]] 都半正定，即 a, c >= 0 且 ac >= (|b| + 1)^2。
取 alpha = sqrt(a / c)：差形式的边缘行列式恰为 (sqrt(ac) - 1)^2 - b^2 >= 0。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from haarlab_1_0.errors import InputError, MarginViolation, QuadraticFormError

logger = logging.getLogger(__name__)

PSD_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class QuadraticForm:
    matrix: np.ndarray
    names: Tuple[str, ...]
    x: str = "x"
    y: str = "y"
    ix: int = field(init=False, repr=False)
    iy: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        m = np.array(self.matrix, dtype=float)
        names = tuple(self.names)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != len(names):
            raise InputError(f"matrix shape {m.shape} does not match {len(names)} names")
        if len(set(names)) != len(names):
            raise InputError(f"duplicate variable names: {names}")
        if not np.array_equal(m, m.T):
            raise InputError("quadratic form matrix must be exactly symmetric")
        if self.x not in names or self.y not in names or self.x == self.y:
            raise InputError(f"distinguished pair ({self.x}, {self.y}) must be two of {names}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "ix", names.index(self.x))
        object.__setattr__(self, "iy", names.index(self.y))

    @classmethod
    def from_xy(cls, a: float, b: float, c: float) -> "QuadraticForm":
        """a x^2 + 2 b xy + c y^2"""
        return cls(np.array([[a, b], [b, c]]), ("x", "y"))

    def __call__(self, vec: Sequence[float]) -> float:
        v = np.asarray(vec, dtype=float)
        return float(v @ self.matrix @ v)

    def others(self) -> np.ndarray:
        return np.array([i for i in range(len(self.names)) if i not in (self.ix, self.iy)], dtype=int)


def _extend(Q: QuadraticForm, xy: np.ndarray, z_map: np.ndarray) -> np.ndarray:
    """(x, y) 扩成全向量，z 取极小化点"""
    full = np.zeros(len(Q.names))
    full[Q.ix], full[Q.iy] = xy
    others = Q.others()
    if others.size:
        full[others] = z_map @ xy
    return full


def marginal_xy(Q: QuadraticForm) -> Tuple[np.ndarray, np.ndarray]:
    """
    返回 (2x2 边缘矩阵, z = Z (x, y) 的映射矩阵 Z)
    其余变量块不半正定、或耦合不在其值域内时，形式在 (x,y)=0 附近无下界，直接报错
    """
    m = Q.matrix
    xy = np.array([Q.ix, Q.iy])
    others = Q.others()
    P = m[np.ix_(xy, xy)]
    if others.size == 0:
        return P, np.zeros((0, 2))
    S = m[np.ix_(others, others)]
    R = m[np.ix_(xy, others)]
    evals, evecs = np.linalg.eigh(S)
    scale = max(1.0, float(np.abs(m).max()))
    if evals[0] < -PSD_TOL * scale:
        witness = np.zeros(len(Q.names))
        witness[others] = evecs[:, 0]
        raise QuadraticFormError(
            "form is unbounded below in the non-distinguished variables",
            {"witness": witness.tolist(), "names": list(Q.names), "value": Q(witness)},
        )
    S_pinv = np.linalg.pinv(S, rcond=PSD_TOL)
    if not np.allclose(S @ S_pinv @ R.T, R.T, atol=PSD_TOL * scale):
        # R 在 S 的零空间上有分量：沿该方向 Q 线性趋于 -inf
        null = evecs[:, np.abs(evals) <= PSD_TOL * scale]
        coupling = R @ null
        j = int(np.argmax(np.abs(coupling).max(axis=0)))
        xy_dir = coupling[:, j]
        witness = np.zeros(len(Q.names))
        witness[Q.ix], witness[Q.iy] = xy_dir / np.linalg.norm(xy_dir)
        t = (abs(Q(witness)) + 2.0 + 1.0) / max(np.linalg.norm(xy_dir), 1e-300)
        witness[others] = -t * null[:, j]
        raise QuadraticFormError(
            "form is unbounded below along a null direction coupled to (x, y)",
            {"witness": witness.tolist(), "names": list(Q.names), "value": Q(witness)},
        )
    Z = -S_pinv @ R.T
    return P - R @ S_pinv @ R.T, Z


def quadratic_gain_split(Q: QuadraticForm) -> float:
    P, Z = marginal_xy(Q)
    a, b, c = float(P[0, 0]), float(P[0, 1]), float(P[1, 1])
    scale = max(1.0, abs(a), abs(b), abs(c))

    for sgn in (1.0, -1.0):
        # Q - 2 sgn xy 的边缘
        test = np.array([[a, b - sgn], [b - sgn, c]])
        evals, evecs = np.linalg.eigh(test)
        if evals[0] < -PSD_TOL * scale:
            witness = _extend(Q, evecs[:, 0], Z)
            lhs = Q(witness)
            rhs = 2.0 * abs(witness[Q.ix] * witness[Q.iy])
            raise QuadraticFormError(
                f"Q >= 2|xy| fails: Q(w) = {lhs:.6g} < 2|xy| = {rhs:.6g}",
                {"witness": witness.tolist(), "names": list(Q.names), "Q": lhs, "two_xy": rhs},
            )
    if a <= 0.0 or c <= 0.0:
        raise QuadraticFormError("degenerate marginal form", {"a": a, "b": b, "c": c})

    alpha = float(np.sqrt(a / c))
    diff = np.array(Q.matrix, dtype=float)
    diff[Q.ix, Q.ix] -= alpha
    diff[Q.iy, Q.iy] -= 1.0 / alpha
    low = float(np.linalg.eigvalsh(diff)[0])
    if low < -PSD_TOL * max(1.0, float(np.abs(Q.matrix).max())):
        raise MarginViolation(
            f"Q - (alpha x^2 + y^2/alpha) not PSD for alpha={alpha:.12g} (min eigenvalue {low:.3g})",
            {"alpha": alpha, "min_eigenvalue": low},
        )
    logger.debug("quadratic gain split: alpha=%.12g, min eigenvalue of difference %.3g", alpha, low)
    return alpha
