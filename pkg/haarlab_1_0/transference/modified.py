# -*- coding: utf-8 -*-
"""
修改后的鞅 X^±

x_J^± = 1 ± alpha_J（叶子上），对节点 I：
  S_I^± = sum_{J ⊂ I} x_J^±
  X_I^± = sum_{J ⊂ I} x_J^± X_J / S_I^±
  theta_I^± = S_I^± / S_{parent(I)}^±
于是 theta_{I1} + theta_{I2} = 1，theta_{I1} X_{I1} + theta_{I2} X_{I2} = X_I（中点恒等式），
沿路径的乘积 prod theta = x_I 2^{-n}，(X^+ + X^-)/2 = X_{I0}（para 树的 M 分量为 M_{I0} - d0）。
x ∈ [2/3, 4/3] 给出 u_I^± <= 2 u_I、v_I^± <= 2 v_I，于是 X_I^± ∈ Dom(B_{4A})，
兄弟线段中点的 uv <= 4A，线段引理给出整条线段 uv <= 4.5A。
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

import numpy as np

from haarlab_1_0.bellman.domain import IM, IU, IV, in_domain_batch, segment_max_uv, segment_max_uv_batch
from haarlab_1_0.config import settings
from haarlab_1_0.errors import MarginViolation
from haarlab_1_0.transference.models import MartingaleTree, TreePara
from haarlab_1_0.transference.plank import PlankFunctional, check_alpha

logger = logging.getLogger(__name__)

MIDPOINT_TOL = 1e-12
PRODUCT_TOL = 1e-10
DOMAIN_FACTOR = 4.0
SEGMENT_FACTOR = 4.5


@dataclass(frozen=True, eq=False)
class ModifiedTree:
    tree: MartingaleTree
    alpha: np.ndarray
    plus: Tuple[np.ndarray, ...]
    minus: Tuple[np.ndarray, ...]
    # theta_*[k] 对应第 k 层（k >= 1）；theta_*[0] 为根上的占位 1
    theta_plus: Tuple[np.ndarray, ...]
    theta_minus: Tuple[np.ndarray, ...]
    midpoint_error: float
    product_error: float

    @property
    def X_plus(self) -> np.ndarray:
        return self.plus[0][0]

    @property
    def X_minus(self) -> np.ndarray:
        return self.minus[0][0]

    def side(self, sign: int) -> Tuple[Tuple[np.ndarray, ...], Tuple[np.ndarray, ...]]:
        return (self.plus, self.theta_plus) if sign > 0 else (self.minus, self.theta_minus)


def _weighted_levels(leaves: np.ndarray, x: np.ndarray, n: int) -> Tuple[list, list]:
    N = leaves.shape[0]
    w = leaves.shape[1]
    points, sums = [], []
    for k in range(n + 1):
        block = N >> k
        S = x.reshape(1 << k, block).sum(axis=1)
        if k == n:
            P = leaves.copy()
        else:
            P = (x[:, None] * leaves).reshape(1 << k, block, w).sum(axis=1) / S[:, None]
        points.append(P)
        sums.append(S)
    return points, sums


def _violation(msg: str, **detail) -> MarginViolation:
    return MarginViolation(msg, detail)


def build_modified(tree: MartingaleTree, alpha: Union[PlankFunctional, np.ndarray]) -> ModifiedTree:
    a = check_alpha(alpha.alpha if isinstance(alpha, PlankFunctional) else alpha, tree.n_leaves)
    n = tree.n
    leaves = tree.states(n)
    out: Dict[int, Tuple[list, list]] = {}
    mid_err = 0.0
    prod_err = 0.0

    for sign in (1, -1):
        x = 1.0 + sign * a
        points, sums = _weighted_levels(leaves, x, n)
        thetas = [np.ones(1)]
        for k in range(1, n + 1):
            theta = sums[k] / np.repeat(sums[k - 1], 2)
            if np.any(theta < 0):
                raise _violation("negative theta", level=k, sign=sign)
            pair = theta[0::2] + theta[1::2]
            if np.max(np.abs(pair - 1.0)) > MIDPOINT_TOL:
                raise _violation("theta siblings do not sum to 1", level=k, sign=sign)
            mix = theta[0::2, None] * points[k][0::2] + theta[1::2, None] * points[k][1::2]
            scale = np.maximum(1.0, np.abs(points[k - 1]))
            err = float(np.max(np.abs(mix - points[k - 1]) / scale))
            if err > MIDPOINT_TOL:
                raise _violation(f"midpoint identity fails at level {k - 1} (error {err:.3g})", level=k - 1, sign=sign)
            mid_err = max(mid_err, err)
            thetas.append(theta)

        # 沿路径的乘积 = x_I 2^{-n}
        prod = np.ones(tree.n_leaves)
        for k in range(1, n + 1):
            prod *= np.repeat(thetas[k], 1 << (n - k))
        err = float(np.max(np.abs(prod - x / tree.n_leaves)))
        if err > PRODUCT_TOL:
            raise _violation(f"telescoping product identity fails (error {err:.3g})", sign=sign)
        prod_err = max(prod_err, err)

        for k in range(n + 1):
            base = tree.levels[k]
            for col, name in ((IU, "u"), (IV, "v")):
                over = points[k][:, col] > 2.0 * base[:, col] * (1.0 + MIDPOINT_TOL)
                if np.any(over):
                    j = int(np.argmax(over))
                    raise _violation(f"{name}^± > 2 {name} at {tree.node_key(k, j)}", node=tree.node_key(k, j), sign=sign)
        out[sign] = (points, thetas)

    root_mix = (out[1][0][0][0] + out[-1][0][0][0]) / 2.0
    root = tree.states(0)[0]
    # M 在根上跳 d0：(M^+ + M^-)/2 = 叶子 M 的均值 = M_{I0} - d0
    expected = root.copy()
    if isinstance(tree, TreePara):
        expected[IM] = root[IM] - tree.d0
    err = float(np.max(np.abs(root_mix - expected) / np.maximum(1.0, np.abs(expected))))
    if err > MIDPOINT_TOL:
        raise _violation(f"(X+ + X-)/2 != X0 (error {err:.3g})")
    mid_err = max(mid_err, err)

    return ModifiedTree(
        tree=tree,
        alpha=a,
        plus=tuple(out[1][0]),
        minus=tuple(out[-1][0]),
        theta_plus=tuple(out[1][1]),
        theta_minus=tuple(out[-1][1]),
        midpoint_error=mid_err,
        product_error=prod_err,
    )


# =========================================================
# 定义域检查
# =========================================================
@dataclass(frozen=True)
class DomainReport:
    A: float
    max_uv_ratio: float
    max_segment_ratio: float
    segments: int
    root_segment_max: float

    def to_dict(self) -> dict:
        return {
            "A": self.A,
            "max_uv_over_4A": self.max_uv_ratio,
            "max_segment_uv_over_4_5A": self.max_segment_ratio,
            "segments": self.segments,
            "root_segment_max_uv": self.root_segment_max,
        }


def verify_domains(mod: ModifiedTree, A: Optional[float] = None) -> DomainReport:
    tree = mod.tree
    A = float(tree.A if A is None else A)
    dom_A, seg_A = DOMAIN_FACTOR * A, SEGMENT_FACTOR * A
    tol = settings.SEGMENT_PRE_TOL
    max_uv = 0.0
    max_seg = 0.0
    worst: Optional[Tuple[np.ndarray, np.ndarray]] = None
    segments = 0

    for sign in (1, -1):
        points, _ = mod.side(sign)
        for k, P in enumerate(points):
            X = P[:, :6]
            ok = in_domain_batch(X, dom_A)
            if not ok.all():
                j = int(np.argmin(ok))
                raise _violation(
                    f"X^± at {tree.node_key(k, j)} not in Dom(B_4A)",
                    node=tree.node_key(k, j), sign=sign, point=X[j].tolist(), A=A,
                )
            max_uv = max(max_uv, float(np.max(X[:, IU] * X[:, IV])) / dom_A)
            if k == 0:
                continue
            E1, E2 = X[0::2], X[1::2]
            mid = (E1 + E2) / 2.0
            for name, E in (("left", E1), ("mid", mid), ("right", E2)):
                uv = E[:, IU] * E[:, IV]
                if np.any(uv > dom_A * (1.0 + tol)):
                    j = int(np.argmax(uv))
                    raise _violation(
                        f"sibling segment under {tree.node_key(k - 1, j)}: {name} point has uv > 4A",
                        node=tree.node_key(k - 1, j), sign=sign, uv=float(uv[j]),
                    )
            best, _ = segment_max_uv_batch(E1[:, [IU, IV]], E2[:, [IU, IV]])
            segments += best.shape[0]
            j = int(np.argmax(best))
            if best[j] > seg_A * (1.0 + tol):
                raise _violation(
                    f"sibling segment under {tree.node_key(k - 1, j)} leaves Dom(B_4.5A)",
                    node=tree.node_key(k - 1, j), sign=sign, max_uv=float(best[j]), A=A,
                )
            if best[j] / seg_A > max_seg:
                max_seg = float(best[j] / seg_A)
                worst = (E1[j], E2[j])

    # 根上的线段 [X-, X+]，中点 X0 ∈ Dom(B_A)
    root_max = segment_max_uv(mod.X_minus[:6], mod.X_plus[:6], A=dom_A)
    segments += 1
    if root_max > seg_A * (1.0 + tol):
        raise _violation("root segment [X-, X+] leaves Dom(B_4.5A)", max_uv=root_max, A=A)
    max_seg = max(max_seg, root_max / seg_A)
    if worst is not None:
        # 最坏的兄弟线段再走一遍带网格交叉验证的标量版本
        segment_max_uv(worst[0], worst[1], A=dom_A)

    logger.debug("verify_domains A=%g: uv/4A=%.4g seg/4.5A=%.4g", A, max_uv, max_seg)
    return DomainReport(A, max_uv, max_seg, segments, root_max)
