# -*- coding: utf-8 -*-
"""
主估计检查

普通树（系数 72）：
  lhs = (2^{-n} sum |f_I - f0|)(2^{-n} sum |g_I - g0|)
  rhs = (72 / gamma)(B(X0) - 2^{-n} sum B(X_I))
  中间链条逐项验证：
    第一步       B(X0) - (B(X+) + B(X-))/2 >= gamma |f+ - f-||g+ - g-|       （候选 gain，失败 = CandidateGainError）
    theta 凹性   B(X_I^±) >= theta_{I1} B(X_{I1}^±) + theta_{I2} B(X_{I2}^±)   （同上）
    伸缩         B(X^±) >= 2^{-n} sum x_I^± B(X_I)
    final_diff   B(X0) - 2^{-n} sum B(X_I) >= 4 gamma |f+ - f0||g+ - g0|
    移动         |f^± - f0| >= (1/12) 2^{-n} sum |f_I - f0|，g 同理
para 树（系数 36）：lhs = d0 |f0| (2^{-n} sum |g_I - g0|)，alpha 只控制 g（常数 1/6）。
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np

from haarlab_1_0.bellman.candidates import BellmanCandidate
from haarlab_1_0.bellman.domain import IF, IG
from haarlab_1_0.config import settings
from haarlab_1_0.errors import CandidateGainError, DomainError, InputError, MarginViolation
from haarlab_1_0.transference.modified import ModifiedTree, build_modified
from haarlab_1_0.transference.models import MartingaleTree, TreePara
from haarlab_1_0.transference.plank import (
    MOVE_CONST,
    MOVE_CONST_SINGLE,
    PlankFunctional,
    plank_alpha,
    plank_alpha_single,
)
from haarlab_1_0.transference.tree_io import tree_to_dict

logger = logging.getLogger(__name__)

MAIN_FACTOR = 72.0
PARA_FACTOR = 36.0


@dataclass(frozen=True)
class EstimateReport:
    lhs: float
    rhs: float
    margin: float
    gamma: float
    factor: float
    degenerate: bool = False
    first_step_margin: float = 0.0
    telescoping_margin: float = 0.0
    final_diff_margin: float = 0.0
    move_f: float = math.inf
    move_g: float = math.inf
    midpoint_error: float = 0.0
    product_error: float = 0.0

    @property
    def ok(self) -> bool:
        return self.margin >= -settings.MARGIN_TOL * max(1.0, abs(self.lhs))

    def to_dict(self) -> dict:
        out = asdict(self)
        for k, v in out.items():
            if isinstance(v, float) and not math.isfinite(v):
                out[k] = None
        out["ok"] = self.ok
        return out


def _tol(*values: float) -> float:
    return settings.MARGIN_TOL * max(1.0, *(abs(v) for v in values))


def _concavity_chain(mod: ModifiedTree, candidate: BellmanCandidate) -> float:
    """
    逐节点 theta 凹性 + 伸缩不等式，返回伸缩余量的最小值
    凹性失败算候选失败；伸缩失败（链条已过）是实现错误
    """
    tree = mod.tree
    n = tree.n
    leaf_B = candidate.values(tree.states(n))
    worst = math.inf
    for sign in (1, -1):
        points, thetas = mod.side(sign)
        B = [candidate.values(P) for P in points]
        for k in range(n):
            th = thetas[k + 1]
            mix = th[0::2] * B[k + 1][0::2] + th[1::2] * B[k + 1][1::2]
            gap = B[k] - mix
            j = int(np.argmin(gap))
            if gap[j] < -_tol(B[k][j], mix[j]):
                raise CandidateGainError(
                    f"candidate {candidate.name} is not theta-concave at {tree.node_key(k, j)}",
                    {"node": tree.node_key(k, j), "sign": sign, "gap": float(gap[j]),
                     "X": points[k][j].tolist(), "X1": points[k + 1][2 * j].tolist(),
                     "X2": points[k + 1][2 * j + 1].tolist()},
                )
        x = 1.0 + sign * mod.alpha
        tele = float(B[0][0] - np.mean(x * leaf_B))
        if tele < -_tol(B[0][0]):
            raise MarginViolation("telescoping inequality fails after a passing concavity chain", {"sign": sign, "margin": tele})
        worst = min(worst, tele)
    return worst


def _strict_margin(report: EstimateReport, tree: MartingaleTree, strict: bool) -> EstimateReport:
    if strict and not report.ok:
        raise MarginViolation(
            f"estimate margin {report.margin:.6g} < 0 (lhs {report.lhs:.6g}, rhs {report.rhs:.6g})",
            {"report": report.to_dict(), "tree": tree_to_dict(tree)},
        )
    return report


def main_estimate_check(
    tree: MartingaleTree,
    candidate: BellmanCandidate,
    plank: Optional[PlankFunctional] = None,
    strict: bool = True,
) -> EstimateReport:
    if candidate.para:
        raise InputError("main_estimate_check needs a non-para candidate")
    n = tree.n
    root = tree.root_point
    leaves = tree.leaves
    B0 = float(candidate.values(root)[0])
    mean_leaf_B = float(np.mean(candidate.values(leaves)))
    deficit = B0 - mean_leaf_B
    mean_df = float(np.mean(np.abs(tree.f_diffs())))
    mean_dg = float(np.mean(np.abs(tree.g_diffs())))
    lhs = mean_df * mean_dg
    rhs = MAIN_FACTOR / candidate.gamma * deficit

    if tree.is_degenerate():
        return _strict_margin(EstimateReport(lhs, rhs, rhs - lhs, candidate.gamma, MAIN_FACTOR, degenerate=True), tree, strict)

    plank = plank or plank_alpha(tree)
    mod = build_modified(tree, plank)
    Xp, Xm = mod.X_plus, mod.X_minus

    first = candidate.check_gain(Xp, Xm, where="first step")
    tele = _concavity_chain(mod, candidate)

    jf, jg = abs(Xp[IF] - root[IF]), abs(Xp[IG] - root[IG])
    final = deficit - 4.0 * candidate.gamma * jf * jg
    if final < -_tol(deficit):
        raise MarginViolation("final difference bound fails", {"deficit": deficit, "bound": deficit - final})
    move_f = jf / mean_df if mean_df > 0 else math.inf
    move_g = jg / mean_dg if mean_dg > 0 else math.inf
    for name, mv in (("f", move_f), ("g", move_g)):
        if mv < MOVE_CONST - 1e-12:
            raise MarginViolation(f"move contract for {name} fails: {mv:.6g} < 1/12", {"vector": name, "ratio": mv})

    report = EstimateReport(
        lhs=lhs,
        rhs=rhs,
        margin=rhs - lhs,
        gamma=candidate.gamma,
        factor=MAIN_FACTOR,
        first_step_margin=first,
        telescoping_margin=tele,
        final_diff_margin=final,
        move_f=move_f,
        move_g=move_g,
        midpoint_error=mod.midpoint_error,
        product_error=mod.product_error,
    )
    logger.debug("main estimate n=%d lhs=%.6g rhs=%.6g", n, lhs, rhs)
    return _strict_margin(report, tree, strict)


def para_estimate_check(
    tree: TreePara,
    candidate: BellmanCandidate,
    plank: Optional[PlankFunctional] = None,
    strict: bool = True,
) -> EstimateReport:
    if not isinstance(tree, TreePara):
        raise InputError("para_estimate_check needs a TreePara")
    if not candidate.para:
        raise InputError("para_estimate_check needs a para candidate")
    d0 = tree.d0
    if d0 < -settings.DOMAIN_TOL:
        raise DomainError(f"Carleson decrement d0 = {d0:.6g} < 0", {"d0": d0})
    d0 = max(d0, 0.0)

    root = tree.states(0)[0]
    B0 = float(candidate.values(root)[0])
    mean_leaf_B = float(np.mean(candidate.values(tree.states(tree.n))))
    deficit = B0 - mean_leaf_B
    mean_dg = float(np.mean(np.abs(tree.g_diffs())))
    lhs = d0 * abs(root[IF]) * mean_dg
    rhs = PARA_FACTOR / candidate.gamma * deficit

    if mean_dg == 0.0:
        return _strict_margin(EstimateReport(lhs, rhs, rhs - lhs, candidate.gamma, PARA_FACTOR, degenerate=True), tree, strict)

    plank = plank or plank_alpha_single(tree)
    mod = build_modified(tree, plank)
    Xp, Xm = mod.X_plus, mod.X_minus

    first = candidate.check_gain(Xp, Xm, M=np.array([root[6]]), where="first step")
    tele = _concavity_chain(mod, candidate)

    jg = abs(Xp[IG] - root[IG])
    final = deficit - 2.0 * candidate.gamma * d0 * abs(root[IF]) * jg
    if final < -_tol(deficit):
        raise MarginViolation("final difference bound fails", {"deficit": deficit, "bound": deficit - final})
    move_g = jg / mean_dg
    if move_g < MOVE_CONST_SINGLE - 1e-12:
        raise MarginViolation(f"move contract for g fails: {move_g:.6g} < 1/6", {"ratio": move_g})

    report = EstimateReport(
        lhs=lhs,
        rhs=rhs,
        margin=rhs - lhs,
        gamma=candidate.gamma,
        factor=PARA_FACTOR,
        first_step_margin=first,
        telescoping_margin=tele,
        final_diff_margin=final,
        move_f=plank.move_f,
        move_g=move_g,
        midpoint_error=mod.midpoint_error,
        product_error=mod.product_error,
    )
    return _strict_margin(report, tree, strict)


def quadratic_stronger_check(tree: MartingaleTree, candidate: BellmanCandidate, strict: bool = True) -> Tuple[float, float, float]:
    """
    二次候选的加强版：B(X0) - 2^{-n} sum B(X_I) >= 4 gamma (2^{-n} sum |f0 - f_I|^2)^{1/2} (2^{-n} sum |g0 - g_I|^2)^{1/2}
    返回 (亏量, 下界, 余量)
    """
    if candidate.kind != "quadratic":
        raise InputError(f"stronger check only applies to quadratic candidates, got {candidate.kind}")
    deficit = float(candidate.values(tree.root_point)[0] - np.mean(candidate.values(tree.leaves)))
    sf = math.sqrt(float(np.mean(tree.f_diffs() ** 2)))
    sg = math.sqrt(float(np.mean(tree.g_diffs() ** 2)))
    bound = 4.0 * candidate.gamma * sf * sg
    margin = deficit - bound
    if strict and margin < -_tol(deficit, bound):
        raise MarginViolation(
            f"stronger quadratic inequality fails: {deficit:.6g} < {bound:.6g}",
            {"deficit": deficit, "bound": bound, "tree": tree_to_dict(tree)},
        )
    return deficit, bound, margin
