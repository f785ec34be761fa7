# -*- coding: utf-8 -*-
"""
扫描实验

- multiplier_bilinear_check：sum_I |Δ_I f-跳||Δ_I g-跳| |I|  vs  [w] ||f||_{L2(w)} ||g||_{L2(w^{-1})}
- paraproduct_bilinear_check：sum_I |<f>_I| ||Δ_I phi||_2 |g-跳| |I|^{1/2}  vs  [w] ||phi||_BMO ||f|| ||g||
- complexity_scan：随机紧归一化 Haar shift，记录加权范数，fitted_C = max norm / (n [w])
- witt_scan：幂权族上乘子双线性比值的 log-log 斜率

并行：ThreadPoolExecutor.map，结果按任务顺序归并（行序确定）。
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from haarlab_1_0.config import settings
from haarlab_1_0.core.dyadic import DyadicGrid, StepFunction, check_same_grid, level_averages
from haarlab_1_0.core.io_csv import rows_to_csv
from haarlab_1_0.errors import InputError
from haarlab_1_0.operators.paraproduct import bmo_norm, half_jumps
from haarlab_1_0.operators.shifts import gen_random_shift
from haarlab_1_0.specnorm.norms import NormEstimate, operator_norm_weighted
from haarlab_1_0.weights.weights import Weight, a2_norm, gen_power_weight, weighted_norm

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

SCAN_HEADER = ("n", "a2", "trial", "norm", "residual", "method")


def ordered_map(fn: Callable[[T], R], items: Sequence[T], threads: Optional[int] = None) -> List[R]:
    """线程池 map，输出顺序 = 输入顺序"""
    workers = max(1, int(threads or settings.HAARLAB_THREADS))
    if workers == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))


def _jumps(values: np.ndarray, depth: int) -> List[np.ndarray]:
    """<.>_{I1} - <.>_{I2}，按层"""
    out = []
    for lv in range(depth):
        kids = level_averages(values, lv + 1).reshape(-1, 2)
        out.append(kids[:, 0] - kids[:, 1])
    return out


# =========================================================
# 双线性检查
# =========================================================
def multiplier_bilinear_check(w: Weight, f: StepFunction, g: StepFunction) -> Tuple[float, float]:
    grid = check_same_grid(f, g, w.w)
    jf = _jumps(f.values, grid.depth)
    jg = _jumps(g.values, grid.depth)
    lhs = float(sum(np.sum(np.abs(a) * np.abs(b)) * 2.0 ** (-lv) for lv, (a, b) in enumerate(zip(jf, jg))))
    rhs = a2_norm(w).a2_norm * weighted_norm(f, w) * weighted_norm(g, w.reciprocal())
    return lhs, rhs


def paraproduct_bilinear_check(
    w: Weight, phi: StepFunction, f: StepFunction, g: StepFunction
) -> Tuple[float, float]:
    grid = check_same_grid(phi, f, g, w.w)
    bmo = bmo_norm(phi)
    if bmo <= 0.0:
        raise InputError("paraproduct check needs a symbol with nonzero BMO norm")
    deltas = half_jumps(phi.values, grid.depth)
    jg = _jumps(g.values, grid.depth)
    lhs = 0.0
    for lv in range(grid.depth):
        size = 2.0 ** (-lv)
        fav = level_averages(f.values, lv)
        # ||Δ_I phi||_2 = |delta_I| |I|^{1/2}
        lhs += float(np.sum(np.abs(fav) * np.abs(deltas[lv]) * np.sqrt(size) * np.abs(jg[lv]))) * np.sqrt(size)
    rhs = a2_norm(w).a2_norm * bmo * weighted_norm(f, w) * weighted_norm(g, w.reciprocal())
    return lhs, rhs


# =========================================================
# ScanReport
# =========================================================
@dataclass(frozen=True)
class ScanRow:
    n: int
    a2: float
    trial: int
    norm: float
    residual: float
    method: str
    converged: bool = True

    def csv_row(self) -> Tuple[object, ...]:
        return (self.n, float(self.a2), self.trial, float(self.norm), float(self.residual), self.method)


@dataclass(frozen=True)
class ScanReport:
    rows: Tuple[ScanRow, ...]
    fitted_slope: Optional[float]
    fitted_C: float
    slopes_by_n: Dict[int, Optional[float]] = field(default_factory=dict)
    seeds: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.rows:
            raise InputError("scan report needs at least one row")

    @property
    def all_converged(self) -> bool:
        return all(r.converged for r in self.rows)

    def to_csv(self) -> str:
        return rows_to_csv(SCAN_HEADER, (r.csv_row() for r in self.rows))

    def summary(self) -> dict:
        return {
            "rows": len(self.rows),
            "fitted_slope": self.fitted_slope,
            "fitted_C": self.fitted_C,
            "slopes_by_n": {str(k): v for k, v in self.slopes_by_n.items()},
            "ratio_by_n": {str(k): v for k, v in self.ratio_by_n().items()},
            "all_converged": self.all_converged,
            "seeds": self.seeds,
        }

    def ratio_by_n(self) -> Dict[int, float]:
        """每个 n 上 max norm / (n [w])"""
        out: Dict[int, float] = {}
        for r in self.rows:
            out[r.n] = max(out.get(r.n, 0.0), r.norm / (r.n * r.a2))
        return out


def loglog_slope(xs: Iterable[float], ys: Iterable[float]) -> Optional[float]:
    x = np.log(np.asarray(list(xs), dtype=float))
    y = np.log(np.asarray(list(ys), dtype=float))
    keep = np.isfinite(x) & np.isfinite(y)
    x, y = x[keep], y[keep]
    if x.size < 2 or np.ptp(x) < 1e-12:
        return None
    return float(np.polyfit(x, y, 1)[0])


def complexity_scan(
    grid: DyadicGrid,
    complexities: Sequence[int],
    weights: Sequence[Weight],
    trials: int,
    seed: int,
    tol: Optional[float] = None,
    method: str = "auto",
    threads: Optional[int] = None,
) -> ScanReport:
    if not complexities or not weights:
        raise InputError("complexities and weights must be nonempty")
    if trials < 1:
        raise InputError(f"trials must be >= 1, got {trials}")
    for n in complexities:
        if not 1 <= n <= grid.depth:
            raise InputError(f"complexity {n} not in [1, {grid.depth}]")

    a2s = [a2_norm(w).a2_norm for w in weights]
    tasks = [
        (i_n, n, i_w, t)
        for i_n, n in enumerate(complexities)
        for i_w in range(len(weights))
        for t in range(trials)
    ]

    def run(task: Tuple[int, int, int, int]) -> ScanRow:
        i_n, n, i_w, t = task
        spec = gen_random_shift(grid, n, seed=[seed, n, i_w, t], tight=True)
        est: NormEstimate = operator_norm_weighted(spec, weights[i_w], tol=tol, method=method, seed=[seed, n, i_w, t, 1])
        logger.debug("scan n=%d a2=%.4g trial=%d norm=%.6g", n, a2s[i_w], t, est.value)
        return ScanRow(n, a2s[i_w], t, est.value, est.residual, est.method, est.converged)

    rows = tuple(ordered_map(run, tasks, threads))

    fitted_C = max(r.norm / (r.n * r.a2) for r in rows)
    slopes: Dict[int, Optional[float]] = {}
    for n in complexities:
        best: Dict[float, float] = {}
        for r in rows:
            if r.n == n:
                best[r.a2] = max(best.get(r.a2, 0.0), r.norm)
        slopes[n] = loglog_slope(best.keys(), best.values())
    finite = [s for s in slopes.values() if s is not None]
    logger.info("complexity scan: %d rows, fitted_C=%.6g", len(rows), fitted_C)
    return ScanReport(
        rows=rows,
        fitted_slope=max(finite) if finite else None,
        fitted_C=fitted_C,
        slopes_by_n=slopes,
        seeds={"seed": seed, "task_seed": "[seed, n, weight_index, trial]"},
    )


# =========================================================
# 幂权族上的乘子双线性扫描
# =========================================================
@dataclass(frozen=True)
class WittRow:
    alpha: float
    a2: float
    trial: int
    ratio: float


@dataclass(frozen=True)
class WittScanReport:
    rows: Tuple[WittRow, ...]
    fitted_slope: Optional[float]
    fitted_C: float

    def to_csv(self) -> str:
        return rows_to_csv(
            ("alpha", "a2", "trial", "ratio"),
            ((float(r.alpha), float(r.a2), r.trial, float(r.ratio)) for r in self.rows),
        )

    def summary(self) -> dict:
        return {"rows": len(self.rows), "fitted_slope": self.fitted_slope, "fitted_C": self.fitted_C}

    def max_ratio_by_alpha(self) -> Dict[float, Tuple[float, float]]:
        out: Dict[float, Tuple[float, float]] = {}
        for r in self.rows:
            cur = out.get(r.alpha)
            if cur is None or r.ratio > cur[1]:
                out[r.alpha] = (r.a2, r.ratio)
        return out


def witt_scan(
    grid: DyadicGrid,
    alphas: Sequence[float],
    trials: int,
    seed: int,
    threads: Optional[int] = None,
) -> WittScanReport:
    """
    ratio = lhs / (||f||_{L2(w)} ||g||_{L2(w^{-1})})，lhs 为乘子双线性和
    同一 trial 在不同 alpha 上复用同一对 (f, g)，斜率只反映权的变化
    fitted_C = max ratio / [w]
    """
    if not alphas or trials < 1:
        raise InputError("alphas must be nonempty and trials >= 1")
    weights = [gen_power_weight(grid, a) for a in alphas]
    a2s = [a2_norm(w).a2_norm for w in weights]

    def run(task: Tuple[int, int]) -> WittRow:
        i_a, t = task
        rng = np.random.default_rng([seed, t])
        f = StepFunction(grid, rng.standard_normal(grid.n_leaves))
        g = StepFunction(grid, rng.standard_normal(grid.n_leaves))
        w = weights[i_a]
        lhs, rhs = multiplier_bilinear_check(w, f, g)
        return WittRow(float(alphas[i_a]), a2s[i_a], t, lhs * a2s[i_a] / rhs)

    tasks = [(i, t) for i in range(len(alphas)) for t in range(trials)]
    rows = tuple(ordered_map(run, tasks, threads))
    report = WittScanReport(rows, None, max(r.ratio / r.a2 for r in rows))
    best = report.max_ratio_by_alpha()
    slope = loglog_slope([v[0] for v in best.values()], [v[1] for v in best.values()])
    return WittScanReport(rows, slope, report.fitted_C)

