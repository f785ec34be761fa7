# -*- coding: utf-8 -*-
"""
算子公共接口：所有 spec 都实现 matvec / rmatvec（叶值数组 -> 叶值数组）

rmatvec 是无权 L2([0,1)) 下的伴随；叶子等测度，所以就是欧氏转置。
specnorm 只依赖这两个方法。
"""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np

from haarlab_1_0.core.dyadic import DyadicGrid, StepFunction
from haarlab_1_0.errors import GridError


class HaarOperator(ABC):
    grid: DyadicGrid

    @abstractmethod
    def matvec(self, x: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def rmatvec(self, y: np.ndarray) -> np.ndarray: ...

    def _check(self, f: StepFunction) -> None:
        if f.grid != self.grid:
            raise GridError(
                f"grid mismatch: operator depth {self.grid.depth}, function depth {f.grid.depth}"
            )

    def apply(self, f: StepFunction) -> StepFunction:
        self._check(f)
        return StepFunction(self.grid, self.matvec(f.values))

    def adjoint_apply(self, g: StepFunction) -> StepFunction:
        self._check(g)
        return StepFunction(self.grid, self.rmatvec(g.values))


class IdentityOperator(HaarOperator):
    def __init__(self, grid: DyadicGrid):
        self.grid = grid

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return np.array(x, dtype=float)

    rmatvec = matvec


class RootAverageOperator(HaarOperator):
    """E_root f = <f>_{[0,1)} * 1"""

    def __init__(self, grid: DyadicGrid):
        self.grid = grid

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return np.full(self.grid.n_leaves, float(np.mean(x)))

    rmatvec = matvec
