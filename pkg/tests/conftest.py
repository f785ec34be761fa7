# -*- coding: utf-8 -*-
from __future__ import annotations

import numpy as np
import pytest

from haarlab_1_0.core.dyadic import DyadicGrid, StepFunction


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def grid4() -> DyadicGrid:
    return DyadicGrid(4)


@pytest.fixture
def grid6() -> DyadicGrid:
    return DyadicGrid(6)


@pytest.fixture
def random_step(rng):
    """random_step(grid) -> 随机 StepFunction"""

    def make(grid: DyadicGrid) -> StepFunction:
        return StepFunction(grid, rng.standard_normal(grid.n_leaves))

    return make
