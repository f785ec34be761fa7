# -*- coding: utf-8 -*-
from haarlab_1_0.core.dyadic import (
    ROOT,
    DyadicGrid,
    DyadicNode,
    HaarExpansion,
    HaarVector,
    StepFunction,
    average,
    children,
    haar_expand,
    haar_reconstruct,
    mart_diff,
    mart_diff_n,
    standard_haar,
)

__all__ = [
    "ROOT",
    "DyadicGrid",
    "DyadicNode",
    "HaarExpansion",
    "HaarVector",
    "StepFunction",
    "average",
    "children",
    "haar_expand",
    "haar_reconstruct",
    "mart_diff",
    "mart_diff_n",
    "standard_haar",
]
