# -*- coding: utf-8 -*-
from haarlab_1_0.weights.weights import (
    A2Report,
    Weight,
    a2_norm,
    cascade_weight,
    gen_power_weight,
    gen_random_a2,
    read_weight_csv,
    weighted_norm,
)

__all__ = [
    "A2Report",
    "Weight",
    "a2_norm",
    "cascade_weight",
    "gen_power_weight",
    "gen_random_a2",
    "read_weight_csv",
    "weighted_norm",
]
