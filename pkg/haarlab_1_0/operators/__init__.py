# -*- coding: utf-8 -*-
from haarlab_1_0.operators.base import HaarOperator, IdentityOperator, RootAverageOperator
from haarlab_1_0.operators.multipliers import MultiplierSpec, apply_multiplier
from haarlab_1_0.operators.paraproduct import ParaproductSpec, apply_paraproduct, bmo_norm, carleson_sums
from haarlab_1_0.operators.shifts import (
    ElementaryShiftSpec,
    HaarShiftSpec,
    apply_elementary_shift,
    apply_haar_shift,
    elementary_to_general,
    gen_random_elementary,
    gen_random_shift,
    slice_shift,
)

__all__ = [
    "HaarOperator",
    "IdentityOperator",
    "RootAverageOperator",
    "MultiplierSpec",
    "apply_multiplier",
    "ParaproductSpec",
    "apply_paraproduct",
    "bmo_norm",
    "carleson_sums",
    "ElementaryShiftSpec",
    "HaarShiftSpec",
    "apply_elementary_shift",
    "apply_haar_shift",
    "elementary_to_general",
    "gen_random_elementary",
    "gen_random_shift",
    "slice_shift",
]
