# -*- coding: utf-8 -*-
from haarlab_1_0.specnorm.norms import NormEstimate, operator_norm_weighted
from haarlab_1_0.specnorm.scans import (
    ScanReport,
    WittScanReport,
    complexity_scan,
    multiplier_bilinear_check,
    paraproduct_bilinear_check,
    witt_scan,
)

__all__ = [
    "NormEstimate",
    "operator_norm_weighted",
    "ScanReport",
    "WittScanReport",
    "complexity_scan",
    "multiplier_bilinear_check",
    "paraproduct_bilinear_check",
    "witt_scan",
]
