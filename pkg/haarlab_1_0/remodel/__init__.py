# -*- coding: utf-8 -*-
from haarlab_1_0.remodel.cubes import (
    CubeFunction,
    CubeGrid,
    CubeNode,
    CubeShiftSpec,
    apply_cube_shift,
    block_means,
    cube_a2,
    gen_cascade_weight_nd,
    gen_random_cube_shift,
    read_cube_csv,
    write_cube_csv,
)
from haarlab_1_0.remodel.remodel import (
    InflationReport,
    PhiDoc,
    RemodelMap,
    a2_inflation,
    average_defect,
    build_phi,
    dump_phi,
    inflation_bound,
    nesting_violations,
    phi_to_doc,
    remodel_shift,
    transfer_function,
    transfer_weight,
)

__all__ = [
    "CubeFunction",
    "CubeGrid",
    "CubeNode",
    "CubeShiftSpec",
    "apply_cube_shift",
    "block_means",
    "cube_a2",
    "gen_cascade_weight_nd",
    "gen_random_cube_shift",
    "read_cube_csv",
    "write_cube_csv",
    "InflationReport",
    "PhiDoc",
    "RemodelMap",
    "a2_inflation",
    "average_defect",
    "build_phi",
    "dump_phi",
    "inflation_bound",
    "nesting_violations",
    "phi_to_doc",
    "remodel_shift",
    "transfer_function",
    "transfer_weight",
]
