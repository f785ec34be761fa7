# -*- coding: utf-8 -*-
from haarlab_1_0.transference.estimates import (
    MAIN_FACTOR,
    PARA_FACTOR,
    EstimateReport,
    main_estimate_check,
    para_estimate_check,
    quadratic_stronger_check,
)
from haarlab_1_0.transference.models import MartingaleTree, TreePara
from haarlab_1_0.transference.modified import DomainReport, ModifiedTree, build_modified, verify_domains
from haarlab_1_0.transference.plank import PlankFunctional, balanced_vertex, plank_alpha, plank_alpha_single
from haarlab_1_0.transference.random_trees import random_tree, random_tree_para, tree_from_data, tree_para_from_symbol
from haarlab_1_0.transference.tree_io import TreeDoc, dump_tree, load_tree, tree_from_doc, tree_to_dict

__all__ = [
    "MAIN_FACTOR",
    "PARA_FACTOR",
    "EstimateReport",
    "main_estimate_check",
    "para_estimate_check",
    "quadratic_stronger_check",
    "MartingaleTree",
    "TreePara",
    "DomainReport",
    "ModifiedTree",
    "build_modified",
    "verify_domains",
    "PlankFunctional",
    "balanced_vertex",
    "plank_alpha",
    "plank_alpha_single",
    "random_tree",
    "random_tree_para",
    "tree_from_data",
    "tree_para_from_symbol",
    "TreeDoc",
    "dump_tree",
    "load_tree",
    "tree_from_doc",
    "tree_to_dict",
]
