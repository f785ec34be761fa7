# -*- coding: utf-8 -*-
from haarlab_1_0.bellman.candidates import (
    DOMAIN_GROWTH,
    BellmanCandidate,
    candidate_dp,
    candidate_para_quadratic,
    candidate_quadratic,
    parse_candidate,
    sample_gain_check,
)
from haarlab_1_0.bellman.domain import (
    STATE_FIELDS,
    BellmanPoint,
    BellmanPointPara,
    domain_margins,
    extremal_segment,
    in_domain,
    in_domain_batch,
    sample_domain_points,
    sample_valid_segments,
    segment_max_uv,
    segment_max_uv_batch,
)
from haarlab_1_0.bellman.dp import BellmanDP, DPConcavityReport, GridSpec, admissible_splits, dp_bellman, dp_concavity_check
from haarlab_1_0.bellman.quadform import QuadraticForm, marginal_xy, quadratic_gain_split

__all__ = [
    "DOMAIN_GROWTH",
    "STATE_FIELDS",
    "BellmanCandidate",
    "BellmanDP",
    "BellmanPoint",
    "BellmanPointPara",
    "DPConcavityReport",
    "GridSpec",
    "QuadraticForm",
    "admissible_splits",
    "candidate_dp",
    "candidate_para_quadratic",
    "candidate_quadratic",
    "domain_margins",
    "dp_bellman",
    "dp_concavity_check",
    "extremal_segment",
    "in_domain",
    "in_domain_batch",
    "marginal_xy",
    "parse_candidate",
    "quadratic_gain_split",
    "sample_domain_points",
    "sample_gain_check",
    "sample_valid_segments",
    "segment_max_uv",
    "segment_max_uv_batch",
]
