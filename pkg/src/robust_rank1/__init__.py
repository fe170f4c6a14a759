"""Rank-one robust matrix approximation with exact oracles, heuristics and reductions."""

from .community import Community, community_score, extract_community
from .core import (
    BinaryFactors,
    RankOneFactors,
    SignFactors,
    frobenius_error_sq,
    l0_error,
    l1_error,
)
from .estimators import BinaryRankOneFactorization, L1RankOneApproximation
from .graphs import BipartiteGraph, Graph
from .heuristics import (
    SolverConfig,
    l1_coordinate_descent,
    l1_lra_rank1,
    l1_lra_sign,
    power_iteration_rank1,
    sign_round,
)
from .oracles import (
    bmf_rank1_exact,
    bmf_rank_r_exact,
    cut_norm_exact,
    inf1_norm_exact,
    l0_lra_rank1_exact,
    l1_lra_rank1_exact_sign,
    maxcut_exact,
)
from .reductions import (
    binarize_phi,
    cutnorm_doubling,
    diag_lift,
    hadamard,
    maxcut_gadget,
    verify_gadget_threshold,
)
from .validation import EnumerationCapError

__version__ = "0.1.0"

__all__ = [
    "BinaryFactors",
    "BinaryRankOneFactorization",
    "BipartiteGraph",
    "Community",
    "EnumerationCapError",
    "Graph",
    "L1RankOneApproximation",
    "RankOneFactors",
    "SignFactors",
    "SolverConfig",
    "binarize_phi",
    "bmf_rank1_exact",
    "bmf_rank_r_exact",
    "community_score",
    "cut_norm_exact",
    "cutnorm_doubling",
    "diag_lift",
    "extract_community",
    "frobenius_error_sq",
    "hadamard",
    "inf1_norm_exact",
    "l0_error",
    "l0_lra_rank1_exact",
    "l1_coordinate_descent",
    "l1_error",
    "l1_lra_rank1",
    "l1_lra_rank1_exact_sign",
    "l1_lra_sign",
    "maxcut_exact",
    "maxcut_gadget",
    "power_iteration_rank1",
    "sign_round",
    "verify_gadget_threshold",
]
