"""Small reference matrices used by the demos and the test-suite."""

import numpy as np

from .core import RankOneFactors

#: A single community: the first three rows are fully linked to the first four columns.
COMMUNITY = np.array([
    [1, 1, 1, 1, 0],
    [1, 1, 1, 1, 0],
    [1, 1, 1, 1, 0],
    [0, 0, 0, 0, 0],
], dtype=np.float64)

#: ``COMMUNITY`` with three extra edges.
COMMUNITY_PERTURBED = np.array([
    [1, 1, 1, 1, 0],
    [1, 1, 1, 1, 1],
    [1, 1, 1, 1, 0],
    [1, 0, 0, 0, 1],
], dtype=np.float64)

#: Best Frobenius rank-one fit of ``COMMUNITY_PERTURBED``, two decimals.
COMMUNITY_PERTURBED_L2 = np.array([
    [1.03, 0.92, 0.92, 0.92, 0.44],
    [1.15, 1.02, 1.02, 1.02, 0.50],
    [1.03, 0.92, 0.92, 0.92, 0.44],
    [0.40, 0.36, 0.36, 0.36, 0.17],
])

COMMUNITY_U = np.array([1, 1, 1, 0], dtype=np.float64)
COMMUNITY_V = np.array([1, 1, 1, 1, 0], dtype=np.float64)

#: Sign matrix with a non-sign local minimum of rank-one l1 approximation.
TRAP = np.array([
    [1, 1, 1, 1, 1, 1],
    [1, 1, 1, 1, 1, 1],
    [1, -1, -1, -1, 1, 1],
    [-1, 1, -1, -1, 1, 1],
    [-1, -1, 1, -1, 1, 1],
    [-1, -1, -1, 1, 1, 1],
], dtype=np.float64)

TRAP_OPTIMUM = RankOneFactors([1, 1, -1, -1, -1, -1], [1, 1, 1, 1, -1, -1])
TRAP_OPTIMAL_L1 = 16
TRAP_LOCAL_X = np.sqrt(2) / 2


def trap_stationary(x: float = TRAP_LOCAL_X) -> RankOneFactors:
    """Stationary pair ``u = (1, 1, x, x, x, x)``, ``v = (1, 1, 1, 1, 1/x, 1/x)``, 0.5 < x < 1."""
    return RankOneFactors([1, 1, x, x, x, x], [1, 1, 1, 1, 1 / x, 1 / x])
