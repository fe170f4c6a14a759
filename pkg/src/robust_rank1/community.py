"""Dense bipartite community extraction through rank-one binary factorization.

A community ``S' x T'`` corresponds to the indicator factors ``u = 1_{S'}``,
``v = 1_{T'}``. The number of mismatches between the biadjacency matrix and
``u v^T`` is

    mismatches = |E| + |S'||T'| - 2 E(S', T')

(edges outside the rectangle plus non-edges inside it), and minimizing it is
exactly rank-one BMF.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .core import BinaryFactors, RankOneFactors, l0_error
from .graphs import BipartiteGraph
from .heuristics import (
    SolverConfig,
    bmf_alternating,
    power_iteration_rank1,
    threshold_init,
)
from .oracles import DEFAULT_CAP, bmf_rank1_exact
from .validation import check_binary_matrix

__all__ = [
    "biadjacency",
    "from_biadjacency",
    "indicator_factors",
    "CommunityScore",
    "community_score",
    "Community",
    "extract_community",
]


def biadjacency(G: BipartiteGraph) -> np.ndarray:
    M = np.zeros((G.left_size, G.right_size))
    for s, t in G.edges:
        M[s - 1, t - 1] = 1.0
    return M


def from_biadjacency(M) -> BipartiteGraph:
    M = check_binary_matrix(M)
    rows, cols = np.nonzero(M)
    return BipartiteGraph(M.shape[0], M.shape[1],
                          frozenset(zip((rows + 1).tolist(), (cols + 1).tolist())))


def indicator_factors(G: BipartiteGraph, left, right) -> BinaryFactors:
    u = np.zeros(G.left_size)
    v = np.zeros(G.right_size)
    for s in left:
        if not 1 <= s <= G.left_size:
            raise ValueError(f"left vertex {s} out of range")
        u[s - 1] = 1.0
    for t in right:
        if not 1 <= t <= G.right_size:
            raise ValueError(f"right vertex {t} out of range")
        v[t - 1] = 1.0
    return BinaryFactors(u, v)


class CommunityScore(NamedTuple):
    mismatches: int
    alternative_score: int


def community_score(G: BipartiteGraph, left, right) -> CommunityScore:
    """Mismatch count of the community ``left x right``.

    ``alternative_score`` is the alternative expression ``3 E(S',T') - |S'||T'| - |E|``,
    reported for comparison only; it is never optimized.
    """
    left, right = set(left), set(right)
    f = indicator_factors(G, left, right)
    inside = G.edges_between(left, right)
    mismatches = G.num_edges + len(left) * len(right) - 2 * inside
    assert mismatches == l0_error(biadjacency(G), f)
    return CommunityScore(mismatches, 3 * inside - len(left) * len(right) - G.num_edges)


class Community(NamedTuple):
    left: frozenset
    right: frozenset
    mismatches: int


def _support(x):
    return frozenset(int(i) + 1 for i in np.flatnonzero(x))


def extract_community(M, cfg: SolverConfig | None = None, mode: str = "exact",
                      cap=DEFAULT_CAP, n_jobs=None) -> Community:
    """Community (1-based vertex sets) minimizing the mismatch count.

    ``mode="exact"`` enumerates with :func:`bmf_rank1_exact`. ``"heuristic"``
    thresholds the power-iteration factors, runs :func:`bmf_alternating`,
    and keeps the best of ``cfg.restarts`` starts (extra starts are random
    binary vectors).
    """
    M = check_binary_matrix(M)
    cfg = cfg or SolverConfig()
    if mode == "exact":
        res = bmf_rank1_exact(M, cap, n_jobs=n_jobs)
        return Community(_support(res.u_star), _support(res.v_star), int(res.value))
    if mode != "heuristic":
        raise ValueError(f"unknown mode {mode!r}")
    m, n = M.shape
    starts = []
    if M.any():
        starts.append(threshold_init(power_iteration_rank1(M, cfg)))
    else:
        starts.append(BinaryFactors(np.zeros(m), np.zeros(n)))
    for r in range(1, cfg.restarts):
        rng = np.random.default_rng([cfg.rng_seed, r])
        starts.append(RankOneFactors(rng.integers(0, 2, m), rng.integers(0, 2, n)))
    best = None
    for start in starts:
        f, trace = bmf_alternating(M, start, cfg)
        key = (trace[-1], tuple(f.u), tuple(f.v))
        if best is None or key < best[0]:
            best = (key, f)
    (value, _, _), f = best
    return Community(_support(f.u), _support(f.v), int(value))
