"""Exhaustive exact solvers for small instances.

Every oracle enumerates one factor (the shorter side of the matrix) and fills
in the other factor in closed form, so the cost is ``2^min(m, n)`` candidate
evaluations. Candidates are encoded as integers whose bits, most significant
first, give the components; increasing code order is lexicographic order with
``-1 < +1`` (or ``0 < 1``). Within the enumerated factor the returned
certificate is the lexicographically smallest optimizer.

The candidate space is split into contiguous code ranges that may be scored
by several workers. Each range reports its best (score, code) pair and the
merge keeps the best score with the smallest code, so results do not depend
on ``chunk`` or ``n_jobs``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from .core import RankOneFactors, l0_error, l1_error
from .graphs import Graph
from .validation import (
    EnumerationCapError,
    check_binary_matrix,
    check_matrix,
    check_sign_matrix,
)

__all__ = [
    "DEFAULT_CAP",
    "OracleResult",
    "inf1_norm_exact",
    "cut_norm_exact",
    "bmf_rank1_exact",
    "l0_lra_rank1_exact",
    "l1_lra_rank1_exact_sign",
    "maxcut_exact",
    "bmf_rank_r_exact",
]

DEFAULT_CAP = 25
MAXCUT_CAP = 24
RANK_R_CAP = 20
_DEFAULT_CHUNK = 1 << 14
_CHUNK_BUDGET = 1 << 22  # floats materialized per chunk in the wide oracles


@dataclass(frozen=True, eq=False)
class OracleResult:
    """Optimal value with a certificate pair and the number of candidates scored."""

    value: float
    u_star: np.ndarray
    v_star: np.ndarray
    enumerated: int

    @property
    def factors(self) -> RankOneFactors:
        return RankOneFactors(self.u_star, self.v_star)


def _bits(start, stop, width):
    codes = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
    return ((codes[:, None] >> shifts) & 1).astype(np.float64)


def _signs(start, stop, width):
    return 2.0 * _bits(start, stop, width) - 1.0


def _best_code(score, decode, width, n_codes, *, maximize, chunk, n_jobs):
    """Return ``(best_score, best_code)`` over codes ``0..n_codes-1``."""
    chunk = max(1, int(chunk))
    ranges = [(s, min(s + chunk, n_codes)) for s in range(0, n_codes, chunk)]

    def work(start, stop):
        s = score(decode(start, stop, width))
        k = int(np.argmax(s) if maximize else np.argmin(s))
        return s[k], start + k

    if n_jobs in (None, 1) or len(ranges) == 1:
        parts = [work(*r) for r in ranges]
    else:
        parts = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(work)(*r) for r in ranges)
    sign = -1.0 if maximize else 1.0
    return min(parts, key=lambda t: (sign * t[0], t[1]))


def _oriented(M, cap, what):
    """Transpose so the enumerated side is the shorter one."""
    transposed = M.shape[1] < M.shape[0]
    B = M.T if transposed else M
    if B.shape[0] > cap:
        raise EnumerationCapError(
            f"{what}: shorter dimension {B.shape[0]} exceeds enumeration cap {cap}; "
            "use the heuristic solvers for instances of this size")
    return B, transposed


def _finish(objective, u, v, transposed, enumerated):
    """Swap certificates back and evaluate ``objective(u, v)`` in the input orientation."""
    if transposed:
        u, v = v, u
    return OracleResult(objective(u, v), u, v, enumerated)


def inf1_norm_exact(A, cap=DEFAULT_CAP, *, chunk=_DEFAULT_CHUNK, n_jobs=None) -> OracleResult:
    """Maximum of ``u^T A v`` over sign vectors ``u``, ``v``.

    Only half of the sign vectors are scored (first component fixed to -1);
    the best ``v`` for a given ``u`` is ``sign(A^T u)`` with ``sign(0) = +1``.
    """
    A = check_matrix(A)
    B, transposed = _oriented(A, cap, "inf1_norm_exact")
    m = B.shape[0]
    n_codes = 1 << (m - 1)
    _, code = _best_code(lambda X: np.abs(X @ B).sum(axis=1), _signs, m, n_codes,
                         maximize=True, chunk=chunk, n_jobs=n_jobs)
    u = _signs(code, code + 1, m)[0]
    v = np.where(u @ B >= 0, 1.0, -1.0)
    return _finish(lambda x, y: float(x @ A @ y), u, v, transposed, n_codes)


def cut_norm_exact(A, cap=DEFAULT_CAP, *, chunk=_DEFAULT_CHUNK, n_jobs=None) -> OracleResult:
    """Maximum of ``|u^T A v|`` over binary vectors ``u``, ``v``."""
    A = check_matrix(A)
    B, transposed = _oriented(A, cap, "cut_norm_exact")
    m = B.shape[0]
    n_codes = 1 << m

    def score(X):
        G = X @ B
        return np.maximum(np.maximum(G, 0).sum(axis=1), np.maximum(-G, 0).sum(axis=1))

    _, code = _best_code(score, _bits, m, n_codes, maximize=True, chunk=chunk,
                         n_jobs=n_jobs)
    u = _bits(code, code + 1, m)[0]
    g = u @ B
    if np.maximum(g, 0).sum() >= np.maximum(-g, 0).sum():
        v = (g > 0).astype(np.float64)
    else:
        v = (g < 0).astype(np.float64)
    return _finish(lambda x, y: float(abs(x @ A @ y)), u, v, transposed, n_codes)


def bmf_rank1_exact(M, cap=DEFAULT_CAP, *, chunk=_DEFAULT_CHUNK, n_jobs=None) -> OracleResult:
    """Minimum mismatch count ``||M - u v^T||_0`` over binary ``u``, ``v``.

    For fixed ``u`` each column is decided independently: ``v_j = 1`` iff that
    strictly lowers the column's mismatches (ties keep ``v_j = 0``).
    """
    M = check_binary_matrix(M)
    B, transposed = _oriented(M, cap, "bmf_rank1_exact")
    m = B.shape[0]
    n_codes = 1 << m
    base = B.sum()

    # mismatches(v_j=1) - mismatches(v_j=0) = |u| - 2 (u^T M)_j
    def score(X):
        gain = X.sum(axis=1, keepdims=True) - 2.0 * (X @ B)
        return base + np.minimum(gain, 0).sum(axis=1)

    _, code = _best_code(score, _bits, m, n_codes, maximize=False, chunk=chunk,
                         n_jobs=n_jobs)
    u = _bits(code, code + 1, m)[0]
    v = ((u.sum() - 2.0 * (u @ B)) < 0).astype(np.float64)
    return _finish(lambda x, y: l0_error(M, RankOneFactors(x, y)), u, v, transposed, n_codes)


def l0_lra_rank1_exact(M, cap=DEFAULT_CAP, *, chunk=_DEFAULT_CHUNK, n_jobs=None) -> OracleResult:
    """Rank-one l0 approximation of a binary matrix.

    Replacing every nonzero factor component by 1 never increases the
    mismatch count against a binary matrix, so the binary optimum from
    :func:`bmf_rank1_exact` is also optimal over real factors.
    """
    return bmf_rank1_exact(M, cap, chunk=chunk, n_jobs=n_jobs)


def l1_lra_rank1_exact_sign(A, cap=DEFAULT_CAP, *, chunk=None, n_jobs=None) -> OracleResult:
    """Rank-one l1 approximation of a {-1,+1} matrix.

    Sign factors are optimal among all real factors for sign input, so only
    sign ``x`` are enumerated (first component fixed to -1). For each column
    the residuals of ``y_j = +1`` and ``y_j = -1`` are summed directly and the
    smaller one kept, ties going to ``+1``.
    """
    A = check_sign_matrix(A)
    B, transposed = _oriented(A, cap, "l1_lra_rank1_exact_sign")
    m, n = B.shape
    n_codes = 1 << (m - 1)
    if chunk is None:
        chunk = max(1, _CHUNK_BUDGET // (m * n))

    def residuals(X):
        plus = np.abs(B[None, :, :] - X[:, :, None]).sum(axis=1)
        minus = np.abs(B[None, :, :] + X[:, :, None]).sum(axis=1)
        return plus, minus

    def score(X):
        plus, minus = residuals(X)
        return np.minimum(plus, minus).sum(axis=1)

    _, code = _best_code(score, _signs, m, n_codes, maximize=False, chunk=chunk,
                         n_jobs=n_jobs)
    x = _signs(code, code + 1, m)[0]
    plus, minus = residuals(x[None, :])
    y = np.where(plus[0] <= minus[0], 1.0, -1.0)
    return _finish(lambda a, b: l1_error(A, RankOneFactors(a, b)), x, y, transposed, n_codes)


def maxcut_exact(G: Graph, cap=MAXCUT_CAP, *, chunk=_DEFAULT_CHUNK, n_jobs=None):
    """Maximum cut of ``G`` as ``(cut_size, side)`` with ``side`` a 0/1 array.

    Vertex 1 is pinned to side 0, which picks the lexicographically smaller
    of each complementary pair.
    """
    nv = G.num_vertices
    if nv > cap:
        raise EnumerationCapError(
            f"maxcut_exact: {nv} vertices exceeds enumeration cap {cap}")
    I = np.array([i - 1 for i, _ in G.edges], dtype=np.int64)
    J = np.array([j - 1 for _, j in G.edges], dtype=np.int64)

    def score(X):
        return (X[:, I] != X[:, J]).sum(axis=1)

    best, code = _best_code(score, _bits, nv, 1 << (nv - 1), maximize=True,
                            chunk=chunk, n_jobs=n_jobs)
    side = _bits(code, code + 1, nv)[0].astype(np.int64)
    return int(best), side


def bmf_rank_r_exact(M, r: int, cap=RANK_R_CAP, *, chunk=None, n_jobs=None):
    """Rank-``r`` binary factorization by enumerating the shorter factor.

    Returns ``(value, U, V)`` minimizing the number of entries where ``M``
    differs from the integer product ``U V`` (entries of ``U V`` may exceed 1
    and then always count as mismatches). Each column of ``V`` is the
    lexicographically smallest best response to the enumerated ``U``.
    """
    M = check_binary_matrix(M)
    if r < 1:
        raise ValueError("rank must be positive")
    transposed = M.shape[1] < M.shape[0]
    B = M.T if transposed else M
    m, n = B.shape
    if m * r > cap:
        raise EnumerationCapError(
            f"bmf_rank_r_exact: {m}x{r} enumerated factor exceeds cap of {cap} bits")
    options = _bits(0, 1 << r, r).T  # r x 2^r, column o is option o
    if chunk is None:
        chunk = max(1, _CHUNK_BUDGET // (m * n * options.shape[1]))

    def decode(start, stop, width):
        return _bits(start, stop, width).reshape(-1, m, r)

    def column_costs(Us):
        P = Us @ options  # (c, m, 2^r)
        return (P[:, :, :, None] != B[None, :, None, :]).sum(axis=1)  # (c, 2^r, n)

    def score(Us):
        return column_costs(Us).min(axis=1).sum(axis=1)

    value, code = _best_code(score, decode, m * r, 1 << (m * r), maximize=False,
                             chunk=chunk, n_jobs=n_jobs)
    U = decode(code, code + 1, m * r)[0]
    V = options[:, column_costs(U[None])[0].argmin(axis=0)]
    if transposed:
        U, V = V.T, U.T
    return int(value), U, V
