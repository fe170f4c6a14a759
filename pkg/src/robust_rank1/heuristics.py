"""Iterative rank-one solvers and sign rounding for l1 approximation.

* :func:`power_iteration_rank1` gives the best Frobenius rank-one fit, used
  as a starting point.
* :func:`l1_coordinate_descent` minimizes ``||M - u v^T||_1`` by cyclic
  exact coordinate updates (each one a weighted median).
* :func:`bmf_alternating` alternates column- and row-optimal binary updates.
* :func:`level_decompose`, :func:`move1`, :func:`move2` and
  :func:`sign_round` turn a real rank-one solution of a {-1,+1} matrix into a
  sign solution whose l1 error is not larger.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from joblib import Parallel, delayed

from .core import BinaryFactors, RankOneFactors, SignFactors, l0_error, l1_error
from .validation import check_binary_matrix, check_matrix, check_sign_matrix

__all__ = [
    "SolverConfig",
    "ZeroMatrixWarning",
    "power_iteration_rank1",
    "weighted_median",
    "l1_coordinate_descent",
    "CDResult",
    "l1_lra_rank1",
    "l1_lra_sign",
    "bmf_alternating",
    "threshold_init",
    "LevelDecomposition",
    "MoveDeltas",
    "level_decompose",
    "move1",
    "move2",
    "sign_round",
    "sign_round_path",
    "RoundingStep",
    "inf1_local_search",
    "inf1_lower_bound",
    "cut_norm_lower_bound",
]

logger = logging.getLogger(__name__)

LEVEL_TOL = 1e-9


class ZeroMatrixWarning(UserWarning):
    """The input matrix is identically zero; zero factors were returned."""


@dataclass(frozen=True)
class SolverConfig:
    max_sweeps: int = 500
    objective_tolerance: float = 1e-10
    restarts: int = 1
    rng_seed: int = 0
    init_mode: str = "svd"

    def __post_init__(self):
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.objective_tolerance < 0:
            raise ValueError("objective_tolerance must be nonnegative")
        if self.init_mode not in ("svd", "random", "given"):
            raise ValueError(f"unknown init_mode {self.init_mode!r}")


def power_iteration_rank1(M, cfg: SolverConfig | None = None) -> RankOneFactors:
    """Dominant singular pair of ``M`` as balanced factors ``sqrt(s) u1``, ``sqrt(s) v1``.

    Starts from the all-ones right vector and stops once the unit right
    vector moves by less than 1e-12 in norm, or after ``cfg.max_sweeps``
    iterations. Signs are fixed so that ``sum(u) >= 0``.
    """
    cfg = cfg or SolverConfig()
    M = check_matrix(M)
    m, n = M.shape
    if not M.any():
        warnings.warn("zero matrix: returning zero factors", ZeroMatrixWarning, stacklevel=2)
        return RankOneFactors(np.zeros(m), np.zeros(n))
    rng = np.random.default_rng(cfg.rng_seed)
    v = np.ones(n) / np.sqrt(n)
    sigma = 0.0
    u = np.zeros(m)
    for _ in range(cfg.max_sweeps):
        x = M @ v
        nx = np.linalg.norm(x)
        if nx == 0:
            # start vector orthogonal to the row space
            v = rng.standard_normal(n)
            v /= np.linalg.norm(v)
            continue
        u = x / nx
        y = M.T @ u
        sigma = np.linalg.norm(y)
        v_new = y / sigma
        step = np.linalg.norm(v_new - v)
        v = v_new
        if step <= 1e-12:
            break
    if u.sum() < 0:
        u, v = -u, -v
    root = np.sqrt(sigma)
    return RankOneFactors(root * u, root * v)


def weighted_median(values, weights) -> float:
    """Minimizer of ``sum_j w_j |t - values_j|``.

    When the minimizers form an interval, its lower endpoint is returned.
    """
    values = np.asarray(values, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    cum = np.cumsum(weights[order])
    k = int(np.searchsorted(cum, 0.5 * cum[-1], side="left"))
    return float(values[order][min(k, values.size - 1)])


def _rowwise_weighted_median(M, v):
    """``t_i = argmin_t sum_j |M_ij - t v_j|`` for every row, zero ``v_j`` ignored."""
    keep = v != 0
    with np.errstate(over="ignore"):
        R = M[:, keep] / v[keep]
    # ratios that overflow come from |v_j| below 1e-308; their terms are negligible
    finite = np.isfinite(R)
    W = np.where(finite, np.abs(v[keep]), 0.0)
    R = np.where(finite, R, 0.0)
    order = np.argsort(R, axis=1, kind="stable")
    Rs = np.take_along_axis(R, order, axis=1)
    cum = np.cumsum(np.take_along_axis(W, order, axis=1), axis=1)
    k = (cum < 0.5 * W.sum(axis=1, keepdims=True)).sum(axis=1)
    k = np.minimum(k, Rs.shape[1] - 1)
    return Rs[np.arange(M.shape[0]), k]


def _random_factors(M, rng):
    m, n = M.shape
    row = np.linalg.norm(M, axis=1)
    col = np.linalg.norm(M, axis=0)
    row[row == 0] = 1.0
    col[col == 0] = 1.0
    u = rng.choice([-1.0, 1.0], size=m) * row / np.sqrt(n)
    v = rng.choice([-1.0, 1.0], size=n) * col / np.sqrt(m)
    return u, v


class CDResult(NamedTuple):
    factors: RankOneFactors
    trace: list
    reseeds: int


def l1_coordinate_descent(M, init: RankOneFactors, cfg: SolverConfig | None = None) -> CDResult:
    """Cyclic coordinate descent on ``||M - u v^T||_1``.

    One sweep updates every ``u_i`` to the weighted median of
    ``{M_ij / v_j : v_j != 0}`` with weights ``|v_j|``, then every ``v_j``
    symmetrically. Entries of ``u`` do not interact given ``v``, so each half
    sweep is computed in one vectorized pass. ``trace`` holds the objective
    before the first sweep and after each sweep; iteration stops when a sweep
    improves it by less than ``cfg.objective_tolerance``.

    If a factor collapses to zero it is re-drawn at random and counted in
    ``reseeds``; the trace is only monotone between such events.
    """
    cfg = cfg or SolverConfig()
    M = check_matrix(M)
    if M.shape != init.shape:
        raise ValueError("init factors do not match the matrix shape")
    u, v = init.u.copy(), init.v.copy()
    if not (u.any() and v.any()):
        raise ValueError("init must have a nonzero component in each factor")
    rng = np.random.default_rng(cfg.rng_seed)
    reseeds = 0
    trace = [l1_error(M, RankOneFactors(u, v))]
    for _ in range(cfg.max_sweeps):
        if not v.any():
            _, v = _random_factors(M, rng)
            reseeds += 1
            logger.info("coordinate descent: v collapsed to zero, re-seeded")
        u = _rowwise_weighted_median(M, v)
        if not u.any():
            u, _ = _random_factors(M, rng)
            reseeds += 1
            logger.info("coordinate descent: u collapsed to zero, re-seeded")
        v = _rowwise_weighted_median(M.T, u)
        trace.append(l1_error(M, RankOneFactors(u, v)))
        if trace[-2] - trace[-1] < cfg.objective_tolerance:
            break
    return CDResult(RankOneFactors(u, v), trace, reseeds)


def _restart_inits(M, cfg, init):
    for r in range(cfg.restarts):
        if r == 0 and cfg.init_mode == "given":
            if init is None:
                raise ValueError("init_mode='given' requires init factors")
            yield init
        elif r == 0 and cfg.init_mode == "svd" and M.any():
            f = power_iteration_rank1(M, cfg)
            if f.u.any() and f.v.any():
                yield f
                continue
            yield RankOneFactors(*_random_factors(M, np.random.default_rng([cfg.rng_seed, r])))
        else:
            yield RankOneFactors(*_random_factors(M, np.random.default_rng([cfg.rng_seed, r])))


def _lex_key(objective, f):
    return (objective, tuple(f.u), tuple(f.v))


def _run_restarts(fn, M, cfg, init, n_jobs):
    inits = list(_restart_inits(M, cfg, init))
    if n_jobs in (None, 1) or len(inits) == 1:
        return [fn(f) for f in inits]
    return Parallel(n_jobs=n_jobs, prefer="threads")(delayed(fn)(f) for f in inits)


def l1_lra_rank1(M, cfg: SolverConfig | None = None, init: RankOneFactors | None = None,
                 n_jobs=None) -> CDResult:
    """Best coordinate-descent result over ``cfg.restarts`` starts.

    The first start follows ``cfg.init_mode``; the remaining ones are random
    sign patterns scaled by row and column norms. Ties are broken by the
    factors in lexicographic order, so the answer does not depend on
    ``n_jobs``.
    """
    cfg = cfg or SolverConfig()
    M = check_matrix(M)
    runs = _run_restarts(lambda f: l1_coordinate_descent(M, f, cfg), M, cfg, init, n_jobs)
    return min(runs, key=lambda r: _lex_key(r.trace[-1], r.factors))


class SignHeuristicResult(NamedTuple):
    factors: SignFactors
    objective: float
    cd_factors: RankOneFactors
    cd_objective: float
    steps: list


def l1_lra_sign(A, cfg: SolverConfig | None = None, init: RankOneFactors | None = None,
                n_jobs=None) -> SignHeuristicResult:
    """Coordinate descent followed by :func:`sign_round`, best over restarts."""
    cfg = cfg or SolverConfig()
    A = check_sign_matrix(A)

    def one(f):
        cd = l1_coordinate_descent(A, f, cfg)
        rounded, steps = sign_round_path(A, cd.factors)
        return SignHeuristicResult(rounded, l1_error(A, rounded), cd.factors,
                                   cd.trace[-1], steps)

    runs = _run_restarts(one, A, cfg, init, n_jobs)
    return min(runs, key=lambda r: _lex_key(r.objective, r.factors))


def _column_update(M, u):
    # v_j = 1 iff it strictly lowers column j's mismatches
    return ((u.sum() - 2.0 * (u @ M)) < 0).astype(np.float64)


def bmf_alternating(M, init: RankOneFactors, cfg: SolverConfig | None = None):
    """Alternating exact binary updates for rank-one BMF.

    Returns ``(BinaryFactors, trace)`` where ``trace`` lists the mismatch
    count before the first sweep and after each sweep. Stops at the first
    sweep that leaves ``(u, v)`` unchanged.
    """
    cfg = cfg or SolverConfig()
    M = check_binary_matrix(M)
    f = BinaryFactors(init.u, init.v)
    if f.shape != M.shape:
        raise ValueError("init factors do not match the matrix shape")
    u, v = f.u.copy(), f.v.copy()
    trace = [l0_error(M, f)]
    for _ in range(cfg.max_sweeps):
        v_new = _column_update(M, u)
        u_new = _column_update(M.T, v_new)
        trace.append(l0_error(M, RankOneFactors(u_new, v_new)))
        done = np.array_equal(u_new, u) and np.array_equal(v_new, v)
        u, v = u_new, v_new
        if done:
            break
    return BinaryFactors(u, v), trace


def threshold_init(f: RankOneFactors, level: float = 0.5) -> BinaryFactors:
    """Binary factors keeping components above ``level`` times the largest magnitude."""
    def cut(x):
        a = np.abs(x)
        top = a.max()
        return (a > level * top).astype(np.float64) if top > 0 else np.zeros_like(a)

    return BinaryFactors(cut(f.u), cut(f.v))


@dataclass(frozen=True, eq=False)
class LevelDecomposition:
    """Rank-one factors grouped by magnitude.

    After scaling ``u`` by ``scale`` (and ``v`` by ``1/scale``) every
    ``|u_i|`` equals ``levels[u_level[i]]`` and every ``|v_j|`` equals
    ``1 / levels[v_level[j]]``, with ``levels`` increasing and ending at 1.
    """

    levels: np.ndarray
    u_level: np.ndarray
    v_level: np.ndarray
    u_sign: np.ndarray
    v_sign: np.ndarray
    scale: float

    @property
    def k(self) -> int:
        return self.levels.size

    @property
    def beta(self) -> float:
        """Second largest level, the ratio used by both moves."""
        if self.k < 2:
            raise ValueError("a single level has no second largest value")
        return float(self.levels[-2])

    def factors(self) -> RankOneFactors:
        return RankOneFactors(self.u_sign * self.levels[self.u_level],
                              self.v_sign / self.levels[self.v_level])


def _breakpoint_repair(A, x, y):
    """Replace zero entries of ``x`` by the best break point ``A_ij / y_j``."""
    x = x.copy()
    keep = y != 0
    for i in np.flatnonzero(x == 0):
        cand = A[i, keep] / y[keep]
        cost = np.abs(A[i, keep][None, :] - cand[:, None] * y[keep][None, :]).sum(axis=1)
        x[i] = cand[int(np.argmin(cost))]
    return x


def level_decompose(f: RankOneFactors, A=None, tol: float = LEVEL_TOL) -> LevelDecomposition:
    """Group the magnitudes of a rank-one pair into levels.

    Zero components are first moved to their best break point, which needs
    the matrix ``A``. Magnitudes within ``tol`` of each other share a level.
    Raises ``ValueError`` for a zero factor or when some ``|v_j|`` is smaller
    than ``1 / max|u|`` (the pair is not in level form).
    """
    if f.is_zero():
        raise ValueError("cannot decompose a zero factor pair")
    u, v = f.u.copy(), f.v.copy()
    if not (u.all() and v.all()):
        if A is None:
            raise ValueError("zero components need the matrix for break-point repair")
        A = check_matrix(A)
        u = _breakpoint_repair(A, u, v)
        v = _breakpoint_repair(A.T, v, u)
    scale = 1.0 / np.abs(u).max()
    u, v = u * scale, v / scale
    mu, mv = np.abs(u), 1.0 / np.abs(v)
    if mv.max() > 1.0 + tol:
        raise ValueError("pair is not in level form: some |v_j| < 1 after scaling")
    mags = np.sort(np.concatenate([mu, mv]))
    levels = [mags[0]]
    for x in mags[1:]:
        if x - levels[-1] > tol:
            levels.append(x)
    levels = np.array(levels)
    levels[-1] = 1.0

    def assign(vals):
        return np.abs(vals[:, None] - levels[None, :]).argmin(axis=1)

    return LevelDecomposition(levels, assign(mu), assign(mv), np.sign(u), np.sign(v), scale)


@dataclass(frozen=True, eq=False)
class MoveDeltas:
    """Objective changes of both moves with the per-level sign-match counts.

    For level ``p < k``: ``a[p]``/``b[p]`` count matching/non-matching signs
    between ``A`` and ``u v^T`` in the block (rows at level ``p``, columns at
    the top level); ``c[p]``/``d[p]`` do the same for (rows at the top level,
    columns at level ``p``).
    """

    delta1: float
    delta2: float
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray
    alpha: np.ndarray
    beta: float

    def combined(self) -> float:
        """``(1 + beta)/(1 - beta) * delta1 + delta2``.

        This positive combination cancels the ``a`` and ``b`` counts, leaving
        :meth:`combined_closed_form`, which is never positive.
        """
        return (1 + self.beta) / (1 - self.beta) * self.delta1 + self.delta2

    def combined_closed_form(self) -> float:
        al = self.alpha
        return -float(np.sum(2 * (1 - al) / al * self.c + 2 * (1 + al) / al * self.d))


def _move_deltas(A, d: LevelDecomposition) -> MoveDeltas:
    k = d.k
    top = k - 1
    beta = d.beta
    match = np.sign(A) == np.outer(d.u_sign, d.v_sign)
    a, b, c, dd = (np.zeros(k - 1) for _ in range(4))
    rows_top = d.u_level == top
    cols_top = d.v_level == top
    for p in range(k - 1):
        blk = match[np.ix_(d.u_level == p, cols_top)]
        a[p], b[p] = blk.sum(), blk.size - blk.sum()
        blk = match[np.ix_(rows_top, d.v_level == p)]
        c[p], dd[p] = blk.sum(), blk.size - blk.sum()
    al = d.levels[:k - 1]
    delta1 = (1 - beta) * float(np.sum(-al / beta * a + al / beta * b - c / al - dd / al))
    delta2 = float(np.sum(al * (1 + beta) / beta * a - al * (1 + beta) / beta * b
                          + (2 + beta / al - 1 / al) * c - (2 + 1 / al - beta / al) * dd))
    return MoveDeltas(delta1, delta2, a, b, c, dd, al.copy(), beta)


def _apply_move(d: LevelDecomposition, factor: float) -> RankOneFactors:
    f = d.factors()
    top = d.k - 1
    u = np.where(d.u_level == top, f.u, f.u / factor)
    v = np.where(d.v_level == top, f.v, f.v * factor)
    return RankOneFactors(u, v)


def move1(A, d: LevelDecomposition):
    """Divide the non-top entries of ``u`` by ``beta`` and multiply those of ``v`` by it."""
    A = check_sign_matrix(A)
    if d.k < 2:
        raise ValueError("move1 needs at least two levels; the pair is already a sign pair")
    return _apply_move(d, d.beta), _move_deltas(A, d)


def move2(A, d: LevelDecomposition):
    """Like :func:`move1` with ``-beta``, flipping the signs of the moved entries."""
    A = check_sign_matrix(A)
    if d.k < 2:
        raise ValueError("move2 needs at least two levels; the pair is already a sign pair")
    return _apply_move(d, -d.beta), _move_deltas(A, d)


class RoundingStep(NamedTuple):
    move: str
    levels: int
    delta1: float
    delta2: float
    objective: float


def _to_sign(x):
    return np.where(x >= 0, 1.0, -1.0)


def sign_round_path(A, f: RankOneFactors):
    """Round ``f`` to sign factors, returning ``(SignFactors, steps)``.

    While the pair has more than one level, the move with the smaller
    objective change is applied (``move1`` on ties), provided it does not
    increase the l1 error. The result is compared with plain sign rounding of
    ``f`` and the better of the two is returned (the move path on ties);
    that comparison is recorded as a final ``"direct"`` step when it wins.
    """
    A = check_sign_matrix(A)
    if f.shape != A.shape:
        raise ValueError("factors do not match the matrix shape")
    if f.is_zero():
        raise ValueError("cannot round a zero factor pair")
    if f.is_sign():
        return SignFactors(f.u, f.v), []
    direct = SignFactors(_to_sign(f.u), _to_sign(f.v))
    steps = []
    path = None
    try:
        d = level_decompose(f, A)
        current = d.factors()
        while d.k > 1:
            f1, deltas = move1(A, d)
            f2, _ = move2(A, d)
            if deltas.delta1 <= deltas.delta2 and deltas.delta1 <= 0:
                name, current = "move1", f1
            elif deltas.delta2 <= 0:
                name, current = "move2", f2
            else:
                break
            steps.append(RoundingStep(name, d.k, deltas.delta1, deltas.delta2,
                                      l1_error(A, current)))
            d = level_decompose(current, A)
        else:
            path = SignFactors(_to_sign(current.u), _to_sign(current.v))
    except ValueError as exc:
        logger.info("sign rounding: move path unavailable (%s)", exc)
    if path is not None and l1_error(A, path) <= l1_error(A, direct):
        return path, steps
    steps.append(RoundingStep("direct", 1, 0.0, 0.0, l1_error(A, direct)))
    return direct, steps


def sign_round(A, f: RankOneFactors) -> SignFactors:
    """Sign factors with l1 error no larger than the move path or plain rounding."""
    return sign_round_path(A, f)[0]


def inf1_local_search(A, x, max_iter=1000):
    """Alternate ``y = sign(A^T x)``, ``x = sign(A y)`` until nothing changes.

    ``x^T A y`` never decreases; returns sign factors whose value is a lower
    bound on ``max u^T A v`` over sign vectors.
    """
    A = check_matrix(A)
    x = _to_sign(np.asarray(x, dtype=np.float64))
    y = _to_sign(A.T @ x)
    for _ in range(max_iter):
        x_new = _to_sign(A @ y)
        y_new = _to_sign(A.T @ x_new)
        if np.array_equal(x_new, x) and np.array_equal(y_new, y):
            break
        x, y = x_new, y_new
    return SignFactors(x, y)


def inf1_lower_bound(A, cfg: SolverConfig | None = None, n_jobs=None):
    """Sign pair from coordinate descent, rounding and local search.

    For {-1,+1} input the l1 solution is rounded with :func:`sign_round`
    (``mn - l1`` then equals ``x^T A y``); other input is rounded entrywise.
    Returns ``(value, SignFactors)`` with ``value = x^T A y``.
    """
    cfg = cfg or SolverConfig()
    A = check_matrix(A)
    if np.all(np.abs(A) == 1):
        start = l1_lra_sign(A, cfg, n_jobs=n_jobs).factors
    else:
        start = l1_lra_rank1(A, cfg, n_jobs=n_jobs).factors
    f = inf1_local_search(A, start.u)
    return float(f.u @ A @ f.v), f


def _cut_ascent(A, u, direction, max_iter=1000):
    # maximize direction * u^T A v over binary u, v
    u = u.astype(np.float64)
    for _ in range(max_iter):
        v = (direction * (u @ A) > 0).astype(np.float64)
        u_new = (direction * (A @ v) > 0).astype(np.float64)
        if np.array_equal(u_new, u):
            break
        u = u_new
    v = (direction * (u @ A) > 0).astype(np.float64)
    return u, v


def cut_norm_lower_bound(A, cfg: SolverConfig | None = None, n_jobs=None):
    """Binary pair from the sign heuristic followed by alternating ascent.

    Both halves ``x > 0`` and ``x < 0`` of the sign solution seed an ascent
    for ``+u^T A v`` and for ``-u^T A v``. Returns ``(value, BinaryFactors)``
    with ``value = |u^T A v|``.
    """
    A = check_matrix(A)
    _, f = inf1_lower_bound(A, cfg, n_jobs=n_jobs)
    best = None
    for seed in ((f.u > 0), (f.u < 0)):
        for direction in (1.0, -1.0):
            u, v = _cut_ascent(A, seed, direction)
            val = abs(float(u @ A @ v))
            key = (-val, tuple(u), tuple(v))
            if best is None or key < best[0]:
                best = (key, val, BinaryFactors(u, v))
    return best[1], best[2]
