"""Randomized property checks tying the exact oracles and constructions together.

Each ``*_check`` function inspects one instance and returns a list of failure
messages (empty when every property holds). :func:`run_suite` draws random
instances and collects a :class:`SuiteResult` summary for the CLI and tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import RankOneFactors, l0_error, l1_error
from .heuristics import SolverConfig, l1_coordinate_descent, level_decompose, move1, move2
from .oracles import (
    bmf_rank1_exact,
    bmf_rank_r_exact,
    cut_norm_exact,
    inf1_norm_exact,
    l1_lra_rank1_exact_sign,
)
from .reductions import binarize_phi, cutnorm_doubling, diag_lift

__all__ = [
    "SuiteResult",
    "random_sign_matrix",
    "random_binary_matrix",
    "l1_duality_check",
    "sandwich_check",
    "doubling_check",
    "phi_check",
    "sign_optimum_check",
    "lift_check",
    "run_suite",
]

DELTA_TOL = 1e-9


@dataclass
class SuiteResult:
    name: str
    trials: int = 0
    failures: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures


def random_sign_matrix(rng, max_m, max_n, min_size=1):
    m = int(rng.integers(min_size, max_m + 1))
    n = int(rng.integers(min_size, max_n + 1))
    return rng.choice([-1.0, 1.0], size=(m, n))


def random_binary_matrix(rng, max_m, max_n, min_size=1):
    m = int(rng.integers(min_size, max_m + 1))
    n = int(rng.integers(min_size, max_n + 1))
    return rng.integers(0, 2, size=(m, n)).astype(np.float64)


def _mixed_vector(rng, size):
    # zeros and exact ones make matches possible; the rest is arbitrary real
    kind = rng.integers(0, 3, size)
    return np.where(kind == 0, 0.0, np.where(kind == 1, 1.0, rng.standard_normal(size)))


def l1_duality_check(A):
    """Minimum l1 error over sign pairs equals ``mn - max u^T A v``."""
    m, n = A.shape
    l1 = l1_lra_rank1_exact_sign(A).value
    inf1 = inf1_norm_exact(A).value
    if int(l1) != m * n - int(inf1):
        return [f"l1 optimum {l1} != {m}*{n} - {inf1}"]
    return []


def sandwich_check(A):
    cut = cut_norm_exact(A).value
    inf1 = inf1_norm_exact(A).value
    # rounding slack for real input only
    slack = 0.0 if np.all(A == np.round(A)) else 1e-9 * max(1.0, abs(inf1))
    out = []
    if cut > inf1 + slack:
        out.append(f"cut norm {cut} exceeds inf1 norm {inf1}")
    if inf1 > 4 * cut + slack:
        out.append(f"inf1 norm {inf1} exceeds 4 * cut norm {cut}")
    return out


def doubling_check(A):
    B = cutnorm_doubling(A)
    out = []
    if np.any(B.sum(axis=0) != 0) or np.any(B.sum(axis=1) != 0):
        out.append("doubled matrix has nonzero row or column sums")
    inf1 = inf1_norm_exact(A).value
    cut_b = cut_norm_exact(B).value
    inf1_b = inf1_norm_exact(B).value
    if cut_b != inf1:
        out.append(f"cut(doubling) = {cut_b} != inf1(A) = {inf1}")
    if inf1_b != 4 * inf1:
        out.append(f"inf1(doubling) = {inf1_b} != 4 * {inf1}")
    return out


def phi_check(M, x, y):
    f = RankOneFactors(x, y)
    g = RankOneFactors(binarize_phi(x), binarize_phi(y))
    before, after = l0_error(M, f), l0_error(M, g)
    if after > before:
        return [f"support binarization raised l0 error from {before} to {after}"]
    return []


def lift_check(M0, r=2):
    lifted = bmf_rank_r_exact(diag_lift(M0, r), r)[0]
    single = bmf_rank1_exact(M0).value
    if lifted != r * single:
        return [f"rank-{r} optimum of lifted matrix {lifted} != {r} * {single}"]
    return []


def _two_level(x, y, rows, cols, alpha):
    u = x.copy()
    v = y.copy()
    u[rows] *= alpha
    v[cols] /= alpha
    return RankOneFactors(u, v)


def _move_identities(A, f):
    """Closed-form deltas against direct evaluation; returns (failures, deltas)."""
    d = level_decompose(f, A)
    if d.k < 2:
        return [], None
    f1, deltas = move1(A, d)
    f2, _ = move2(A, d)
    base = l1_error(A, d.factors())
    out = []
    for name, closed, moved in (("delta1", deltas.delta1, f1), ("delta2", deltas.delta2, f2)):
        direct = l1_error(A, moved) - base
        if abs(closed - direct) > DELTA_TOL:
            out.append(f"{name} closed form {closed!r} != direct {direct!r}")
    if abs(deltas.combined() - deltas.combined_closed_form()) > DELTA_TOL:
        out.append("combined move identity violated")
    return out, deltas


def sign_optimum_check(A, rng, perturbations=10, cd_starts=3):
    """Structure of optimal rank-one l1 solutions of a sign matrix.

    * The oracle's sign certificate attains its value, and no coordinate
      descent run from a random real start goes below it.
    * For random two-level perturbations of the optimum, the closed-form
      move deltas equal direct objective differences and no perturbation
      beats the optimum.
    * Perturbations that scale only tied rows stay optimal; for those both
      deltas must be nonnegative and the top-level blocks must be empty.

    Returns ``(failures, stats)``.
    """
    A = np.asarray(A, dtype=np.float64)
    m, n = A.shape
    opt = l1_lra_rank1_exact_sign(A)
    failures = []
    stats = {"perturbations": 0, "optimal_two_level": 0}
    x, y = opt.u_star, opt.v_star
    if l1_error(A, opt.factors) != opt.value:
        failures.append("oracle certificate does not attain its value")
    cfg = SolverConfig()
    for _ in range(cd_starts):
        f = RankOneFactors(rng.standard_normal(m), rng.standard_normal(n))
        val = l1_coordinate_descent(A, f, cfg).trace[-1]
        if val < opt.value - DELTA_TOL:
            failures.append(f"real pair with error {val} beats sign optimum {opt.value}")

    def examine(f, expect_optimal):
        obj = l1_error(A, f)
        if obj < opt.value - DELTA_TOL:
            failures.append(f"two-level pair with error {obj} beats optimum {opt.value}")
        fails, deltas = _move_identities(A, f)
        failures.extend(fails)
        if deltas is None:
            return
        stats["perturbations"] += 1
        if abs(obj - opt.value) <= DELTA_TOL:
            stats["optimal_two_level"] += 1
            if deltas.delta1 < -DELTA_TOL or deltas.delta2 < -DELTA_TOL:
                failures.append(f"optimal two-level pair with negative delta "
                                f"({deltas.delta1}, {deltas.delta2})")
            if deltas.c.sum() or deltas.d.sum():
                failures.append("optimal two-level pair with non-empty (k, p) blocks")
        elif expect_optimal:
            failures.append("tied-row perturbation changed the objective")

    for _ in range(perturbations):
        rows = rng.random(m) < 0.5
        cols = rng.random(n) < 0.5
        if rows.all():
            rows[rng.integers(m)] = False
        examine(_two_level(x, y, rows, cols, rng.uniform(0.05, 0.95)), False)

    # rows where flipping x_i does not change the error
    tied = np.flatnonzero(x * (A @ y) == 0)
    if tied.size and tied.size < m:
        for _ in range(perturbations):
            rows = np.zeros(m, dtype=bool)
            rows[tied] = rng.random(tied.size) < 0.5
            if not rows.any():
                rows[tied[0]] = True
            examine(_two_level(x, y, rows, np.zeros(n, dtype=bool),
                               rng.uniform(0.05, 0.95)), True)
    return failures, stats


def run_suite(name, trials, seed=0, max_m=5, max_n=5):
    """Run one named property suite on ``trials`` random instances."""
    rng = np.random.default_rng(seed)
    result = SuiteResult(name)
    for t in range(trials):
        if name == "l1_duality":
            A = random_sign_matrix(rng, max_m, max_n)
            fails = l1_duality_check(A)
        elif name == "doubling":
            A = random_sign_matrix(rng, max_m, max_n)
            fails = doubling_check(A)
        elif name == "sandwich":
            A = (random_sign_matrix(rng, max_m, max_n) if t % 2 == 0
                 else rng.standard_normal((int(rng.integers(1, max_m + 1)),
                                           int(rng.integers(1, max_n + 1)))))
            fails = sandwich_check(A)
        elif name == "sign_optimum":
            A = rng.choice([-1.0, 1.0], size=(max_m, max_n))
            fails, stats = sign_optimum_check(A, rng)
            for key, val in stats.items():
                result.stats[key] = result.stats.get(key, 0) + val
        elif name == "phi":
            A = random_binary_matrix(rng, max_m, max_n)
            x = _mixed_vector(rng, A.shape[0])
            y = _mixed_vector(rng, A.shape[1])
            fails = phi_check(A, x, y)
        elif name == "lift":
            A = random_binary_matrix(rng, max_m, max_n)
            fails = lift_check(A)
        else:
            raise ValueError(f"unknown suite {name!r}")
        result.trials += 1
        if fails:
            result.failures.append((A, fails))
    return result
