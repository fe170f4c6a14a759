"""scikit-learn compatible wrappers around the rank-one solvers.

Both estimators follow the ``NMF`` convention: rows of ``X`` are samples,
``components_`` has shape ``(1, n_features)`` and ``transform`` returns the
per-sample coefficient as an ``(n_samples, 1)`` array.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted, validate_data

from .community import extract_community
from .core import RankOneFactors, l0_error, l1_error
from .heuristics import (
    SolverConfig,
    _column_update,
    _rowwise_weighted_median,
    l1_lra_rank1,
    l1_lra_sign,
)
from .oracles import DEFAULT_CAP, bmf_rank1_exact
from .validation import check_binary_matrix, is_sign_matrix

__all__ = ["L1RankOneApproximation", "BinaryRankOneFactorization"]


def _validate(est, X, reset):
    return validate_data(est, X, reset=reset, dtype=np.float64, ensure_all_finite=True)


class L1RankOneApproximation(TransformerMixin, BaseEstimator):
    """Rank-one approximation minimizing the entrywise l1 error.

    Parameters
    ----------
    max_sweeps : int
        Coordinate-descent sweeps per start.
    tol : float
        Stop a run when a sweep improves the objective by less than this.
    n_restarts : int
        Number of starts; the first uses ``init``, the rest are random.
    init : {"svd", "random"}
    sign_round : bool
        For {-1,+1} input, round the result to sign factors without
        increasing the error.
    random_state : int or None
    n_jobs : int or None
        Worker threads for restarts.

    Attributes
    ----------
    components_ : ndarray of shape (1, n_features)
    u_ : ndarray of shape (n_samples,)
        Row coefficients of the training matrix.
    objective_ : float
        l1 error ``||X - u_ components_||_1`` on the training matrix.
    trace_ : list of float
        Objective after each sweep of the winning run.
    """

    def __init__(self, max_sweeps=500, tol=1e-10, n_restarts=1, init="svd",
                 sign_round=False, random_state=None, n_jobs=None):
        self.max_sweeps = max_sweeps
        self.tol = tol
        self.n_restarts = n_restarts
        self.init = init
        self.sign_round = sign_round
        self.random_state = random_state
        self.n_jobs = n_jobs

    def _config(self):
        seed = 0 if self.random_state is None else int(self.random_state)
        return SolverConfig(max_sweeps=self.max_sweeps, objective_tolerance=self.tol,
                            restarts=self.n_restarts, rng_seed=seed, init_mode=self.init)

    def fit(self, X, y=None):
        X = _validate(self, X, reset=True)
        cfg = self._config()
        if self.sign_round and is_sign_matrix(X):
            res = l1_lra_sign(X, cfg, n_jobs=self.n_jobs)
            f, trace = res.factors, [res.cd_objective, res.objective]
        else:
            res = l1_lra_rank1(X, cfg, n_jobs=self.n_jobs)
            f, trace = res.factors, res.trace
        self.u_ = np.array(f.u)
        self.components_ = np.array(f.v)[None, :]
        self.objective_ = l1_error(X, f)
        self.trace_ = list(trace)
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).u_[:, None]

    def transform(self, X):
        check_is_fitted(self)
        X = _validate(self, X, reset=False)
        v = self.components_[0]
        if not v.any():
            return np.zeros((X.shape[0], 1))
        return _rowwise_weighted_median(X, v)[:, None]

    def inverse_transform(self, W):
        check_is_fitted(self)
        return np.asarray(W, dtype=np.float64).reshape(-1, 1) @ self.components_


class BinaryRankOneFactorization(TransformerMixin, BaseEstimator):
    """Rank-one binary factorization ``X ~ u v^T`` with mismatch-count loss.

    Parameters
    ----------
    method : {"exact", "heuristic"}
        Exhaustive search (up to ``cap`` on the shorter side) or alternating
        updates from a thresholded power-iteration start.
    n_restarts : int
        Heuristic starts.
    max_sweeps : int
    cap : int
    random_state : int or None
    n_jobs : int or None

    Attributes
    ----------
    components_ : ndarray of shape (1, n_features), binary
    u_ : ndarray of shape (n_samples,), binary
    objective_ : int
        Mismatches on the training matrix.
    """

    def __init__(self, method="exact", n_restarts=1, max_sweeps=500, cap=DEFAULT_CAP,
                 random_state=None, n_jobs=None):
        self.method = method
        self.n_restarts = n_restarts
        self.max_sweeps = max_sweeps
        self.cap = cap
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        X = check_binary_matrix(_validate(self, X, reset=True))
        if self.method == "exact":
            res = bmf_rank1_exact(X, self.cap, n_jobs=self.n_jobs)
            u, v = res.u_star, res.v_star
        else:
            seed = 0 if self.random_state is None else int(self.random_state)
            cfg = SolverConfig(max_sweeps=self.max_sweeps, restarts=self.n_restarts,
                               rng_seed=seed)
            com = extract_community(X, cfg, mode="heuristic")
            u = np.zeros(X.shape[0])
            v = np.zeros(X.shape[1])
            u[[i - 1 for i in com.left]] = 1
            v[[j - 1 for j in com.right]] = 1
        self.u_ = np.array(u)
        self.components_ = np.array(v)[None, :]
        self.objective_ = l0_error(X, RankOneFactors(u, v))
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).u_[:, None]

    def transform(self, X):
        check_is_fitted(self)
        X = check_binary_matrix(_validate(self, X, reset=False))
        return _column_update(X.T, self.components_[0])[:, None]

    def inverse_transform(self, W):
        check_is_fitted(self)
        return np.asarray(W, dtype=np.float64).reshape(-1, 1) @ self.components_
