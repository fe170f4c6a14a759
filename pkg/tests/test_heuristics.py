import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import binary_matrices, real_matrices, sign_matrices
from robust_rank1 import fixtures
from robust_rank1.core import BinaryFactors, RankOneFactors, SignFactors, l0_error, l1_error
from robust_rank1.heuristics import (
    SolverConfig,
    ZeroMatrixWarning,
    bmf_alternating,
    cut_norm_lower_bound,
    inf1_local_search,
    inf1_lower_bound,
    l1_coordinate_descent,
    l1_lra_rank1,
    l1_lra_sign,
    level_decompose,
    move1,
    move2,
    power_iteration_rank1,
    sign_round,
    sign_round_path,
    threshold_init,
    weighted_median,
)
from robust_rank1.oracles import (
    bmf_rank1_exact,
    cut_norm_exact,
    inf1_norm_exact,
    l1_lra_rank1_exact_sign,
)

X = fixtures.TRAP_LOCAL_X


class TestConfig:
    @pytest.mark.parametrize("kwargs", [
        {"max_sweeps": 0}, {"restarts": 0}, {"objective_tolerance": -1},
        {"init_mode": "bogus"},
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            SolverConfig(**kwargs)


class TestPowerIteration:
    def test_displayed_l2_approximation(self):
        f = power_iteration_rank1(fixtures.COMMUNITY_PERTURBED)
        dev = np.abs(f.matrix() - fixtures.COMMUNITY_PERTURBED_L2).max()
        assert dev < 0.005

    def test_rank_one_input(self, rng):
        a, b = rng.standard_normal(5), rng.standard_normal(7)
        R = np.outer(a, b)
        f = power_iteration_rank1(R)
        np.testing.assert_allclose(f.matrix(), R, rtol=1e-8, atol=1e-8 * np.abs(R).max())
        assert f.u.sum() >= 0

    def test_matches_svd(self, rng):
        M = rng.standard_normal((8, 8))
        U, s, Vt = np.linalg.svd(M)
        f = power_iteration_rank1(M, SolverConfig(max_sweeps=10_000))
        np.testing.assert_allclose(f.matrix(), s[0] * np.outer(U[:, 0], Vt[0]), atol=1e-6)

    def test_long_run_oracle(self, rng):
        M = rng.standard_normal((8, 8))
        f = power_iteration_rank1(M)
        # independent long run without the stopping rule
        v = np.ones(8)
        for _ in range(10_000):
            u = M @ v
            u /= np.linalg.norm(u)
            v = M.T @ u
        oracle = ((M - np.outer(u, v)) ** 2).sum()
        assert ((M - f.matrix()) ** 2).sum() == pytest.approx(oracle, abs=1e-6)

    def test_start_orthogonal_to_row_space(self):
        M = np.array([[1.0, -1.0], [2.0, -2.0]])
        f = power_iteration_rank1(M)
        np.testing.assert_allclose(f.matrix(), M, atol=1e-10)

    def test_zero_matrix_warns(self):
        with pytest.warns(ZeroMatrixWarning):
            f = power_iteration_rank1(np.zeros((2, 3)))
        assert f.is_zero()


def scan_breakpoints(values, weights):
    candidates = np.unique(values)
    cost = [np.sum(weights * np.abs(t - values)) for t in candidates]
    return candidates[int(np.argmin(cost))], min(cost)


class TestWeightedMedian:
    def test_lower_endpoint(self):
        assert weighted_median([1, 2], [1, 1]) == 1
        assert weighted_median([3, 1, 2], [1, 1, 1]) == 2
        assert weighted_median([0, 10], [1, 3]) == 10

    @given(st.lists(st.tuples(st.floats(-100, 100), st.floats(0.01, 10)), min_size=1, max_size=12))
    def test_is_minimizer(self, pairs):
        values = np.array([p[0] for p in pairs])
        weights = np.array([p[1] for p in pairs])
        t = weighted_median(values, weights)
        _, best = scan_breakpoints(values, weights)
        assert np.sum(weights * np.abs(t - values)) <= best * (1 + 1e-12) + 1e-12


class TestCoordinateDescent:
    @pytest.mark.parametrize("x", [0.55, 0.7, X, 0.95])
    def test_trap_is_stationary(self, x):
        res = l1_coordinate_descent(fixtures.TRAP, fixtures.trap_stationary(x))
        assert res.trace[-1] == pytest.approx(res.trace[0], abs=1e-12)
        assert len(res.trace) == 2

    def test_trap_error_value(self):
        err = l1_error(fixtures.TRAP, fixtures.trap_stationary(X))
        assert err == pytest.approx(12 + 8 * np.sqrt(2), abs=1e-12)
        assert abs(err - 23.3) <= 0.05

    def test_trap_coordinatewise_unimprovable(self):
        f = fixtures.trap_stationary(0.7)
        A = fixtures.TRAP
        base = l1_error(A, f)
        for i in range(6):
            t, _ = scan_breakpoints(A[i] / f.v, np.abs(f.v))
            u = f.u.copy()
            u[i] = t
            assert l1_error(A, RankOneFactors(u, f.v)) >= base - 1e-12

    def test_exact_fit_returns_immediately(self, rng):
        u, v = rng.standard_normal(4), rng.standard_normal(5)
        res = l1_coordinate_descent(np.outer(u, v), RankOneFactors(u, v))
        assert res.trace[0] == 0 and res.trace[-1] == 0

    @settings(max_examples=40)
    @given(real_matrices(6, 6), st.integers(0, 2**16))
    def test_trace_monotone_and_updates_optimal(self, M, seed):
        rng = np.random.default_rng(seed)
        init = RankOneFactors(rng.standard_normal(M.shape[0]) + 0.1,
                              rng.standard_normal(M.shape[1]) + 0.1)
        res = l1_coordinate_descent(M, init, SolverConfig(max_sweeps=20))
        if res.reseeds == 0:
            assert all(b <= a + 1e-9 for a, b in zip(res.trace, res.trace[1:]))
        f = res.factors
        # final v is a breakpoint-scan optimum given the final u
        for j in range(M.shape[1]):
            with np.errstate(over="ignore"):
                ratios = M[:, j] / np.where(f.u != 0, f.u, np.inf)
            # zero and subnormal u_i contribute nothing usable as a break point
            keep = (f.u != 0) & np.isfinite(ratios)
            if not keep.any():
                break
            _, best = scan_breakpoints(ratios[keep], np.abs(f.u[keep]))
            actual = np.sum(np.abs(M[keep, j] - f.u[keep] * f.v[j]))
            assert actual <= best + 1e-9 * (1 + best)

    def test_reseeds_collapsed_factor(self):
        M = np.array([[0.0, 0.0], [0.0, 1.0]])
        res = l1_coordinate_descent(M, RankOneFactors([1.0, 0.0], [1.0, 1.0]))
        assert res.reseeds >= 1
        assert res.trace[-1] == 0

    def test_init_validation(self):
        with pytest.raises(ValueError):
            l1_coordinate_descent(np.ones((2, 2)), RankOneFactors([0, 0], [1, 1]))
        with pytest.raises(ValueError):
            l1_coordinate_descent(np.ones((2, 2)), RankOneFactors([1], [1, 1]))

    def test_restarts_threads_independent(self, rng):
        A = rng.choice([-1.0, 1.0], size=(6, 6))
        cfg = SolverConfig(restarts=8, rng_seed=3)
        a = l1_lra_rank1(A, cfg)
        b = l1_lra_rank1(A, cfg, n_jobs=4)
        assert a.factors == b.factors and a.trace == b.trace

    def test_given_init_required(self):
        with pytest.raises(ValueError):
            l1_lra_rank1(np.ones((2, 2)), SolverConfig(init_mode="given"))

    def test_never_below_optimum(self, rng):
        for _ in range(20):
            A = rng.choice([-1.0, 1.0], size=(6, 6))
            opt = l1_lra_rank1_exact_sign(A).value
            res = l1_lra_rank1(A, SolverConfig(restarts=5, rng_seed=int(rng.integers(1000))))
            assert res.trace[-1] >= opt - 1e-9


class TestBMFAlternating:
    def test_perturbed_community(self):
        start = threshold_init(power_iteration_rank1(fixtures.COMMUNITY_PERTURBED))
        f, trace = bmf_alternating(fixtures.COMMUNITY_PERTURBED, start)
        assert trace[-1] == 3
        np.testing.assert_array_equal(f.u, fixtures.COMMUNITY_U)
        np.testing.assert_array_equal(f.v, fixtures.COMMUNITY_V)

    def test_zero_matrix(self):
        f, trace = bmf_alternating(np.zeros((3, 3)), BinaryFactors([1, 0, 1], [1, 1, 0]))
        assert trace[-1] == 0 and f.is_zero()
        assert not f.u.any() and not f.v.any()

    @settings(max_examples=40)
    @given(binary_matrices(6, 6), st.integers(0, 2**16))
    def test_fixed_point_properties(self, M, seed):
        rng = np.random.default_rng(seed)
        init = BinaryFactors(rng.integers(0, 2, M.shape[0]), rng.integers(0, 2, M.shape[1]))
        f, trace = bmf_alternating(M, init)
        assert all(b <= a for a, b in zip(trace, trace[1:]))
        assert trace[-1] >= bmf_rank1_exact(M).value
        # no single flip improves
        for vec, other, which in ((f.u, f.v, 0), (f.v, f.u, 1)):
            for k in range(vec.size):
                flipped = vec.copy()
                flipped[k] = 1 - flipped[k]
                g = RankOneFactors(flipped, other) if which == 0 else RankOneFactors(other, flipped)
                assert l0_error(M, g) >= trace[-1]


class TestLevels:
    def test_trap_pair(self):
        d = level_decompose(fixtures.trap_stationary(X))
        assert d.k == 2
        assert d.levels[0] == pytest.approx(X)

    def test_sign_pair(self):
        d = level_decompose(RankOneFactors([1, -1], [-1, 1, 1]))
        assert d.k == 1 and d.levels[0] == 1

    def test_small_example(self):
        d = level_decompose(RankOneFactors([0.5, 1], [2, 1]))
        assert d.k == 2 and d.levels[0] == 0.5
        np.testing.assert_array_equal(d.u_level + 1, [1, 2])
        np.testing.assert_array_equal(d.v_level + 1, [1, 2])

    @given(st.integers(0, 2**16), st.integers(1, 4))
    def test_reconstruction(self, seed, k):
        rng = np.random.default_rng(seed)
        levels = np.sort(rng.uniform(0.1, 1.0, k))
        levels[-1] = 1.0
        u = rng.choice([-1, 1], 5) * levels[rng.integers(0, k, 5)]
        u[0] = 1.0
        v = rng.choice([-1, 1], 4) / levels[rng.integers(0, k, 4)]
        f = RankOneFactors(u * 3.0, v / 3.0)
        d = level_decompose(f)
        np.testing.assert_allclose(d.factors().matrix(), f.matrix(), rtol=1e-12, atol=1e-12)

    def test_zero_components_need_matrix(self):
        f = RankOneFactors([1.0, 0.0], [1.0, 1.0])
        with pytest.raises(ValueError):
            level_decompose(f)
        d = level_decompose(f, np.array([[1.0, 1.0], [-1.0, -1.0]]))
        assert d.factors().u.all()

    def test_not_level_form(self):
        with pytest.raises(ValueError, match="level form"):
            level_decompose(RankOneFactors([1.0, 1.0], [0.5, 1.0]))
        with pytest.raises(ValueError):
            level_decompose(RankOneFactors([0.0], [1.0]))


def random_level_pair(rng, m, n, k):
    levels = np.sort(rng.uniform(0.05, 0.95, k - 1))
    levels = np.append(levels, 1.0)
    lu = rng.integers(0, k, m)
    lu[0] = k - 1
    lv = rng.integers(0, k, n)
    return RankOneFactors(rng.choice([-1, 1], m) * levels[lu], rng.choice([-1, 1], n) / levels[lv])


class TestMoves:
    def test_move2_escapes_trap(self):
        d = level_decompose(fixtures.trap_stationary(X), fixtures.TRAP)
        g, deltas = move2(fixtures.TRAP, d)
        assert l1_error(fixtures.TRAP, g) == pytest.approx(16, abs=1e-12)
        assert g.is_sign()
        assert deltas.delta2 == pytest.approx(-(8 * np.sqrt(2) - 4), abs=1e-12)

    def test_sign_pair_is_error(self):
        d = level_decompose(fixtures.TRAP_OPTIMUM)
        for move in (move1, move2):
            with pytest.raises(ValueError):
                move(fixtures.TRAP, d)

    @pytest.mark.parametrize("k", [2, 3])
    def test_closed_forms_match_direct(self, rng, k):
        for _ in range(100):
            A = rng.choice([-1.0, 1.0], size=(5, 5))
            d = level_decompose(random_level_pair(rng, 5, 5, k))
            if d.k < 2:
                continue
            base = l1_error(A, d.factors())
            f1, deltas = move1(A, d)
            f2, _ = move2(A, d)
            assert deltas.delta1 == pytest.approx(l1_error(A, f1) - base, abs=1e-9)
            assert deltas.delta2 == pytest.approx(l1_error(A, f2) - base, abs=1e-9)
            assert deltas.combined() == pytest.approx(deltas.combined_closed_form(), abs=1e-9)
            assert deltas.combined_closed_form() <= 0


class TestSignRound:
    def test_trap(self):
        g, steps = sign_round_path(fixtures.TRAP, fixtures.trap_stationary(X))
        assert l1_error(fixtures.TRAP, g) == 16
        assert [s.move for s in steps] == ["move2"]

    def test_sign_input_is_identity(self):
        g = sign_round(fixtures.TRAP, fixtures.TRAP_OPTIMUM)
        assert g == fixtures.TRAP_OPTIMUM
        assert isinstance(g, SignFactors)

    @settings(max_examples=50)
    @given(sign_matrices(5, 5), st.integers(0, 2**16))
    def test_never_worse_than_plain_rounding(self, A, seed):
        rng = np.random.default_rng(seed)
        f = RankOneFactors(rng.standard_normal(A.shape[0]), rng.standard_normal(A.shape[1]))
        g = sign_round(A, f)
        plain = RankOneFactors(np.where(f.u >= 0, 1, -1), np.where(f.v >= 0, 1, -1))
        assert l1_error(A, g) <= l1_error(A, plain)

    def test_keeps_optimal_cd_output_optimal(self, rng):
        checked = 0
        for _ in range(100):
            A = rng.choice([-1.0, 1.0], size=(6, 6))
            opt = l1_lra_rank1_exact_sign(A).value
            cd = l1_lra_rank1(A, SolverConfig(restarts=3, rng_seed=int(rng.integers(10**6))))
            if abs(cd.trace[-1] - opt) <= 1e-9:
                checked += 1
                assert l1_error(A, sign_round(A, cd.factors)) <= cd.trace[-1] + 1e-9
        assert checked > 0

    def test_heuristic_result_consistent(self):
        res = l1_lra_sign(fixtures.TRAP, SolverConfig(init_mode="given"),
                          init=fixtures.trap_stationary(X))
        assert res.cd_objective == pytest.approx(12 + 8 * np.sqrt(2))
        assert res.objective == 16 == l1_error(fixtures.TRAP, res.factors)


class TestNormBounds:
    @settings(max_examples=30)
    @given(sign_matrices(5, 5))
    def test_inf1_lower_bound(self, A):
        value, f = inf1_lower_bound(A, SolverConfig(restarts=3))
        assert value == f.u @ A @ f.v
        assert value <= inf1_norm_exact(A).value

    @settings(max_examples=30)
    @given(real_matrices(5, 5))
    def test_cut_lower_bound(self, A):
        value, f = cut_norm_lower_bound(A, SolverConfig(restarts=3))
        assert value == abs(f.u @ A @ f.v)
        assert value <= cut_norm_exact(A).value + 1e-9

    def test_local_search_is_monotone(self, rng):
        A = rng.standard_normal((6, 5))
        x = rng.choice([-1.0, 1.0], 6)
        y = np.where(A.T @ x >= 0, 1.0, -1.0)
        f = inf1_local_search(A, x)
        assert f.u @ A @ f.v >= x @ A @ y - 1e-12
