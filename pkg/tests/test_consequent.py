import numpy as np
import pytest
from hypothesis import given, strategies as st

from concise_tsk.antecedent import RuleAntecedent
from concise_tsk.consequent import (LassoProblem, fista_solve, least_squares_init, lipschitz_constant,
                                    power_iteration, prune_rules, retained_mask, soft_threshold,
                                    solve_channels)
from concise_tsk.errors import ConfigError, DataError
from concise_tsk.inference import Rule, TskModel
from oracles import lasso_cd, lasso_objective, pinv_eig

LAMBDAS = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]


@pytest.mark.parametrize("v, g, expected", [(2.0, 0.5, 1.5), (0.3, 0.5, 0.0), (-2.0, 0.5, -1.5),
                                            (0.5, 0.5, 0.0), (-0.5, 0.5, 0.0)])
def test_soft_threshold_branches(v, g, expected):
    assert soft_threshold(v, g) == expected


@given(st.floats(-1e6, 1e6), st.floats(0, 1e3))
def test_soft_threshold_properties(v, g):
    assert soft_threshold(v, 0.0) == v
    assert soft_threshold(-v, g) == -soft_threshold(v, g)


def test_soft_threshold_negative_gamma():
    with pytest.raises(ConfigError):
        soft_threshold(1.0, -0.1)


def test_lipschitz_identity_and_scaled():
    assert lipschitz_constant(np.eye(5)) == pytest.approx(1.01, rel=1e-12)
    assert lipschitz_constant(2 * np.eye(5)) == pytest.approx(4.04, rel=1e-12)


def test_power_iteration_matches_dense_solver(rng):
    for _ in range(10):
        A = rng.normal(size=(20, 6))
        G = A.T @ A
        assert power_iteration(G) == pytest.approx(np.linalg.eigvalsh(G)[-1], rel=1e-6)


def test_lipschitz_zero_matrix():
    with pytest.raises(DataError):
        lipschitz_constant(np.zeros((3, 2)))


def test_ls_identity(rng):
    y = rng.normal(size=6)
    np.testing.assert_allclose(least_squares_init(np.eye(6), y), y, atol=1e-6)


def test_ls_planted_solution(rng):
    X = rng.normal(size=(30, 5))
    p = rng.normal(size=5)
    np.testing.assert_allclose(least_squares_init(X, X @ p), p, atol=1e-5)


def test_ls_rank_deficient_matches_pinv(rng):
    X = rng.normal(size=(20, 4))
    X = np.column_stack([X, X[:, 1]])
    y = rng.normal(size=20)
    p = least_squares_init(X, y)
    assert np.all(np.isfinite(p))
    ref = pinv_eig(X) @ y
    np.testing.assert_allclose(X @ p - y, X @ ref - y, atol=1e-5)


def test_fista_lambda_zero_is_least_squares(rng):
    X = rng.normal(size=(25, 5))
    y = rng.normal(size=25)
    p0 = least_squares_init(X, y)
    sol = fista_solve(LassoProblem(X, y, 0.0), p0)
    assert lasso_objective(X, y, sol.p, 0.0) == pytest.approx(lasso_objective(X, y, p0, 0.0), abs=1e-8)


def test_fista_identity_design_is_soft_threshold(rng):
    y = rng.normal(size=8) * 2
    for lam in (0.1, 0.5, 1.3):
        sol = fista_solve(LassoProblem(np.eye(8), y, lam))
        np.testing.assert_array_equal(sol.p, soft_threshold(y, lam))


def test_fista_matches_coordinate_descent(rng):
    X = rng.normal(size=(40, 10))
    y = X @ np.r_[rng.normal(size=4), np.zeros(6)] + 0.1 * rng.normal(size=40)
    sol = fista_solve(LassoProblem(X, y, 0.3))
    ref = lasso_cd(X, y, 0.3)
    assert lasso_objective(X, y, sol.p, 0.3) == pytest.approx(lasso_objective(X, y, ref, 0.3), abs=1e-5)


def test_fista_objective_never_below_optimum(rng):
    X = rng.normal(size=(30, 8))
    y = rng.normal(size=30)
    sol = fista_solve(LassoProblem(X, y, 0.5))
    opt = lasso_objective(X, y, lasso_cd(X, y, 0.5), 0.5)
    assert min(sol.objective_trace) >= opt - 1e-9


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_fista_non_finite_raises():
    X = np.array([[1.0, 0.0], [0.0, 1.0]])
    with pytest.raises(Exception, match="iteration 1"):
        fista_solve(LassoProblem(X, np.array([np.inf, 0.0]), 0.1), init=np.zeros(2), L=1.0)


def test_sparsity_monotone_in_lambda(rng):
    X = rng.dirichlet(np.ones(12) * 0.3, size=60)
    y = rng.integers(0, 2, 60).astype(float)
    counts = [np.count_nonzero(solve_channels(X, y, lam)) for lam in LAMBDAS]
    assert all(b <= a for a, b in zip(counts, counts[1:]))


def _draft(K):
    rules = [Rule(k, RuleAntecedent([0], [0.5], [0.1]), [0.0]) for k in range(K)]
    return TskModel(rules=rules, outputs=1, n_clusters=K)


def test_prune_single_output():
    m = prune_rules(_draft(3), np.array([[0.0], [0.7], [0.0]]))
    assert [r.index for r in m.rules] == [1]
    assert [r.index for r in m.abandoned] == [0, 2]


def test_prune_max_over_outputs():
    m = _draft(2)
    m.outputs = 2
    m = prune_rules(m, np.array([[0.0, 0.5], [0.3, 0.0]]))
    assert len(m.rules) == 2


def test_prune_keeps_at_least_one_rule():
    keep = retained_mask(np.array([[1e-12], [-5e-9], [0.0]]))
    assert keep.tolist() == [False, True, False]


def test_large_lipschitz_design_still_reaches_optimum():
    # with a big L each step moves little; the stop must not mistake that for convergence
    r = np.random.default_rng(10)
    A = 10.0 * r.random((100, 4))
    y = r.normal(size=100)
    sol = fista_solve(LassoProblem(A, y, 0.5))
    ref = lasso_cd(A, y, 0.5)
    assert lasso_objective(A, y, sol.p, 0.5) - lasso_objective(A, y, ref, 0.5) < 1e-8


@pytest.mark.parametrize("restart", [True, False])
def test_converges_with_and_without_restart(restart):
    r = np.random.default_rng(11)
    A = r.random((40, 10))
    y = r.normal(size=40)
    sol = fista_solve(LassoProblem(A, y, 0.3), polish=False, restart=restart)
    assert sol.iterations < 20000
    ref = lasso_cd(A, y, 0.3)
    assert abs(lasso_objective(A, y, sol.p, 0.3) - lasso_objective(A, y, ref, 0.3)) < 1e-6
