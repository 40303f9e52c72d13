import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from concise_tsk.antecedent import (RuleAntecedent, WIDTH_FLOOR, estimate_membership_params,
                                    gaussian_membership, select_features)
from concise_tsk.errors import ConfigError

BETA_GRID = [0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3]


def test_threshold_rule():
    W = np.array([[0.5], [0.3], [0.1], [0.1]])
    assert list(select_features(W, 0.25)[0]) == [0, 1]


def test_beta_zero_selects_everything():
    W = np.array([[0.7, 1.0], [0.3, 0.0]])
    assert [list(s) for s in select_features(W, 0.0)] == [[0, 1], [0, 1]]


def test_empty_subset_falls_back_to_argmax():
    W = np.full((9, 1), 1 / 9)
    assert list(select_features(W, 0.3)[0]) == [0]


@pytest.mark.parametrize("beta", [-0.1, 1.5])
def test_beta_out_of_range(beta):
    with pytest.raises(ConfigError):
        select_features(np.full((2, 1), 0.5), beta)


@given(st.integers(0, 10_000), st.integers(1, 12), st.integers(1, 6))
def test_raising_beta_never_grows_subsets(seed, d, K):
    r = np.random.default_rng(seed)
    W = r.dirichlet(np.full(d, 0.5), size=K).T
    sizes = [[len(s) for s in select_features(W, b)] for b in BETA_GRID]
    for lo, hi in zip(sizes, sizes[1:]):
        assert all(b <= a for a, b in zip(lo, hi))


def test_params_single_point():
    (a,) = estimate_membership_params(np.array([[0.4, 0.9]]), np.ones((1, 1)), [np.array([1])], h=1.0)
    assert a.centers[0] == 0.9 and a.widths[0] == WIDTH_FLOOR


def test_params_two_points_by_hand():
    X = np.array([[0.0], [1.0]])
    (a,) = estimate_membership_params(X, np.array([[0.5, 0.5]]), [np.array([0])], h=1.0)
    assert a.centers[0] == pytest.approx(0.5)
    assert a.widths[0] == pytest.approx(0.25)


def test_params_match_loop_oracle(rng):
    N, d, K, h = 15, 5, 3, 10.0
    X = rng.random((N, d))
    U = rng.dirichlet(np.ones(K), size=N).T
    subsets = [np.array([0, 2]), np.array([1, 3, 4]), np.array([4])]
    ants = estimate_membership_params(X, U, subsets, h)
    for k, (a, s) in enumerate(zip(ants, subsets)):
        for pos, i in enumerate(s):
            num = den = 0.0
            for j in range(N):
                num += U[k, j] * X[j, i]
                den += U[k, j]
            c = num / den
            var = sum(U[k, j] * (X[j, i] - c) ** 2 for j in range(N)) / den
            assert a.centers[pos] == pytest.approx(c, rel=1e-12)
            assert a.widths[pos] == pytest.approx(h * var, rel=1e-12)


def test_params_reject_bad_h(rng):
    with pytest.raises(ConfigError):
        estimate_membership_params(rng.random((3, 2)), np.ones((1, 3)), [np.array([0])], h=0.0)


def test_gaussian_values():
    assert gaussian_membership(0.3, 0.3, 0.1) == 1.0
    assert gaussian_membership(0.5, 0.2, 0.09) == pytest.approx(math.exp(-0.5))
    assert gaussian_membership(0.8, 0.2, 0.09) == pytest.approx(math.exp(-2.0))


@given(st.floats(-2, 2), st.floats(1e-3, 5))
def test_gaussian_symmetric_and_decreasing(delta, sigma):
    assert gaussian_membership(delta, 0.0, sigma) == gaussian_membership(-delta, 0.0, sigma)
    if abs(delta) > 1e-9:
        assert gaussian_membership(abs(delta) * 1.5, 0.0, sigma) <= gaussian_membership(abs(delta), 0.0, sigma)


def test_rule_antecedent_invariants():
    with pytest.raises(ValueError):
        RuleAntecedent([1, 0], [0.1, 0.2], [1, 1])
    with pytest.raises(ValueError):
        RuleAntecedent([], [], [])
