import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from feintlab.reward import RewardMatrix
from feintlab.simplex import InfeasibleError, UnboundedError, linprog
from feintlab.strategy import Policy, expected_reward, policy_entropy, solve_maximin, solve_opponent
from oracles import fictitious_play_bounds, support_enumeration_value

RPS = [[0, -1, 1], [1, 0, -1], [-1, 1, 0]]

matrices = st.tuples(st.integers(1, 5), st.integers(1, 5)).flatmap(
    lambda s: arrays(np.float64, s, elements=st.floats(-10, 10, allow_subnormal=False))
)


def check_feasible(values, sol):
    x = sol.agent_policy.as_array()
    assert abs(x.sum() - 1) <= 1e-9
    assert x.min() >= -1e-12
    assert (x @ values).min() >= sol.value - 1e-8


def test_rps():
    sol = solve_maximin(np.array(RPS, dtype=float))
    assert np.allclose(sol.agent_policy.as_array(), 1 / 3, atol=1e-9)
    assert abs(sol.value) <= 1e-9


def test_matching_pennies():
    sol = solve_maximin(np.array([[1, -1], [-1, 1]], dtype=float))
    assert np.allclose(sol.agent_policy.as_array(), 0.5, atol=1e-9)
    assert abs(sol.value) <= 1e-9


def test_dominance_three_by_three():
    sol = solve_maximin(np.array([[0, -1, -2], [1, 0, -1], [2, 1, 0]], dtype=float))
    assert sol.agent_policy.probabilities == (0.0, 0.0, 1.0)
    assert sol.value == 0.0


def test_labels_and_opponent():
    R = RewardMatrix(("a", "b"), ("x", "y", "z"), [[3, -1, 0], [-2, 4, 1]])
    sol = solve_maximin(R)
    assert sol.agent_policy.labels == ("a", "b")
    assert sol.opponent_policy.labels == ("x", "y", "z")
    opp = solve_opponent(R)
    assert opp.agent_policy.labels == ("x", "y", "z")
    assert opp.value == pytest.approx(-sol.value, abs=1e-9)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        solve_maximin(np.array([[np.nan]]))
    with pytest.raises(ValueError):
        solve_maximin(np.zeros((0, 2)))
    with pytest.raises(ValueError):
        solve_maximin(np.ones((2, 2)), select="fancy")


@settings(max_examples=200, deadline=None)
@given(matrices)
def test_value_between_fictitious_play_bounds(A):
    sol = solve_maximin(A)
    check_feasible(A, sol)
    lo, hi = fictitious_play_bounds(A, 2000)
    assert lo - 1e-7 <= sol.value <= hi + 1e-7


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 4).flatmap(lambda n: arrays(np.float64, (n, n), elements=st.integers(-5, 5).map(float))))
def test_value_matches_support_enumeration(A):
    oracle = support_enumeration_value(A)
    assert oracle is not None
    assert solve_maximin(A).value == pytest.approx(oracle, abs=1e-6)


@settings(max_examples=100, deadline=None)
@given(matrices, st.floats(-50, 50))
def test_shift_invariance(A, c):
    a, b = solve_maximin(A), solve_maximin(A + c)
    assert b.value == pytest.approx(a.value + c, abs=1e-7)
    # the shifted game's policy is optimal for the original game too
    assert (b.agent_policy.as_array() @ A).min() == pytest.approx(a.value, abs=1e-7)


@settings(max_examples=100, deadline=None)
@given(matrices)
def test_balanced_is_optimal_with_wider_support(A):
    v = solve_maximin(A)
    b = solve_maximin(A, select="balanced")
    check_feasible(A, b)
    assert b.value == pytest.approx(v.value, abs=1e-8)
    support_v = v.agent_policy.as_array() > 1e-9
    support_b = b.agent_policy.as_array() > 0
    assert np.all(support_b[support_v])


def test_balanced_spreads_over_ties():
    A = np.array([[1.0, 1.0], [1.0, 1.0], [0.0, 0.0]])
    assert solve_maximin(A, select="balanced").agent_policy.probabilities == (0.5, 0.5, 0.0)


def test_expected_reward():
    R = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert expected_reward(R, Policy.pure("ab", 1), Policy.pure("cd", 0)) == 3.0
    u = Policy.uniform("abc")
    assert expected_reward(np.array(RPS, dtype=float), u, u) == 0.0
    with pytest.raises(ValueError):
        expected_reward(R, Policy.uniform("abc"), u)


@given(arrays(np.float64, (4, 4), elements=st.floats(-5, 5)), st.lists(st.floats(0.01, 1), min_size=4, max_size=4))
def test_skew_symmetric_self_play_is_zero(A, w):
    S = A - A.T
    p = Policy(tuple(np.array(w) / math.fsum(w)), "abcd")
    assert abs(expected_reward(S, p, p)) <= 1e-9


def test_entropy():
    assert policy_entropy(Policy.uniform([str(i) for i in range(16)])) == 4.0
    assert policy_entropy(Policy.pure("abc", 1)) == 0.0


def test_policy_validation():
    with pytest.raises(ValueError):
        Policy((0.5, 0.6), "ab")
    with pytest.raises(ValueError):
        Policy((1.5, -0.5), "ab")


# -- simplex ---------------------------------------------------------------


def test_linprog_textbook():
    # max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
    res = linprog([-3, -5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])
    assert np.allclose(res.x, [2, 6])
    assert res.fun == pytest.approx(-36)


def test_linprog_equality_and_negative_rhs():
    # min x + y s.t. x + y = 2, -x <= -0.5
    res = linprog([1, 1], [[-1, 0]], [-0.5], [[1, 1]], [2])
    assert res.fun == pytest.approx(2)
    assert res.x[0] >= 0.5 - 1e-12


def test_linprog_infeasible_and_unbounded():
    with pytest.raises(InfeasibleError):
        linprog([1], [[1]], [-1])
    with pytest.raises(UnboundedError):
        linprog([-1, 0], [[0, 1]], [1])


@settings(max_examples=100, deadline=None)
@given(
    arrays(np.float64, (3, 4), elements=st.floats(-5, 5)),
    arrays(np.float64, 4, elements=st.floats(-5, 5)),
)
def test_linprog_matches_scipy(A, c):
    scipy = pytest.importorskip("scipy.optimize")
    b = np.ones(3)
    A_box = np.vstack([A, np.eye(4)])
    b_box = np.concatenate([b, np.full(4, 10.0)])
    ref = scipy.linprog(c, A_ub=A_box, b_ub=b_box, method="highs")
    res = linprog(c, A_box, b_box)
    assert res.fun == pytest.approx(ref.fun, abs=1e-7)
