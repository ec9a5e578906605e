import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psbound.errors import ConditioningError, DimensionError, SpecError
from psbound.functions import (
    Constant,
    DiscreteMeasureSpec,
    NegLog1p,
    Power,
    Reciprocal,
    Sqrt,
    from_discrete_measure,
    random_measure_spec,
    transpose_function,
)
from psbound.geometry import (
    AnticommutatorPair,
    corollary_check,
    counterexample_pair,
    hkh_check,
    operator_mean,
    parallel_sum,
    perspective,
    perspective_by_parallel_sums,
    second_variable_counterexample,
    theorem_os_check,
    weighted_mean,
)
from psbound.linalg import apply_function, loewner_leq
from psbound.reports import PRECONDITION_UNMET
from psbound.sampling import STRATEGIES, random_anticommutator_pair, random_loewner_pair, random_pd, trial_seed

MONOTONE_MEANS = [Sqrt(), Power(0.3), from_discrete_measure(
    "monotone", DiscreteMeasureSpec(0.0, 0.5, ((1.0, 1.0),)))]


def close(X, Y, tol=1e-9):
    return np.max(np.abs(X - Y)) <= tol * (1.0 + np.max(np.abs(Y)))


def test_perspective_of_reciprocal_is_square():
    A = random_pd(3, 1)
    assert close(perspective(Reciprocal(), np.eye(3), A), A @ A)


def test_perspective_commuting_joint_calculus():
    a, b = np.array([1.0, 2.0, 5.0]), np.array([3.0, 0.5, 1.0])
    P = perspective(Power(0.4), np.diag(a), np.diag(b))
    assert close(P, np.diag(b * (a / b) ** 0.4))


def test_geometric_mean_solves_riccati(pd_pairs):
    # G = A # B is the positive solution of G A^-1 G = B
    for A, B in pd_pairs[:10]:
        G = operator_mean(Sqrt(), A, B)
        assert close(G @ np.linalg.inv(A) @ G, B, 1e-8)


@pytest.mark.parametrize("f", MONOTONE_MEANS, ids=str)
def test_mean_axioms(f, pd_pairs):
    for A, B in pd_pairs[:10]:
        assert close(operator_mean(f, A, A), A)
        I = np.eye(A.shape[0])
        assert close(operator_mean(f, I, B), apply_function(B, f))


@pytest.mark.parametrize("f", MONOTONE_MEANS, ids=str)
def test_mean_joint_monotonicity(f):
    for i in range(15):
        A, A2 = random_loewner_pair(3, trial_seed(1, "a", i))
        B, B2 = random_loewner_pair(3, trial_seed(1, "b", i))
        lo, hi = operator_mean(f, A, B), operator_mean(f, A2, B2)
        assert loewner_leq(lo, hi, 1e-9 * (1 + np.abs(hi).max()))


@pytest.mark.parametrize("f", MONOTONE_MEANS + [Reciprocal(), NegLog1p()], ids=str)
def test_transpose_identities(f, pd_pairs):
    # mean(f; A, B) = P_f(B, A) = P_{f~}(A, B), and P_f(X, Y) = P_{f~}(Y, X)
    ft = transpose_function(f)
    for A, B in pd_pairs[:10]:
        M = operator_mean(f, A, B)
        assert close(M, perspective(f, B, A))
        assert close(M, perspective(ft, A, B))
        assert close(perspective(f, A, B), perspective(ft, B, A))


def test_parallel_sum_identities(pd_pairs):
    for A, B in pd_pairs[:10]:
        S = parallel_sum(A, B)
        assert close(S, A @ np.linalg.inv(A + B) @ B)
        assert close(parallel_sum(A, A), A / 2)


def test_parallel_sum_representation_matches_direct_perspective():
    rng = np.random.default_rng(2)
    for i in range(20):
        spec = random_measure_spec(rng, monotone=False)
        f = from_discrete_measure("decreasing", spec)
        A, B = random_pd(3, trial_seed(2, "a", i)), random_pd(3, trial_seed(2, "b", i))
        assert close(perspective_by_parallel_sums(spec, A, B), perspective(f, A, B), 1e-8)


def test_parallel_sum_representation_rejects_linear_term():
    with pytest.raises(SpecError):
        perspective_by_parallel_sums(DiscreteMeasureSpec(0.0, 1.0, ()), np.eye(2), np.eye(2))


def test_weighted_mean_bounds():
    assert close(weighted_mean(np.eye(2), 3 * np.eye(2), 0.25), 1.5 * np.eye(2))
    with pytest.raises(SpecError):
        weighted_mean(np.eye(2), np.eye(2), 1.5)


def test_dimension_mismatch_and_conditioning():
    with pytest.raises(DimensionError):
        perspective(Sqrt(), np.eye(2), np.eye(3))
    with pytest.raises(ConditioningError):
        operator_mean(Sqrt(), np.diag([1.0, 1e-14]), np.eye(2))


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_hkh_on_anticommutator_pairs(strategy):
    for i in range(20):
        pair = random_anticommutator_pair(3, trial_seed(3, strategy, i), strategy)
        assert pair.anticommutator_min_eig >= -AnticommutatorPair.tolerance(pair.A, pair.B)
        assert hkh_check(Sqrt(), pair).passed


def test_hkh_requires_normalized_function():
    pair = AnticommutatorPair.from_matrices(np.eye(2), 2 * np.eye(2))
    with pytest.raises(SpecError):
        hkh_check(Constant(2.0), pair)


def test_anticommutator_pair_validation():
    with pytest.raises(SpecError):
        AnticommutatorPair.from_matrices(np.diag([1.0, -1.0]), np.eye(2))
    # AB + BA has a negative eigenvalue for this pair
    A = np.diag([1.0, 100.0])
    B = np.array([[1.0, 0.9], [0.9, 1.0]])
    with pytest.raises(SpecError):
        AnticommutatorPair.from_matrices(A, B)
    with pytest.raises(SpecError):
        random_anticommutator_pair(2, 0, "bogus")


@pytest.mark.parametrize("f", [NegLog1p(), Constant(0.0)], ids=str)
def test_theorem_os_check(f):
    statuses = set()
    for i in range(40):
        A, B = random_pd(3, trial_seed(4, "a", i)), random_pd(3, trial_seed(4, "b", i))
        for alpha in (0.0, 0.25, 0.5, 0.75, 1.0):
            r = theorem_os_check(f, A, B, alpha)
            statuses.add(r.status)
            assert not r.is_violation
    # commuting, close pair makes the right side positive
    r = theorem_os_check(f, np.diag([2.0, 3.0]), np.diag([2.1, 3.0]), 0.5)
    assert r.status == "passed"
    assert PRECONDITION_UNMET in statuses


def test_theorem_os_precondition_and_normalization():
    r = theorem_os_check(NegLog1p(), np.eye(2), np.diag([5.0, 0.1]), 0.0)
    assert r.status == PRECONDITION_UNMET
    with pytest.raises(SpecError):
        theorem_os_check(Constant(1.0), np.eye(2), np.eye(2), 0.5)


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_corollary(strategy):
    for i in range(15):
        pair = random_anticommutator_pair(3, trial_seed(5, strategy, i), strategy)
        assert corollary_check(NegLog1p(), pair).passed


def test_second_variable_counterexample():
    A, C = counterexample_pair()
    assert loewner_leq(A, C)
    r = second_variable_counterexample()
    assert r.passed and r.margin > 0
    # a commuting ordered pair is not a counterexample
    assert not second_variable_counterexample(np.eye(2), 2 * np.eye(2)).passed


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**32 - 1), st.floats(0.05, 0.95))
def test_perspective_is_positively_homogeneous(dim, seed, t):
    A, B = random_pd(dim, trial_seed(seed, 0)), random_pd(dim, trial_seed(seed, 1))
    f = Power(t)
    assert close(perspective(f, 3.0 * A, 3.0 * B), 3.0 * perspective(f, A, B), 1e-8)


def test_perspective_of_decreasing_function_is_decreasing_in_first_variable():
    rng = np.random.default_rng(6)
    for i in range(20):
        f = from_discrete_measure("decreasing", random_measure_spec(rng, monotone=False))
        A, A2 = random_loewner_pair(3, trial_seed(6, "a", i))
        B = random_pd(3, trial_seed(6, "b", i))
        lo, hi = perspective(f, A2, B), perspective(f, A, B)
        assert loewner_leq(lo, hi, 1e-9 * (1 + np.abs(hi).max()))


def test_counterexample_difference_is_indefinite():
    r = second_variable_counterexample()
    assert r.details["not_decreasing"] and r.passed
