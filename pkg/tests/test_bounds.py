import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psbound.bounds import (
    chernoff_bound,
    chernoff_s,
    family_bound,
    family_lower_bound_check,
    golden_section,
    joint_convexity_check,
    lemma_check,
    lemma_functionals,
    power_family_bound,
    ps_check,
    ps_lhs,
    ps_rhs,
    ps_three_matrix_check,
    sandwich_check,
    trace_distance,
)
from psbound.errors import DomainError, SpecError
from psbound.functions import (
    AlgebraicExample,
    DiscreteMeasureSpec,
    LambertW,
    Power,
    Sqrt,
    from_discrete_measure,
    random_measure_spec,
    theorem_catalog,
)
from psbound.reports import INCONCLUSIVE
from psbound.sampling import random_density, random_loewner_pair, random_pd, trial_seed


def overlap_chernoff_oracle(rho, sigma, points=20001):
    """Dense grid of sum_ij a_i^s b_j^(1-s) |<u_i|v_j>|^2."""
    a, U = np.linalg.eigh(rho)
    b, V = np.linalg.eigh(sigma)
    a, b = np.clip(a, 0, None), np.clip(b, 0, None)
    O = np.abs(U.conj().T @ V) ** 2
    s = np.linspace(1e-3, 1 - 1e-3, points)
    vals = np.einsum("ij,ik,jk->k", O, a[:, None] ** s, b[:, None] ** (1 - s))
    return vals.min()


def test_ps_sides_by_hand():
    A, B = np.diag([1.0, 4.0]), np.diag([4.0, 1.0])
    assert ps_lhs(A, B) == pytest.approx(4.0)
    # 2 tr(A^1/2 B^1/2) = 2 (1*2 + 2*1)
    assert ps_rhs(Power(0.5), A, B) == pytest.approx(8.0)


@pytest.mark.parametrize("f", theorem_catalog(), ids=str)
def test_ps_check_on_seeded_pairs(f, pd_pairs):
    for A, B in pd_pairs:
        assert ps_check(f, A, B).passed


@pytest.mark.parametrize("f", theorem_catalog(), ids=str)
def test_ps_equality_case(f):
    A = random_pd(4, 99)
    r = ps_check(f, A, A)
    assert abs(r.rhs - r.lhs) <= 1e-9 * np.trace(A).real


def test_ps_check_reports_inconclusive_outside_domain():
    r = ps_check(Power(-0.5), np.diag([1.0, 0.0]), np.eye(2))
    assert r.status == INCONCLUSIVE and not r.is_violation


def test_three_matrix_with_identity_reduces_to_ps(pd_pairs):
    for A, B in pd_pairs[:10]:
        I = np.eye(A.shape[0])
        r3 = ps_three_matrix_check(Sqrt(), A, B, I)
        assert r3.lhs == pytest.approx(ps_lhs(A, B), rel=1e-10)
        assert r3.rhs == pytest.approx(ps_rhs(Sqrt(), A, B), rel=1e-10)


def test_three_matrix_fails_for_a_noncommuting_x():
    # tr(A^1/2 X B^1/2) can be negative once X does not commute with A and B
    A = np.diag([0.005, 0.12])
    B = np.array([[3.19, 3.45], [3.45, 3.78]])
    X = np.array([[5.63, -2.98], [-2.98, 1.66]])
    for M in (B, X):
        assert np.linalg.eigvalsh(M)[0] > 0
    r = ps_three_matrix_check(Sqrt(), A, B, X)
    assert not r.passed and r.rhs < 0 and r.margin < -0.3
    assert r.witness is not None


def test_three_matrix_holds_for_commuting_x():
    A, B = np.diag([1.0, 3.0, 0.5]), np.diag([2.0, 0.2, 0.7])
    assert ps_three_matrix_check(Power(0.3), A, B, np.diag([0.5, 2.0, 1.0])).passed


def test_lemma_commuting_case_by_hand():
    # A <= B diagonal, P = projection onto where B > A
    A, B = np.diag([1.0, 2.0]), np.diag([3.0, 2.0])
    f_dec = from_discrete_measure("decreasing", DiscreteMeasureSpec(0.0, 0.0, ((1.0, 1.0),)))
    g_mon = from_discrete_measure("monotone", DiscreteMeasureSpec(0.0, 1.0, ()))
    mon, dec = lemma_functionals(f_dec, g_mon, A, B)
    assert mon == pytest.approx(1.0 * (3.0 - 1.0))
    assert dec == pytest.approx(1.0 * (2.0 / 2.0 - 2.0 / 4.0))


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_lemma_functionals_nonnegative(dim, seed):
    rng = np.random.default_rng(seed)
    f_dec = from_discrete_measure("decreasing", random_measure_spec(rng, monotone=False))
    g_mon = from_discrete_measure("monotone", random_measure_spec(rng, monotone=True))
    A, B = random_pd(dim, trial_seed(seed, "a")), random_pd(dim, trial_seed(seed, "b"))
    assert lemma_check(f_dec, g_mon, A, B).passed


def test_chernoff_commuting_example():
    rho, sigma = np.diag([0.9, 0.1]), np.diag([0.5, 0.5])
    res = chernoff_bound(rho, sigma)
    s = np.linspace(1e-3, 1 - 1e-3, 100001)
    oracle = np.min((0.9 ** s + 0.1 ** s) * 0.5 ** (1 - s))
    assert res.value == pytest.approx(oracle, rel=1e-9)
    assert chernoff_s(rho, sigma, 0.5) == pytest.approx((math.sqrt(0.9) + math.sqrt(0.1)) * math.sqrt(0.5))


def test_chernoff_identical_states_is_one():
    rho = random_density(3, 1)
    assert chernoff_bound(rho, rho).value == pytest.approx(1.0, abs=1e-12)


def test_chernoff_matches_overlap_oracle(density_pairs):
    for rho, sigma in density_pairs[:10]:
        assert chernoff_bound(rho, sigma).value == pytest.approx(overlap_chernoff_oracle(rho, sigma), rel=1e-7)


def test_chernoff_s_range():
    with pytest.raises(DomainError):
        chernoff_s(np.eye(2), np.eye(2), 1.0)


def test_golden_section_quadratic():
    x, fx = golden_section(lambda t: abs(t - 0.3) + 1.0, 0.0, 1.0)
    assert x == pytest.approx(0.3, abs=1e-8) and fx == pytest.approx(1.0)


def test_trace_distance_by_hand():
    assert trace_distance(np.diag([0.9, 0.1]), np.diag([0.5, 0.5])) == pytest.approx(0.4)
    with pytest.raises(SpecError):
        trace_distance(np.eye(2), np.eye(2))


def test_sandwich_and_family_lower_bound(density_pairs):
    for rho, sigma in density_pairs:
        assert sandwich_check(rho, sigma).passed
        assert family_lower_bound_check(theorem_catalog(), rho, sigma).passed


def test_power_family_bound_upper_bounds_chernoff(density_pairs):
    for rho, sigma in density_pairs[:5]:
        value, f = power_family_bound(rho, sigma)
        ch = chernoff_bound(rho, sigma).value
        assert ch <= value + 1e-12 and value - ch < 1e-4


def test_family_bound_picks_minimizer_and_rejects_empty():
    p, q = np.array([0.9, 0.1]), np.array([0.2, 0.8])
    catalog = [Power(0.2), Power(0.5), LambertW(), AlgebraicExample()]
    # commuting states: tr(f(rho) g(sigma)) = sum_i f(p_i) q_i / f(q_i)
    oracle = [float(np.sum(f(p) * q / f(q))) for f in catalog]
    value, f = family_bound(catalog, np.diag(p), np.diag(q))
    assert value == pytest.approx(min(oracle), rel=1e-12)
    assert f is catalog[int(np.argmin(oracle))]
    with pytest.raises(SpecError):
        family_bound([], np.diag(p), np.diag(q))


def test_joint_convexity_for_decreasing_measures():
    rng = np.random.default_rng(4)
    for i in range(20):
        f = from_discrete_measure("decreasing", random_measure_spec(rng, monotone=False))
        g = from_discrete_measure("decreasing", random_measure_spec(rng, monotone=False))
        mats = [random_pd(3, trial_seed(4, i, k)) for k in range(4)]
        assert joint_convexity_check(f, g, *mats).passed


def test_loewner_pair_is_ordered():
    A, B = random_loewner_pair(4, 3)
    assert np.linalg.eigvalsh(B - A)[0] >= -1e-12
