import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from psbound.errors import DomainError, NotInvertibleError, RangeError, SingularityError, SpecError
from psbound.functions import (
    AlgebraicExample,
    Companion,
    CompositeH,
    Constant,
    DiscreteMeasureSpec,
    LambertW,
    NegLog1p,
    Power,
    Reciprocal,
    Sqrt,
    companion_g,
    compose_with_g_inverse,
    from_discrete_measure,
    function_from_spec,
    lambert_w0,
    parse_function_list,
    random_measure_spec,
    theorem_catalog,
    transpose_function,
)


def bisection_w(x, steps=200):
    """Oracle: root of w e^w = x on [0, max(1, log(1+x))]."""
    lo, hi = 0.0, max(1.0, math.log1p(x))
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if mid * math.exp(mid) < x:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.mark.parametrize("x", [0.0, 1e-12, 0.3, 1.0, math.e, 10.0, 1e3, 1e6])
def test_lambert_matches_bisection(x):
    assert lambert_w0(x) == pytest.approx(bisection_w(x), rel=1e-13, abs=1e-15)


def test_lambert_special_values():
    assert lambert_w0(0.0) == 0.0
    assert lambert_w0(math.e) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(DomainError):
        LambertW()(-0.1)


def test_lambert_vectorized_shape():
    x = np.array([[0.5, 2.0], [5.0, 100.0]])
    w = lambert_w0(x)
    assert w.shape == x.shape
    assert np.allclose(w * np.exp(w), x, rtol=1e-14)


def test_power_domain_and_values():
    assert Power(0.5)(4.0) == 2.0
    assert Power(0.5)(0.0) == 0.0
    with pytest.raises(DomainError):
        Power(-1.0)(0.0)
    with pytest.raises(DomainError):
        Sqrt()(-1.0)


@pytest.mark.parametrize("s", [0.1, 0.25, 0.5, 0.9])
def test_power_companion_is_complementary_power(s):
    g = companion_g(Power(s))
    x = np.geomspace(1e-6, 1e6, 50)
    assert np.allclose(g(x), x ** (1 - s), rtol=1e-13)
    assert g(0.0) == pytest.approx(0.0, abs=1e-15)


def test_companion_limits_at_zero():
    # x / W(x) = e^W(x) -> 1; the algebraic companion is (sqrt(x(x+8)) + x) / 4 -> 0
    assert companion_g(LambertW()).at_zero == pytest.approx(1.0, abs=1e-12)
    assert companion_g(AlgebraicExample()).at_zero == pytest.approx(0.0, abs=1e-10)
    assert companion_g(Constant(2.0))(0.0) == 0.0


def test_algebraic_companion_closed_form():
    g = companion_g(AlgebraicExample())
    x = np.linspace(0.01, 50, 101)
    assert np.allclose(g(x), (np.sqrt(x * (x + 8)) + x) / 4, rtol=1e-13)
    assert g(1.0) == pytest.approx(1.0)


def test_companion_needs_positive_function():
    with pytest.raises(SingularityError):
        Companion(NegLog1p())
    with pytest.raises(SingularityError):
        Companion(Constant(0.0))


def test_composite_h_examples():
    h = compose_with_g_inverse(AlgebraicExample())
    x = np.linspace(0.25, 50, 200)
    assert np.max(np.abs(h(x) - 2 * x / (x + 1))) < 1e-10
    hl = compose_with_g_inverse(LambertW())
    y = np.linspace(1.0, 100.0, 200)
    assert np.max(np.abs(hl(y) - np.log(y))) < 1e-10


def test_composite_h_of_power_is_power():
    # g = x^(1-s) so h(y) = y^(s / (1 - s))
    h = CompositeH(Power(0.25))
    y = np.geomspace(1e-3, 1e3, 40)
    assert np.allclose(h(y), y ** (1 / 3), rtol=1e-11)


def test_composite_h_rejects_noninvertible_and_out_of_range():
    with pytest.raises(NotInvertibleError):
        CompositeH(Power(2.0))
    hl = CompositeH(LambertW())
    with pytest.raises(RangeError):
        hl(0.5)


def test_transpose_of_power():
    t = transpose_function(Power(0.3))
    x = np.geomspace(1e-3, 1e3, 30)
    assert np.allclose(t(x), x ** 0.7, rtol=1e-13)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(1e-3, 1e3))
def test_transpose_is_an_involution(s, x):
    f = Power(s)
    assert transpose_function(transpose_function(f))(x) == pytest.approx(f(x), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_measure_functions_are_monotone_in_the_right_direction(seed, monotone):
    f = from_discrete_measure("monotone" if monotone else "decreasing",
                              random_measure_spec(np.random.default_rng(seed), monotone))
    x = np.geomspace(1e-3, 1e3, 64)
    steps = np.diff(f(x))
    assert np.all(steps > 0) if monotone else np.all(steps < 0)
    assert np.all(f(x) > 0)


def test_measure_closed_form():
    spec = DiscreteMeasureSpec(0.5, 2.0, ((1.0, 3.0),))
    assert from_discrete_measure("monotone", spec)(1.0) == pytest.approx(0.5 + 2.0 + 1.5)
    dec = from_discrete_measure("decreasing", DiscreteMeasureSpec(0.5, 0.0, ((1.0, 3.0),)))
    assert dec(1.0) == pytest.approx(0.5 + 3.0)


def test_measure_validation():
    with pytest.raises(SpecError):
        DiscreteMeasureSpec(0.0, 0.0, ((-1.0, 1.0),))
    with pytest.raises(SpecError):
        DiscreteMeasureSpec(-1.0)
    with pytest.raises(SpecError):
        from_discrete_measure("decreasing", DiscreteMeasureSpec(0.0, 1.0, ()))
    with pytest.raises(SpecError):
        from_discrete_measure("sideways", DiscreteMeasureSpec())


@pytest.mark.parametrize("f", theorem_catalog() + [
    Sqrt(), Reciprocal(), NegLog1p(), Constant(2.0),
    from_discrete_measure("monotone", DiscreteMeasureSpec(0.1, 0.2, ((1.0, 1.0), (5.0, 0.5)))),
    CompositeH(LambertW()), transpose_function(Power(0.3)), Companion(Sqrt()),
])
def test_spec_round_trip(f):
    g = function_from_spec(json.loads(json.dumps(f.to_spec())))
    x = np.linspace(1.5, 9.0, 7)
    assert np.allclose(g(x), f(x), rtol=1e-14)


def test_parse_function_list_handles_json_objects():
    fns = parse_function_list('power:0.5,{"kind":"measure","monotone":false,"atoms":[[1,2],[3,4]]},lambert_w')
    assert [f.kind for f in fns] == ["power", "decreasing_measure", "lambert_w"]


@pytest.mark.parametrize("bad", ["nope", "power:abc", "power", '{"kind":"power"}', "{bad json"])
def test_parse_rejects_bad_specs(bad):
    with pytest.raises(SpecError):
        function_from_spec(bad)


def test_scalar_and_array_returns():
    assert isinstance(Sqrt()(4.0), float)
    assert Sqrt()(np.array([1.0, 4.0])).tolist() == [1.0, 2.0]
