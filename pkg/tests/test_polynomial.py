import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from canardpwl.polynomial import ExactPoly, exact, monomial

roots = st.lists(st.floats(-2, 2, allow_nan=False), min_size=1, max_size=5)


def test_exact_keeps_binary_value():
    assert exact(0.1) != sympy.Rational(1, 10)
    assert float(exact(0.1)) == 0.1


def test_from_roots_vanishes_exactly():
    p = ExactPoly.from_roots([0.3, 0.75, -0.1])
    for r in (0.3, 0.75, -0.1):
        assert p.exact_value(r) == 0
    assert p.degree == 3


def test_integral_from_and_deriv_are_inverse():
    p = ExactPoly.from_roots([0.2, 0.5], lead=3)
    q = p.integral_from(0.4)
    assert q.exact_value(0.4) == 0
    assert (q.deriv().exact - p.exact).is_zero


def test_arithmetic():
    x = monomial(1)
    p = (x + 1) * (x - 1)
    assert p.coefficients == [-1.0, 0.0, 1.0]
    assert (-p)(2.0) == -3.0
    assert (x**3)(0.5) == 0.125
    assert (2 * x - 1)(3.0) == 5.0


@settings(max_examples=50, deadline=None)
@given(roots, st.floats(-2, 2))
def test_scalar_and_vector_evaluation_agree(rs, x):
    p = ExactPoly.from_roots(rs)
    for nu in range(3):
        assert p(x, nu) == pytest.approx(float(p(np.array([x]), nu)[0]), rel=1e-12, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(roots, st.floats(-2, 2))
def test_float_evaluation_matches_exact(rs, x):
    p = ExactPoly.from_roots(rs)
    assert p(x) == pytest.approx(float(p.exact_value(x)), abs=1e-12)
