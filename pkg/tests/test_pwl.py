import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from canardpwl.build import make_model, model_transition
from canardpwl.errors import (
    ContactPointError,
    InvalidParameterError,
    NotOnCriticalCurveError,
    UnsupportedFormError,
)
from canardpwl.pwl import (
    AffinePlanarField,
    ContactType,
    LienardSystem,
    PwlSystem,
    classify_contact_point,
    is_jump_connection,
    lienard_from_pwl,
    linear_drift,
    regularize,
    rescale,
    slow_vector_field,
)
from canardpwl.transition import monotone_transition

coef = st.floats(-5, 5, allow_nan=False)
field6 = st.builds(AffinePlanarField, coef, coef, coef, coef, coef, coef)


@pytest.fixture(scope="module")
def hopf():
    m = make_model("hopf", (0.3,), 1e-2)
    return m, model_transition(m)


@pytest.fixture(scope="module")
def jump():
    m = make_model("jump", (0.75, 0.85))
    return m, model_transition(m)


def poly_F(F0, F1, F2):
    def F(x, nu=0):
        return (F0, F1, F2)[nu](x)

    return F


def test_affine_field_rejects_nonfinite():
    with pytest.raises(InvalidParameterError):
        AffinePlanarField(a0=math.inf)


def test_pwl_dict_roundtrip():
    pwl = PwlSystem.centers(3, 1, 0.2)
    assert PwlSystem.from_dict(pwl.as_dict()) == pwl


def test_regularize_rejects_nonpositive_eps():
    pwl = PwlSystem.centers()
    with pytest.raises(InvalidParameterError):
        regularize(pwl, monotone_transition(), 0.0)


@settings(max_examples=60, deadline=None)
@given(field6, field6, st.floats(1e-3, 0.5), st.floats(1.0, 4.0), st.floats(-3, 3))
def test_regularization_is_exact_outside_stripe(X, Y, eps, k, y):
    pwl = PwlSystem(X, Y)
    Z = regularize(pwl, monotone_transition(), eps)
    x = k * eps
    assert Z(x, y) == pwl.X(x, y)
    assert Z(-x, y) == pwl.Y(-x, y)


@settings(max_examples=30, deadline=None)
@given(field6, st.floats(1e-3, 0.5), st.floats(-2, 2), st.floats(-2, 2))
def test_equal_fields_regularize_to_themselves(X, eps, x, y):
    Z = regularize(PwlSystem(X, X), monotone_transition(), eps)
    assert Z(x, y) == pytest.approx(X(x, y), abs=1e-12)


def test_rescaled_hopf_template(hopf):
    m, phi = hopf
    eps, a = 0.05, 0.3
    sf = rescale(model_pwl_alpha(eps * a), phi, eps)
    for x in np.linspace(-0.9, 0.9, 13):
        for y in (-0.4, 0.0, 1.1):
            assert sf.f(x, y) == pytest.approx(y - (phi(x) + 2.0), abs=1e-13)
            if abs(x) < phi.rho:
                assert phi(x) == pytest.approx(m.psi(x), abs=1e-14)
            assert eps * sf.g(x, y) == pytest.approx(eps**2 * (a - x), abs=1e-15)


def model_pwl_alpha(alpha):
    return PwlSystem.centers(3.0, 1.0, alpha)


def test_rescaled_jump_template(jump):
    m, phi = jump
    eps = 0.05
    sf = rescale(PwlSystem.centers(3.0, 1.0), phi, eps)
    for x in np.linspace(-0.9, 0.9, 13):
        assert sf.f(x, 0.3) == pytest.approx(0.3 - m.F(x), abs=1e-13)
        assert eps * sf.g(x, 0.3) == pytest.approx(-(eps**2) * x, abs=1e-15)


def test_fx_vanishes_where_phi_is_critical(hopf):
    m, phi = hopf
    sf = rescale(PwlSystem.centers(), phi, 0.0)
    d = sf.partials(0.0, 2.0 + phi(0.0))
    assert abs(phi(0.0, 1)) < 1e-12
    assert abs(d["fx"]) < 1e-12


def test_lienard_hopf_matches_psi(hopf):
    m, phi = hopf
    ls = lienard_from_pwl(PwlSystem.centers(3.0, 1.0), phi)
    xs = np.linspace(-0.3, 0.3, 7)
    assert np.allclose([ls.F(x) for x in xs], m.psi(xs) + 2.0, atol=1e-14)
    assert ls.drift(0.4) == pytest.approx(-0.4)


def test_lienard_general_centres():
    m = make_model("hopf", (0.3,), 1e-2, c_plus=5.0, c_minus=2.0)
    phi = model_transition(m)
    ls = lienard_from_pwl(PwlSystem.centers(5.0, 2.0), phi)
    C_plus, C_minus = 3.5, 1.5
    for x in (-0.2, 0.0, 0.25):
        assert (ls.F(x) - C_plus) / C_minus == pytest.approx(m.psi(x), abs=1e-13)


def test_equal_constants_give_constant_F(hopf):
    _, phi = hopf
    ls = lienard_from_pwl(PwlSystem.centers(2.0, 2.0), phi)
    assert {ls.F(x) for x in np.linspace(-1, 1, 11)} == {2.0}
    assert all(ls.F(x, 1) == 0.0 for x in np.linspace(-1, 1, 11))


def test_lienard_rejects_other_forms(hopf):
    _, phi = hopf
    bad = PwlSystem(AffinePlanarField(-3, 0, 2, 0, -1, 0), AffinePlanarField(-1, 0, 1, 0, -1, 0))
    with pytest.raises(UnsupportedFormError):
        lienard_from_pwl(bad, phi)
    bad = PwlSystem(AffinePlanarField(-3, 0, 1, 0.1, -1, 0), AffinePlanarField(-1, 0, 1, 0.2, -1, 0))
    with pytest.raises(UnsupportedFormError):
        lienard_from_pwl(bad, phi, 0.1)


@settings(max_examples=40, deadline=None)
@given(
    st.floats(-4, 4), st.floats(-2, 2), st.floats(-2, 2),
    st.floats(-4, 4), st.floats(-2, 2), st.floats(-2, 2),
    st.floats(-1.2, 1.2), st.floats(-2, 2), st.floats(0.01, 0.2),
)
def test_lienard_reduction_commutes(a1, b1, b2, al1, be1, be2, x, y, eps):
    phi = monotone_transition()
    pwl = PwlSystem(AffinePlanarField(a1, b1, 1, 0, b2, 0), AffinePlanarField(al1, be1, 1, 0, be2, 0))
    sf = rescale(pwl, phi, eps)
    ls = lienard_from_pwl(pwl, phi, eps)
    assert sf.f(x, y) == pytest.approx(ls.f(x, y), abs=1e-13)
    assert sf.g(x, y) == pytest.approx(eps * ls.g(x, y), abs=1e-13)


def test_classify_hopf_point(hopf):
    m, phi = hopf
    ls = lienard_from_pwl(PwlSystem.centers(), phi, 0.05)
    c = classify_contact_point(ls, 0.0, 2.0 + phi(0.0))
    assert c.kind is ContactType.SLOW_FAST_HOPF
    assert abs(phi(0.0, 1)) < 1e-9


def test_classify_jump_points(jump):
    m, phi = jump
    ls = lienard_from_pwl(PwlSystem.centers(), phi, 0.05)
    for x in (-0.5, 0.5):
        assert classify_contact_point(ls, x, ls.F(x)).kind is ContactType.GENERIC_JUMP


def test_classify_normally_hyperbolic():
    F = poly_F(lambda x: x * x / 2, lambda x: x, lambda x: 1.0)
    ls = LienardSystem(F)
    c = classify_contact_point(ls, 0.3, 0.045)
    assert c.kind is ContactType.NORMALLY_HYPERBOLIC
    assert c.stability == "attracting"
    assert classify_contact_point(ls, -0.3, 0.045).stability == "repelling"


def test_classify_degenerate_and_off_curve():
    F = poly_F(lambda x: x**4, lambda x: 4 * x**3, lambda x: 12 * x * x)
    ls = LienardSystem(F)
    assert classify_contact_point(ls, 0.0, 0.0).kind is ContactType.DEGENERATE
    with pytest.raises(NotOnCriticalCurveError):
        classify_contact_point(ls, 0.0, 0.1)


def test_no_hopf_points_at_first_order_drift(jump):
    # with y' = eps * g the drift derivative carries phi', so it vanishes at contact points
    m, phi = jump
    pwl = PwlSystem(AffinePlanarField(-3, 0, 1, 0.2, -1, 0), AffinePlanarField(-1, 0, 1, -0.1, 0.5, 0))
    sf = rescale(pwl, phi, 0.0)
    kinds = {classify_contact_point(sf, x, 2.0 + phi(x)).kind for x in np.linspace(-0.99, 0.99, 199)}
    kinds |= {classify_contact_point(sf, c, 2.0 + phi(c)).kind for c in phi.critical_points}
    assert ContactType.SLOW_FAST_HOPF not in kinds
    x_minus, _, x_plus = phi.critical_points
    assert not is_jump_connection(sf, x_minus, x_plus, 2.0 + phi(x_plus))


def test_slow_vector_field_parabola():
    F = poly_F(lambda x: x * x / 2, lambda x: x, lambda x: 1.0)
    assert slow_vector_field(LienardSystem(F), 0.5) == pytest.approx(-1.0)


def test_slow_vector_field_hopf_extension(hopf):
    m, phi = hopf
    ls = lienard_from_pwl(PwlSystem.centers(), phi, 0.05)
    assert slow_vector_field(ls, 0.0, 2.0) == pytest.approx(-1.0, rel=1e-12)
    # continuous through the contact point
    assert slow_vector_field(ls, 1e-4, 2.0) == pytest.approx(-1.0, rel=1e-3)


def test_slow_vector_field_jump_branch(jump):
    m, phi = jump
    ls = lienard_from_pwl(PwlSystem.centers(), phi, 0.05)
    for x in np.linspace(0.55, 0.95, 5):
        assert slow_vector_field(ls, x, 2.0) < 0
    with pytest.raises(ContactPointError):
        slow_vector_field(ls, 0.5, 2.0)


def test_linear_drift():
    d = linear_drift(0.2)
    assert d(0.5) == pytest.approx(-0.3)
    assert d(0.5, 1) == -1.0
