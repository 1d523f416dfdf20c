import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from canardpwl.build import make_model, model_transition
from canardpwl.errors import InvalidParameterError
from canardpwl.transition import (
    auto_rho,
    eval_phi,
    eval_phi_d1,
    eval_phi_d2,
    make_cutoffs,
    monotone_transition,
    smoothstep,
    validate_transition,
)


@pytest.fixture(scope="module")
def hopf_phi():
    return model_transition(make_model("hopf", (0.3,), 1e-2))


@pytest.fixture(scope="module")
def jump_phi():
    return model_transition(make_model("jump", (0.75, 0.85)))


def test_smoothstep_limits():
    assert smoothstep(0.0) == 0.0 and smoothstep(1.0) == 1.0
    assert smoothstep(0.5) == pytest.approx(0.5)
    assert smoothstep(1e-4) == 0.0  # exp(-1e4) underflows
    assert smoothstep(np.array([-1.0, 0.5, 2.0])).tolist() == pytest.approx([0.0, 0.5, 1.0])


@settings(max_examples=50, deadline=None)
@given(st.floats(0.02, 0.98))
def test_smoothstep_derivatives(t):
    h = 1e-6
    fd1 = (smoothstep(t + h) - smoothstep(t - h)) / (2 * h)
    fd2 = (smoothstep(t + h, 1) - smoothstep(t - h, 1)) / (2 * h)
    assert smoothstep(t, 1) == pytest.approx(fd1, rel=1e-5, abs=1e-8)
    assert smoothstep(t, 2) == pytest.approx(fd2, rel=1e-4, abs=1e-6)
    assert smoothstep(t) + smoothstep(1 - t) == pytest.approx(1.0)
    arr = smoothstep(np.array([t]), 2)[0]
    assert arr == pytest.approx(smoothstep(t, 2), rel=1e-12, abs=1e-14)


def test_cutoffs_validate_rho():
    for bad in (0.0, 1.0, -0.2):
        with pytest.raises(InvalidParameterError):
            make_cutoffs(bad)
    c = make_cutoffs(0.4)
    assert c.A(0.3) == 0.0 and c.A(1.2) == 1.0
    assert c.B(-0.3) == 0.0 and c.B(-1.2) == 1.0
    assert c.B(-0.7, 1) == pytest.approx(-c.A(0.7, 1))


def test_auto_rho():
    assert auto_rho([0.5, -0.6]) == pytest.approx(0.65)
    assert auto_rho([0.99]) == 0.95


def test_hopf_transition(hopf_phi):
    rep = validate_transition(hopf_phi)
    assert rep.ok, rep.failures
    assert rep.n_critical == 1
    assert rep.critical_points[0] == pytest.approx(0.0, abs=1e-12)
    assert rep.max_jump < 1e-8
    assert not rep.monotonic


def test_jump_transition(jump_phi):
    rep = validate_transition(jump_phi)
    assert rep.ok, rep.failures
    assert rep.n_critical == 3
    assert all(rep.morse)
    lo, mid, hi = rep.critical_points
    assert mid == pytest.approx(0.0, abs=1e-12)
    assert lo == pytest.approx(-0.5, abs=1e-3) and hi == pytest.approx(0.5, abs=1e-3)
    assert rep.as_dict()["failures"] == []


def test_monotone_transition_is_monotone():
    rep = validate_transition(monotone_transition())
    assert rep.ok and rep.monotonic and rep.n_critical == 0


@pytest.mark.parametrize("x", [-3.0, -1.0, 1.0, 2.5])
def test_constant_outside(hopf_phi, jump_phi, x):
    for phi in (hopf_phi, jump_phi):
        assert eval_phi(phi, x) == np.sign(x)
        assert eval_phi_d1(phi, x) == 0.0 and eval_phi_d2(phi, x) == 0.0


@settings(max_examples=60, deadline=None)
@given(st.floats(-0.999, 0.999))
def test_scalar_vector_and_derivatives(jump_phi, x):
    phi = jump_phi
    for nu in range(3):
        assert phi(x, nu) == pytest.approx(phi(np.array([x]), nu)[0], rel=1e-12, abs=1e-12)
    h = 1e-6
    if min(abs(abs(x) - 1.0), abs(abs(x) - phi.rho)) > 2 * h:
        assert phi(x, 1) == pytest.approx((phi(x + h) - phi(x - h)) / (2 * h), rel=1e-5, abs=1e-6)
