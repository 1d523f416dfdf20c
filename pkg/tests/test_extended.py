import math

import numpy as np
import pytest
from scipy.integrate import RK45

from canardpwl.build import make_model
from canardpwl.errors import DomainError
from canardpwl.extended import LD, _A, _B, _C, _E, core_F, core_rhs, solve_ld


def test_tableau_matches_scipy():
    for row_ld, row in zip(_A, RK45.A):
        assert [float(v) for v in row_ld] == list(row)
    assert [float(v) for v in _B] == list(RK45.B)
    assert [float(v) for v in _C] == list(RK45.C)
    assert [float(v) for v in _E] == list(RK45.E)


def test_tableau_order_conditions_in_long_double():
    tol = 8 * np.finfo(LD).eps
    assert abs(sum(_B) - 1) < tol
    for i, row in enumerate(_A):
        assert abs(sum(row) - _C[i]) < tol
    assert abs(sum(b * c for b, c in zip(_B, _C)) - LD(1) / 2) < tol
    assert abs(sum(b * c**4 for b, c in zip(_B, _C)) - LD(1) / 5) < tol
    assert abs(sum(_E)) < tol


def test_exponential_growth():
    sol = solve_ld(lambda t, u: [u[0]], (0.0, 1.0), [1.0], 1e-16, 1e-18)
    assert sol.success
    assert abs(float(sol.y[-1][0]) - math.e) < 2e-15


def test_event_location_on_oscillator():
    def crossing(t, u):
        return u[0]

    crossing.terminal, crossing.direction = True, -1
    sol = solve_ld(lambda t, u: [u[1], -u[0]], (0.0, 10.0), [1.0, 0.0], 1e-15, 1e-17, [crossing])
    assert sol.status == 1
    assert float(sol.t_events[0][0]) == pytest.approx(math.pi / 2, abs=1e-13)


def test_bound_raises():
    with pytest.raises(DomainError):
        solve_ld(lambda t, u: [LD(1)], (0.0, 5.0), [0.0], 1e-12, 1e-14, bound=1.0)


@pytest.mark.parametrize("kind,seeds,param", [("hopf", (0.3,), 0.0), ("jump", (0.75, 0.85), 1e-3)])
def test_core_F_matches_model(kind, seeds, param):
    m = make_model(kind, seeds)
    if kind == "jump":
        m = m.with_b(param)
    F = core_F(m, param)
    for x in np.linspace(-0.95, 0.95, 41):
        assert float(F(LD(x))) == pytest.approx(m.F(x), abs=1e-14)
        assert float(F(LD(x), 1)) == pytest.approx(m.F(x, 1), abs=1e-13)


def test_core_rhs_layout():
    m = make_model("hopf", (0.3,))
    rhs = core_rhs(m, 0.1, 0.2)
    dx, dy, dw = rhs(0.0, [LD(0.1), LD(0.5), LD(0)])
    assert float(dx) == pytest.approx(0.5 - m.F(0.1))
    assert float(dy) == pytest.approx(0.01 * (0.2 - 0.1))
    assert float(dw) == pytest.approx(-m.F(0.1, 1))
