import math

import numpy as np
import pytest

from canardpwl.build import make_model, regularized_system
from canardpwl.cycles import (
    CycleProblem,
    IntegratorConfig,
    alternates,
    cycle_orbit,
    displacement,
    find_fixed_points,
    hausdorff_proxy,
    integrate,
    match_predictions,
    poincare_map,
    sweep_breaking,
)
from canardpwl.errors import InvalidParameterError, NoReturnError, StiffnessError
from canardpwl.lienard import sdi_profile
from canardpwl.pwl import LienardSystem, PwlSystem, regularize
from canardpwl.transition import monotone_transition

FAST = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13, event_tol=1e-13)


@pytest.fixture(scope="module")
def hopf():
    return make_model("hopf", (0.3,), 1e-2)


def test_integrator_config_validation():
    with pytest.raises(InvalidParameterError):
        IntegratorConfig(method="Euler")
    with pytest.raises(InvalidParameterError):
        IntegratorConfig(rel_tol=0.0)
    with pytest.raises(InvalidParameterError):
        IntegratorConfig(abs_tol=1e-12, event_tol=1e-10)
    assert IntegratorConfig(extended_precision=True).precision < IntegratorConfig().precision


def test_linear_centre_conserves_radius():
    # X = Y = (y, -x): the regularization is the harmonic oscillator exactly
    pwl = PwlSystem.centers(0.0, 0.0)
    Z = regularize(pwl, monotone_transition(), 0.1)
    sol = integrate(Z, [0.5, 0.0], 2 * math.pi, FAST)
    r = np.hypot(sol.y[0], sol.y[1])
    assert np.max(np.abs(r - 0.5)) < 1e-10
    assert sol.y[0, -1] == pytest.approx(0.5, abs=1e-10)


def test_eps_zero_freezes_y():
    F = lambda x, nu=0: (x * x / 2, x, 1.0)[nu]
    ls = LienardSystem(F, eps=0.0)
    sol = integrate(ls, [1.0, 0.1], 80.0, FAST)
    assert np.all(sol.y[1] == 0.1)
    assert sol.y[0, -1] == pytest.approx(math.sqrt(0.2), abs=1e-8)


def test_orbit_tracks_attracting_slow_branch():
    F = lambda x, nu=0: (x * x / 2, x, 1.0)[nu]
    eps = 0.05
    ls = LienardSystem(F, eps=eps)
    sol = integrate(ls, [0.8, 0.32], 40.0, FAST)
    # after the fast transient the orbit sits within O(eps^2) of y = F(x)
    tail = sol.y[:, sol.t > 10.0]
    assert np.max(np.abs(tail[1] - F(tail[0]))) < 5 * eps**2


def test_stiffness_error_on_blow_up():
    class Blowup:
        def rhs(self, t, u):
            return [u[0] ** 2, 0.0]

    with pytest.raises(StiffnessError):
        integrate(Blowup(), [1.0, 0.0], 2.0, FAST)


def test_no_return_error(hopf):
    system = regularized_system(hopf, 0.05)
    cfg = IntegratorConfig(t_max=1.0)
    with pytest.raises(NoReturnError):
        displacement(system, 0.05, cfg)


def test_poincare_map_multiplier(hopf):
    system = regularized_system(hopf, 0.3, param=0.0)
    s = poincare_map(system, 0.06, FAST, fd_step=1e-6)
    assert s.y1 > 0 and s.flight_time > 0
    assert s.multiplier == pytest.approx(s.multiplier_fd, rel=1e-4)
    with pytest.raises(InvalidParameterError):
        poincare_map(system, -1.0, FAST)


def test_displacement_is_antisymmetric_in_breaking(hopf):
    # a > 0 moves the equilibrium right and the flow expands; a < 0 contracts
    pr = CycleProblem(hopf, 0.3)
    y = pr.y_window()
    up = displacement(pr.system(2e-2), y, FAST)
    down = displacement(pr.system(-2e-2), y, FAST)
    assert up.resolved and down.resolved
    assert (up.value > 0) != (down.value > 0)


def test_cycle_problem_grid(hopf):
    pr = CycleProblem(hopf, 0.05)
    assert pr.window_x == pytest.approx(0.36)
    assert pr.param_name == "a"
    grid = pr.y_grid(10)
    assert grid[0] == pytest.approx(hopf.F(0.05)) and grid[-1] == pytest.approx(hopf.F(0.38))
    with pytest.raises(InvalidParameterError):
        CycleProblem(hopf, 0.0)
    with pytest.raises(InvalidParameterError):
        sweep_breaking(pr, (-1e-3, 1e-3), n=5)


def test_hausdorff_proxy():
    line = np.column_stack([np.linspace(0, 1, 11), np.zeros(11)])
    orbit = np.array([[0.5, 0.1], [0.2, -0.05]])
    assert hausdorff_proxy(orbit, line) == pytest.approx(0.1)


@pytest.mark.slow
def test_no_seed_sweep_finds_a_cycle():
    m = make_model("hopf", (), 1e-2)
    pr = CycleProblem(m, 0.1)
    rep = sweep_breaking(pr, (-5e-3, 5e-3), 20, FAST, n_y=60, n_coarse=4)
    assert rep.count >= 1
    assert any(p.closed or p.residual < 1e-10 for p in rep.fixed_points)
    assert rep.as_dict()["breaking"]["name"] == "a"


@pytest.mark.slow
def test_cycles_approach_canard_cycles_as_eps_shrinks(hopf):
    prof = sdi_profile(hopf)
    gaps, dists = [], []
    for eps in (0.1, 0.07, 0.05):
        pr = CycleProblem(hopf, eps)
        rep = sweep_breaking(pr, (-5e-3, 5e-3), 20, n_y=120, n_coarse=4)
        assert rep.count >= 2 and all(q.closed for q in rep.fixed_points)
        assert alternates(rep.fixed_points)
        table = match_predictions(rep, prof, pr)
        inner = min(table.rows, key=lambda r: r.x_pred)
        gaps.append(inner.rel_gap)
        dists.append(inner.hausdorff)
    # the multipliers separate from 1 as eps shrinks
    assert rep.hyperbolic_count >= 2
    assert gaps[0] > gaps[1] > gaps[2]
    assert dists[0] > dists[2]


@pytest.mark.slow
def test_orbit_closes(hopf):
    pr = CycleProblem(hopf, 0.1)
    rep = sweep_breaking(pr, (-5e-3, 5e-3), 20, n_y=60, n_coarse=4)
    p = max(rep.fixed_points, key=lambda q: q.y)
    orbit = cycle_orbit(pr.system(rep.param), p.y, IntegratorConfig())
    assert np.linalg.norm(orbit[0] - orbit[-1]) < 1e-8
    assert np.max(np.abs(orbit[:, 0])) < 1.0


def test_symmetric_return_map_is_monotone():
    m = make_model("hopf", (0.3,), 0.0)
    system = regularized_system(m, 0.2, param=0.0)
    ys = np.linspace(0.01, 0.06, 6)
    images = [poincare_map(system, y, FAST).y1 for y in ys]
    assert np.all(np.diff(images) > 0)
    # delta = 0, a = 0 is reversible: every orbit closes
    assert np.allclose(images, ys, rtol=1e-8)
