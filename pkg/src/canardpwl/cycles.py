"""Limit cycles of the regularized Lienard systems via return maps.

Orbits are started on the upper section ``{x = 0, y > F(0)}``.  Canard
cycles pass exponentially close to repelling slow arcs, so a forward return
map loses all significant digits on the way.  Fixed points are therefore
located by split shooting: the orbit through ``(0, y0)`` is followed forward
and backward in time to the lower crossing of ``x = 0``, and the gap between
the two landing heights (the displacement) vanishes exactly on periodic
orbits.  Both halves run along attracting directions of their own time
direction, so the displacement is well conditioned.  Multipliers come from
the divergence integral along the closed orbit (Liouville's formula).
"""

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq
from scipy.spatial.distance import directed_hausdorff

from . import extended
from .build import breaking_name, regularized_system, transition_rho, window_edge
from .errors import InvalidParameterError, NoReturnError, StiffnessError
from .lienard.analysis import canard_cycle

__all__ = [
    "IntegratorConfig",
    "ReturnMapSample",
    "Displacement",
    "FixedPoint",
    "SweepRow",
    "CycleReport",
    "MatchRow",
    "MatchTable",
    "CycleProblem",
    "integrate",
    "poincare_map",
    "displacement",
    "find_fixed_points",
    "cycle_orbit",
    "sweep_breaking",
    "match_predictions",
    "hausdorff_proxy",
    "alternates",
]

METHODS = ("DOP853", "RK45", "Radau", "BDF", "LSODA")
HYPERBOLIC_MARGIN = 1e-3
NOISE_FACTOR = 64.0


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "DOP853"
    rel_tol: float = 1e-13
    abs_tol: float = 1e-16
    event_tol: float = 1e-16
    max_step: float = math.inf
    t_max: float = 2e4
    extended_precision: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidParameterError(f"method must be one of {METHODS}, got {self.method!r}")
        for name in ("rel_tol", "abs_tol", "event_tol", "max_step", "t_max"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(f"{name} must be positive")
        if self.event_tol > self.abs_tol:
            raise InvalidParameterError("event_tol must not exceed abs_tol")

    @property
    def precision(self):
        return float(np.finfo(np.longdouble).eps) if self.extended_precision else float(np.finfo(float).eps)


def integrate(system, state0, t_max, cfg, events=None, dense=True):
    """Integrate ``system`` from ``state0`` over ``[0, t_max]`` (negative ``t_max``
    integrates backward).  A three-component state carries the divergence
    integral along."""
    fun = system.augmented if len(state0) == 3 else system.rhs
    sol = solve_ivp(
        fun,
        (0.0, t_max),
        list(state0),
        method=cfg.method,
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
        events=events,
        dense_output=dense,
    )
    if sol.status == -1:
        raise StiffnessError(f"{cfg.method} failed: {sol.message}; try an implicit method (Radau, BDF)")
    return sol


def _section_event(direction):
    def crossing(t, u):
        return u[0]

    crossing.terminal = True
    crossing.direction = direction
    return crossing


@dataclass
class _Half:
    y: float
    w: float
    t: float
    max_abs_x: float
    sol: object = field(default=None, repr=False)


def _half_orbit(system, state, sign, direction, cfg, ld_rhs=None, dense=False):
    """Follow the orbit through ``state`` to the next crossing of ``x = 0``."""
    event = _section_event(direction)
    if ld_rhs is not None:
        sol = extended.solve_ld(
            ld_rhs, (0.0, sign * cfg.t_max), state, cfg.rel_tol, cfg.abs_tol, [event], cfg.max_step, bound=1.0
        )
        if sol.status == -1:
            raise StiffnessError(f"extended-precision integration failed: {sol.message}")
        if not sol.t_events[0]:
            raise NoReturnError(f"no return to x = 0 within |t| <= {cfg.t_max}")
        end = sol.y_events[0][0]
        xs = np.array([float(u[0]) for u in sol.y])
        return _Half(end[1], end[2], sol.t_events[0][0], float(np.max(np.abs(xs))), None)
    sol = integrate(system, state, sign * cfg.t_max, cfg, events=[event], dense=dense)
    if not sol.t_events[0].size:
        raise NoReturnError(f"no return to x = 0 within |t| <= {cfg.t_max}")
    end = sol.y_events[0][0]
    return _Half(end[1], end[2], sol.t_events[0][0], float(np.max(np.abs(sol.y[0]))), sol)


@dataclass(frozen=True)
class ReturnMapSample:
    y0: float
    y1: float
    multiplier: float
    flight_time: float
    multiplier_fd: float = None


def poincare_map(system, y0, cfg, fd_step=None):
    """Forward return to ``{x = 0, x' > 0}``.

    ``multiplier`` is ``P'(y0)`` from the divergence integral; with
    ``fd_step`` a central-difference estimate is added.  Near canard cycles
    the forward map is ill conditioned; use :func:`displacement` there.
    """
    if not y0 > system.F(0.0):
        raise InvalidParameterError("y0 must lie above F(0) on the section")
    down = _half_orbit(system, [0.0, y0, 0.0], 1.0, -1, cfg)
    up = _half_orbit(system, [0.0, down.y, down.w], 1.0, 1, cfg)
    y1, t = float(up.y), float(down.t + up.t)
    mult = math.exp(up.w) * (y0 - system.F(0.0)) / (y1 - system.F(0.0))
    fd = None
    if fd_step is not None:
        hi = poincare_map(system, y0 + fd_step, cfg).y1
        lo = poincare_map(system, y0 - fd_step, cfg).y1
        fd = (hi - lo) / (2 * fd_step)
    return ReturnMapSample(float(y0), y1, mult, t, fd)


@dataclass(frozen=True)
class Displacement:
    y0: float
    value: float
    y_forward: float
    y_backward: float
    log_multiplier: float
    period: float
    noise: float
    max_abs_x: float

    @property
    def multiplier(self):
        return math.exp(self.log_multiplier)

    @property
    def resolved(self):
        return abs(self.value) > self.noise


def displacement(system, y0, cfg, ld_rhs=None):
    """Gap between the forward and backward landings on ``{x = 0, x' < 0}``."""
    fwd = _half_orbit(system, [0.0, y0, 0.0], 1.0, -1, cfg, ld_rhs)
    bwd = _half_orbit(system, [0.0, y0, 0.0], -1.0, 1, cfg, ld_rhs)
    value = float(fwd.y - bwd.y)
    noise = NOISE_FACTOR * cfg.precision * max(abs(float(fwd.y)), abs(float(bwd.y)))
    return Displacement(
        float(y0),
        value,
        float(fwd.y),
        float(bwd.y),
        float(fwd.w - bwd.w),
        float(fwd.t - bwd.t),
        noise,
        max(fwd.max_abs_x, bwd.max_abs_x),
    )


@dataclass(frozen=True)
class FixedPoint:
    y: float
    multiplier: float
    hyperbolic: bool
    residual: float
    period: float
    max_abs_x: float
    closed: bool

    @property
    def stable(self):
        return self.multiplier < 1.0

    @property
    def in_stripe(self):
        return self.max_abs_x < 1.0


def _sign_brackets(samples):
    out = []
    for d0, d1 in zip(samples, samples[1:]):
        if d0.resolved and d1.resolved and (d0.value > 0) != (d1.value > 0):
            out.append((d0, d1))
    return out


def find_fixed_points(system, y_grid, cfg, ld_rhs=None, margin=HYPERBOLIC_MARGIN):
    """Periodic orbits crossing the section at heights inside ``y_grid``."""
    samples = [displacement(system, y, cfg, ld_rhs) for y in y_grid]
    return _refine(system, samples, cfg, ld_rhs, margin), samples


def _refine(system, samples, cfg, ld_rhs, margin):
    points = []
    for d0, d1 in _sign_brackets(samples):
        cache = {}

        def gap(y):
            cache[y] = displacement(system, y, cfg, ld_rhs)
            return cache[y].value

        y = brentq(gap, d0.y0, d1.y0, xtol=cfg.event_tol, rtol=4 * np.finfo(float).eps)
        d = cache.get(y) or displacement(system, y, cfg, ld_rhs)
        points.append(
            FixedPoint(
                y=float(y),
                multiplier=d.multiplier,
                hyperbolic=abs(d.multiplier - 1.0) >= margin,
                residual=abs(d.value),
                period=d.period,
                max_abs_x=d.max_abs_x,
                closed=abs(d.value) <= 10 * cfg.event_tol,
            )
        )
    return points


def cycle_orbit(system, y, cfg, n=2000):
    """Sampled periodic orbit through ``(0, y)`` assembled from both halves."""
    fwd = _half_orbit(system, [0.0, y, 0.0], 1.0, -1, cfg, dense=True)
    bwd = _half_orbit(system, [0.0, y, 0.0], -1.0, 1, cfg, dense=True)
    tf = np.linspace(0.0, fwd.t, n // 2)
    tb = np.linspace(bwd.t, 0.0, n // 2)
    top = fwd.sol.sol(tf)[:2].T
    bottom = bwd.sol.sol(tb)[:2].T
    return np.vstack([top, bottom])


def alternates(points):
    """Consecutive cycles (by height) alternate between stable and unstable."""
    stab = [p.stable for p in sorted(points, key=lambda p: p.y)]
    return all(a != b for a, b in zip(stab, stab[1:]))


@dataclass
class CycleProblem:
    """A model at fixed ``eps`` with its sweep window.

    ``window_x`` is the right endpoint of the outermost canard cycle; the
    breaking parameter is tuned so that this cycle persists.  ``y_max`` of
    the scan sits ``scan_margin`` further out.
    """

    model: object
    eps: float
    rho: float = None
    window_x: float = None
    x_min: float = None
    scan_margin: float = 0.02

    def __post_init__(self):
        if not self.eps > 0:
            raise InvalidParameterError("eps must be positive")
        if self.window_x is None:
            self.window_x = window_edge(self.model)
        if self.rho is None:
            self.rho = transition_rho(self.model, self.window_x)
        if self.x_min is None:
            self.x_min = 0.05 if self.model.kind == "hopf" else self.model.D1[0]

    @property
    def param_name(self):
        return breaking_name(self.model)

    def system(self, param):
        return regularized_system(self.model, self.eps, param, self.rho)

    def ld_rhs(self, param):
        return extended.core_rhs(self.model, self.eps, param)

    def height(self, x):
        return self.model.F(x)

    def y_window(self):
        return self.height(self.window_x)

    def y_grid(self, n):
        lo = self.height(self.x_min)
        hi = self.height(self.window_x + self.scan_margin)
        return np.geomspace(lo, hi, n)


@dataclass(frozen=True)
class SweepRow:
    param: float
    count: int
    window_gap: float


@dataclass
class CycleReport:
    kind: str
    eps: float
    param_name: str
    param: float
    fixed_points: list
    window_x: float
    sweep: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    @property
    def count(self):
        return len(self.fixed_points)

    @property
    def hyperbolic_count(self):
        return sum(p.hyperbolic for p in self.fixed_points)

    def as_dict(self):
        return {
            "kind": self.kind,
            "eps": self.eps,
            "breaking": {"name": self.param_name, "value": self.param},
            "window_x": self.window_x,
            "fixed_points": [
                dict(asdict(p), stable=p.stable, in_stripe=p.in_stripe) for p in self.fixed_points
            ],
            "sweep": [asdict(r) for r in self.sweep],
            "integrator": self.config,
        }


def _count(samples):
    return len(_sign_brackets(samples))


def sweep_breaking(problem, param_range, n=41, cfg=None, n_y=400, n_coarse=16):
    """Sweep the breaking parameter and return the best :class:`CycleReport`.

    Each grid value gets a coarse fixed-point count.  Where the displacement
    at the window height changes sign between neighbours the parameter is
    refined by Brent's method until the outermost canard cycle sits exactly
    at the window height; candidates are then recounted on the full
    ``n_y``-point grid and the largest count wins (ties go to the value
    closest to zero).
    """
    cfg = IntegratorConfig() if cfg is None else cfg
    if n < 20:
        raise InvalidParameterError("a sweep needs at least 20 parameter values")
    lo, hi = map(float, param_range)
    y_w = problem.y_window()
    coarse = problem.y_grid(n_coarse)
    ld = cfg.extended_precision

    def window_gap(p):
        return displacement(problem.system(p), y_w, cfg, problem.ld_rhs(p) if ld else None)

    rows = []
    for p in np.linspace(lo, hi, n):
        system = problem.system(p)
        ld_rhs = problem.ld_rhs(p) if ld else None
        samples = [displacement(system, y, cfg, ld_rhs) for y in coarse]
        rows.append(SweepRow(float(p), _count(samples), window_gap(p).value))

    refined = []
    for r0, r1 in zip(rows, rows[1:]):
        if (r0.window_gap > 0) != (r1.window_gap > 0):
            gap = lambda q: window_gap(q).value
            refined.append(float(brentq(gap, r0.param, r1.param, xtol=1e-22, rtol=4 * np.finfo(float).eps)))
    top = max(rows, key=lambda r: (r.count, -abs(r.param)))

    best = None
    for p in [top.param, *refined]:
        ld_rhs = problem.ld_rhs(p) if ld else None
        points, _ = find_fixed_points(problem.system(p), problem.y_grid(n_y), cfg, ld_rhs)
        if best is None or (len(points), -abs(p)) > (len(best[2]), -abs(best[1])):
            best = (len(points), p, points)

    _, p, points = best
    return CycleReport(
        problem.model.kind,
        problem.eps,
        problem.param_name,
        float(p),
        points,
        problem.window_x,
        rows,
        asdict(cfg),
    )


def hausdorff_proxy(orbit, polyline):
    """Largest distance from orbit samples to the (densified) canard cycle."""
    return float(directed_hausdorff(np.asarray(orbit), np.asarray(polyline))[0])


@dataclass(frozen=True)
class MatchRow:
    y: float
    x_pred: float
    y_pred: float
    rel_gap: float
    hausdorff: float
    in_stripe: bool


@dataclass
class MatchTable:
    rows: list
    n_zeros: int
    unmatched: list = field(default_factory=list)

    @property
    def count_ok(self):
        return len(self.rows) + len(self.unmatched) <= self.n_zeros + 1

    @property
    def max_gap(self):
        return max((r.rel_gap for r in self.rows), default=0.0)

    def as_dict(self):
        return {
            "n_zeros": self.n_zeros,
            "count_ok": self.count_ok,
            "rows": [asdict(r) for r in self.rows],
            "unmatched": list(self.unmatched),
        }


def match_predictions(report, profile, problem, cfg=None, orbit_samples=2000):
    """Match fixed-point heights to canard-cycle heights ``F(x_i)``.

    Predicted abscissas are the simple SDI zeros plus the window edge.
    Pairs are taken greedily by increasing relative gap.
    """
    cfg = IntegratorConfig(**report.config) if cfg is None else cfg
    xs = [z.x for z in profile.zeros if z.simple] + [problem.window_x]
    preds = [(x, problem.height(x)) for x in xs]
    pairs = sorted(
        (abs(fp.y - yp) / abs(yp), i, j)
        for i, fp in enumerate(report.fixed_points)
        for j, (_, yp) in enumerate(preds)
    )
    used_fp, used_pred, rows = set(), set(), []
    system = problem.system(report.param)
    for gap, i, j in pairs:
        if i in used_fp or j in used_pred:
            continue
        used_fp.add(i)
        used_pred.add(j)
        fp = report.fixed_points[i]
        x_pred, y_pred = preds[j]
        orbit = cycle_orbit(system, fp.y, cfg, orbit_samples)
        spec = canard_cycle(problem.model, x_pred)
        dist = hausdorff_proxy(orbit, spec.polyline(4000))
        rows.append(MatchRow(fp.y, x_pred, y_pred, gap, dist, bool(np.max(np.abs(orbit[:, 0])) < 1.0)))
    unmatched = [fp.y for i, fp in enumerate(report.fixed_points) if i not in used_fp]
    rows.sort(key=lambda r: r.y)
    return MatchTable(rows, sum(z.simple for z in profile.zeros), unmatched)
