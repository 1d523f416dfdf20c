"""Smooth non-monotonic transition functions built from polynomial cores.

A transition function equals -1 left of -1 and +1 right of 1.  The ones built
here coincide with a given core ``psi`` on ``[-rho, rho]`` and are blended to
the constants on the collars ``(-1, -rho)`` and ``(rho, 1)`` with C-infinity
cut-off functions, so the core's critical points are the only ones.

Cores are callables ``core(x, nu=0)`` returning the ``nu``-th derivative
(``nu`` in 0, 1, 2) for scalar or array ``x``.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

from ._roots import grid_roots
from .errors import InvalidParameterError, PreconditionFailed

__all__ = [
    "CutoffPair",
    "TransitionSpec",
    "ValidationReport",
    "make_cutoffs",
    "smoothstep",
    "build_hopf_transition",
    "build_jump_transition",
    "monotone_transition",
    "validate_transition",
    "eval_phi",
    "eval_phi_d1",
    "eval_phi_d2",
    "auto_rho",
]


# exp(-1/t) underflows below this, so the step is flat to double precision
_FLAT = 1e-3


def _smoothstep_scalar(t, nu):
    if t <= _FLAT or t >= 1.0 - _FLAT:
        if nu:
            return 0.0
        return 0.0 if t < 0.5 else 1.0
    z = 1.0 / t - 1.0 / (1.0 - t)
    s = expit(-z)
    if nu == 0:
        return float(s)
    w = s * (1.0 - s)
    dz = -1.0 / t**2 - 1.0 / (1.0 - t) ** 2
    if nu == 1:
        return float(-w * dz)
    d2z = 2.0 / t**3 - 2.0 / (1.0 - t) ** 3
    ds = -w * dz
    return float(-ds * (1.0 - 2.0 * s) * dz - w * d2z)


def smoothstep(t, nu=0):
    """C-infinity step ``g(t) / (g(t) + g(1 - t))`` with ``g(t) = exp(-1/t)``.

    Zero for ``t <= 0``, one for ``t >= 1``.  Written as a logistic function
    of ``1/t - 1/(1-t)`` so it never overflows.
    """
    if np.ndim(t) == 0:
        return _smoothstep_scalar(float(t), nu)
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t) if nu else (t >= 0.5).astype(float)
    inner = (t > _FLAT) & (t < 1.0 - _FLAT)
    ti = t[inner]
    z = 1.0 / ti - 1.0 / (1.0 - ti)
    s = expit(-z)
    if nu == 0:
        out[inner] = s
        return out
    w = s * (1.0 - s)
    dz = -1.0 / ti**2 - 1.0 / (1.0 - ti) ** 2
    if nu == 1:
        out[inner] = -w * dz
        return out
    d2z = 2.0 / ti**3 - 2.0 / (1.0 - ti) ** 3
    out[inner] = w * dz * (1.0 - 2.0 * s) * dz - w * d2z
    return out


@dataclass(frozen=True)
class CutoffPair:
    """Cut-offs ``A`` (0 up to rho, 1 from 1 on) and its mirror ``B``."""

    rho: float

    def A(self, x, nu=0):
        scale = 1.0 - self.rho
        return smoothstep((x - self.rho) / scale, nu) / scale**nu

    def B(self, x, nu=0):
        # B(x) = A(-x)
        val = self.A(-np.asarray(x) if np.ndim(x) else -x, nu)
        return -val if nu == 1 else val


def make_cutoffs(rho):
    if not (0.0 < rho < 1.0):
        raise InvalidParameterError(f"rho must lie in (0, 1), got {rho!r}")
    return CutoffPair(float(rho))


@dataclass(frozen=True)
class TransitionSpec:
    """Piecewise transition function: constants, collar blends and a core.

    ``critical_points`` are the zeros of the core's derivative in
    ``(-rho, rho)``; the collar blends add none.
    """

    core: object
    cutoffs: CutoffPair
    critical_points: tuple = ()
    label: str = ""

    @property
    def rho(self):
        return self.cutoffs.rho

    def __call__(self, x, nu=0):
        if np.ndim(x) == 0:
            return self._scalar(float(x), nu)
        return self._vector(np.asarray(x, dtype=float), nu)

    def _scalar(self, x, nu):
        rho = self.cutoffs.rho
        if x <= -1.0 or x >= 1.0:
            return 0.0 if nu else (1.0 if x >= 1.0 else -1.0)
        psi = self.core
        if -rho <= x <= rho:
            return float(psi(x, nu))
        if x > rho:
            c, sgn = self.cutoffs.A, 1.0
        else:
            c, sgn = self.cutoffs.B, -1.0
        # right collar: A + psi(1 - A); left collar: -B + psi(1 - B)
        w = c(x)
        p = psi(x)
        if nu == 0:
            return float(sgn * w + p * (1.0 - w))
        w1 = c(x, 1)
        p1 = psi(x, 1)
        if nu == 1:
            return float(w1 * (sgn - p) + p1 * (1.0 - w))
        w2 = c(x, 2)
        p2 = psi(x, 2)
        return float(w2 * (sgn - p) - 2.0 * w1 * p1 + p2 * (1.0 - w))

    def _vector(self, x, nu):
        rho = self.cutoffs.rho
        out = np.zeros_like(x)
        if nu == 0:
            out[x >= 1.0] = 1.0
            out[x <= -1.0] = -1.0
        core = (x >= -rho) & (x <= rho)
        if core.any():
            out[core] = self.core(x[core], nu)
        for mask, c, sgn in (
            ((x > rho) & (x < 1.0), self.cutoffs.A, 1.0),
            ((x < -rho) & (x > -1.0), self.cutoffs.B, -1.0),
        ):
            if not mask.any():
                continue
            xm = x[mask]
            w, p = c(xm), self.core(xm)
            if nu == 0:
                out[mask] = sgn * w + p * (1.0 - w)
                continue
            w1, p1 = c(xm, 1), self.core(xm, 1)
            if nu == 1:
                out[mask] = w1 * (sgn - p) + p1 * (1.0 - w)
                continue
            w2, p2 = c(xm, 2), self.core(xm, 2)
            out[mask] = w2 * (sgn - p) - 2.0 * w1 * p1 + p2 * (1.0 - w)
        return out


def eval_phi(phi, x):
    return phi(x)


def eval_phi_d1(phi, x):
    return phi(x, 1)


def eval_phi_d2(phi, x):
    return phi(x, 2)


def auto_rho(outer_points, margin=0.05, cap=0.95):
    """Collar start: largest ``|x|`` a canard cycle reaches plus ``margin``."""
    return min(max(abs(float(v)) for v in outer_points) + margin, cap)


def _core_critical_points(core, rho, grid_n):
    return tuple(grid_roots(lambda x: float(core(x, 1)), -rho, rho, grid_n))


def _check_collars(core, rho, grid_n):
    if not core(-1.0) < -1.0:
        raise PreconditionFailed("core(-1) must be < -1", interval=(-1.0, -1.0))
    if not core(1.0) < 1.0:
        raise PreconditionFailed("core(1) must be < 1", interval=(1.0, 1.0))
    n = max(grid_n // 2, 10)
    left = np.linspace(-1.0, -rho, n, endpoint=False)
    right = np.linspace(1.0, rho, n, endpoint=False)
    bad = left[core(left, 1) >= 0.0]
    if bad.size:
        raise PreconditionFailed(
            "core' must be negative on [-1, -rho)", interval=(float(bad.min()), float(bad.max()))
        )
    bad = right[core(right, 1) <= 0.0]
    if bad.size:
        raise PreconditionFailed(
            "core' must be positive on (rho, 1]", interval=(float(bad.min()), float(bad.max()))
        )


def build_hopf_transition(psi, cutoffs, grid_n=10_000):
    """phi_k = A(1-B) - B + psi(1-A)(1-B) for a Hopf-type core."""
    _check_collars(psi, cutoffs.rho, grid_n)
    crit = _core_critical_points(psi, cutoffs.rho, grid_n)
    return TransitionSpec(psi, cutoffs, crit, label="hopf")


def build_jump_transition(psi_b, cutoffs, grid_n=10_000):
    """Same blend as the Hopf case; the core must carry three Morse critical points."""
    _check_collars(psi_b, cutoffs.rho, grid_n)
    crit = _core_critical_points(psi_b, cutoffs.rho, grid_n)
    if len(crit) != 3:
        raise PreconditionFailed(
            f"jump core needs 3 critical points in (-rho, rho), found {len(crit)}",
            interval=(-cutoffs.rho, cutoffs.rho),
        )
    for c in crit:
        if abs(psi_b(c, 2)) < 1e-9:
            raise PreconditionFailed(f"critical point {c:.6g} is not of Morse type", interval=(c, c))
    return TransitionSpec(psi_b, cutoffs, crit, label="jump")


def _ramp(x, nu=0):
    val = smoothstep((np.asarray(x) + 1.0) / 2.0 if np.ndim(x) else (x + 1.0) / 2.0, nu)
    return 2.0 * val - 1.0 if nu == 0 else val * 2.0 / 2.0**nu


def monotone_transition(rho=0.5):
    """Odd monotone smooth step; the classical (monotonic) regularization."""
    return TransitionSpec(_ramp, make_cutoffs(rho), (), label="monotone")


@dataclass
class ValidationReport:
    boundary_ok: bool
    joint_jumps: dict
    critical_points: list
    morse: list
    second_derivatives: list
    monotonic: bool
    failures: list = field(default_factory=list)

    @property
    def n_critical(self):
        return len(self.critical_points)

    @property
    def ok(self):
        return not self.failures

    @property
    def max_jump(self):
        return max(max(v) for v in self.joint_jumps.values())

    def as_dict(self):
        return {
            "boundary_ok": self.boundary_ok,
            "joint_jumps": {k: list(v) for k, v in self.joint_jumps.items()},
            "critical_points": self.critical_points,
            "morse": self.morse,
            "second_derivatives": self.second_derivatives,
            "monotonic": self.monotonic,
            "failures": self.failures,
        }


def _one_sided_jumps(phi, x0, h):
    # second-order Taylor extrapolation of each side onto the joint
    lv = phi(x0 - h) + h * phi(x0 - h, 1) + 0.5 * h * h * phi(x0 - h, 2)
    rv = phi(x0 + h) - h * phi(x0 + h, 1) + 0.5 * h * h * phi(x0 + h, 2)
    ld = phi(x0 - h, 1) + h * phi(x0 - h, 2)
    rd = phi(x0 + h, 1) - h * phi(x0 + h, 2)
    return abs(lv - rv), abs(ld - rd)


def _sign_change_roots(f, xs, fs, rho):
    # phi' underflows to exactly zero on the flat ends of the collars; only
    # exact zeros inside the core count, elsewhere zeros are skipped
    roots = [float(x) for x, v in zip(xs, fs) if v == 0.0 and abs(x) <= rho]
    idx = np.flatnonzero(fs != 0.0)
    for i, j in zip(idx[:-1], idx[1:]):
        if (fs[i] < 0) != (fs[j] < 0) and j == i + 1:
            roots.append(brentq(f, xs[i], xs[j], xtol=1e-15))
    return sorted(roots)


def validate_transition(phi, grid_n=10_000, step=1e-5, smooth_tol=1e-8, morse_tol=1e-9):
    """Grid-based audit of the transition-function conditions."""
    if grid_n < 1000:
        raise InvalidParameterError("grid_n must be at least 1000")
    failures = []
    outside = np.array([-3.0, -2.0, -1.5, -1.0, 1.0, 1.5, 2.0, 3.0])
    vals = phi(outside)
    boundary_ok = bool(np.all(vals[:4] == -1.0) and np.all(vals[4:] == 1.0))
    if not boundary_ok:
        failures.append("phi is not exactly -1/+1 outside (-1, 1)")

    rho = phi.rho
    jumps = {}
    for name, x0 in (("-1", -1.0), ("-rho", -rho), ("rho", rho), ("1", 1.0)):
        jumps[name] = _one_sided_jumps(phi, x0, step)
        if max(jumps[name]) >= smooth_tol:
            failures.append(f"C1 proxy at {name}: jumps {jumps[name]}")

    xs = np.linspace(-1.0, 1.0, grid_n + 2)[1:-1]
    d1 = phi(xs, 1)
    crit = _sign_change_roots(lambda x: phi(x, 1), xs, d1, rho)
    second = [float(phi(c, 2)) for c in crit]
    scale = max(1.0, float(np.max(np.abs(phi(xs, 2)))))
    morse = [abs(s) > morse_tol * scale for s in second]
    if not all(morse):
        failures.append("non-Morse critical point")
    monotonic = bool(np.all(d1 >= 0.0) and not crit)
    return ValidationReport(boundary_ok, jumps, crit, morse, second, monotonic, failures)
