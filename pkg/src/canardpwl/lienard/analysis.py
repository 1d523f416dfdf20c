"""Fast relations, slow divergence integrals and canard cycles of the models."""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .._roots import grid_roots, newton_polish
from ..errors import DomainError, QuadratureError

__all__ = [
    "fast_relation_hopf",
    "fast_relation_jump",
    "fast_relation",
    "sdi_hopf",
    "sdi_jump",
    "sdi",
    "I1",
    "SdiZero",
    "SdiProfile",
    "find_sdi_zeros",
    "sdi_profile",
    "default_interval",
    "jump_points",
    "breaking_gap",
    "CanardCycleSpec",
    "canard_cycle",
    "leading_sdi_remainder",
    "fast_relation_remainder",
    "jump_point_expansion",
]

QUAD_ABS = 1e-13
QUAD_REL = 1e-12
QUAD_TARGET = 1e-12
ROOT_XTOL = 1e-15


def _integrate(func, a, b):
    val, err, info = quad(func, a, b, epsabs=QUAD_ABS, epsrel=QUAD_REL, limit=200, full_output=1)[:3]
    if err > QUAD_TARGET:
        raise QuadratureError(f"quadrature on [{a:.6g}, {b:.6g}] reached only {err:.3e}", achieved=err)
    return val


def _solve_level(F, level, lo, hi):
    """Root of ``F(L) = level`` on the bracket ``[lo, hi]``, Newton-polished."""
    g = lambda s: F(s) - level
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if (glo > 0) == (ghi > 0):
        raise DomainError(f"no solution of F(L) = {level:.6g} on [{lo:.6g}, {hi:.6g}]")
    L = brentq(g, lo, hi, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps, maxiter=200)
    return newton_polish(g, lambda s: F(s, 1), L)


def fast_relation_hopf(m, x):
    """``L_H(x) < 0`` with ``F(L_H(x)) = F(x)``."""
    if not 0.0 < x <= m.radius:
        raise DomainError(f"x = {x} is outside (0, {m.radius}]")
    if m.delta == 0.0:
        return -float(x)
    return _solve_level(m.F, m.F(x), -m.radius, 0.0)


def fast_relation_jump(m, x):
    """``L_J(x) < x_-`` with ``F(L_J(x)) = F(x)``."""
    x_minus, x_plus = jump_points(m)
    if not x_plus < x <= m.radius:
        raise DomainError(f"x = {x} is outside ({x_plus:.6g}, {m.radius}]")
    if m.delta == 0.0 and m.b == 0.0:
        return -float(x)
    return _solve_level(m.F, m.F(x), -m.radius, x_minus)


def fast_relation(m, x):
    return fast_relation_hopf(m, x) if m.kind == "hopf" else fast_relation_jump(m, x)


def _divergence_density(F):
    # F'(s)^2 / s, extended by 0 at s = 0 where F'(0) = 0
    def density(s):
        if s == 0.0:
            return 0.0
        d = F(s, 1)
        return d * d / s

    return density


def sdi_hopf(m, x):
    """``int_x^{L_H(x)} F'(s)^2 / s ds``, split at the removable point ``s = 0``."""
    L = fast_relation_hopf(m, x)
    density = _divergence_density(m.F)
    return _integrate(density, 0.0, L) - _integrate(density, 0.0, x)


def sdi_jump(m, x):
    """``int_x^eta F'^2/s ds + int_{-eta}^{L_J(x)} F'^2/s ds``."""
    L = fast_relation_jump(m, x)
    density = _divergence_density(m.F)
    x_minus, x_plus = jump_points(m)
    return _integrate(density, x, x_plus) + _integrate(density, x_minus, L)


def sdi(m, x):
    return sdi_hopf(m, x) if m.kind == "hopf" else sdi_jump(m, x)


def I1(m, x):
    """``int_eta^x (2 s P_o(s) - (s^2 - eta^2) P_o'(s)) ds``, which equals ``P~(x)``."""
    eta = m.eta
    if x < eta:
        raise DomainError(f"x = {x} is below eta = {eta}")
    Po = m.Po
    return _integrate(lambda s: 2.0 * s * Po(s) - (s * s - eta * eta) * Po(s, 1), eta, x)


def default_interval(m):
    """Interval of right endpoints scanned for SDI zeros."""
    if m.kind == "jump":
        return m.D1
    top = max(m.seeds) + 0.15 if m.seeds else 0.5
    return (0.05, min(top, 0.9 * m.radius))


@dataclass(frozen=True)
class SdiZero:
    x: float
    slope: float
    simple: bool


@dataclass
class SdiProfile:
    kind: str
    x: np.ndarray
    values: np.ndarray
    zeros: list = field(default_factory=list)
    interval: tuple = (0.0, 0.0)

    @property
    def count(self):
        return len(self.zeros)

    @property
    def simple_count(self):
        return sum(z.simple for z in self.zeros)

    @property
    def max_abs(self):
        return float(np.max(np.abs(self.values))) if len(self.values) else 0.0

    def as_dict(self):
        return {
            "kind": self.kind,
            "interval": list(self.interval),
            "zeros": [{"x": z.x, "slope": z.slope, "simple": z.simple} for z in self.zeros],
            "max_abs": self.max_abs,
        }


def find_sdi_zeros(func, interval, n_grid=200, kind="", xtol=1e-10, step=1e-5, simple_ratio=1e-3):
    """Sample ``func`` on ``interval``, bracket its zeros and certify simplicity.

    A zero counts as simple when the central-difference slope exceeds
    ``simple_ratio * max|I|`` on the interval.
    """
    if n_grid < 200:
        raise ValueError("n_grid must be at least 200")
    lo, hi = map(float, interval)
    xs = np.linspace(lo, hi, n_grid + 1)
    values = np.array([func(x) for x in xs])
    scale = float(np.max(np.abs(values)))
    zeros = []
    if scale > 0.0:
        for r in grid_roots(func, lo, hi, n_grid, xtol=xtol, values=values):
            if not lo < r < hi:
                continue
            h = min(step, r - lo, hi - r)
            slope = (func(r + h) - func(r - h)) / (2 * h)
            zeros.append(SdiZero(float(r), float(slope), bool(abs(slope) > simple_ratio * scale)))
    return SdiProfile(kind, xs, values, zeros, (lo, hi))


def sdi_profile(m, interval=None, n_grid=200):
    interval = default_interval(m) if interval is None else interval
    return find_sdi_zeros(lambda x: sdi(m, x), interval, n_grid, kind=m.kind)


@lru_cache(maxsize=512)
def jump_points(m, n=200):
    """Critical points ``(x_-(b), x_+(b))`` of ``F_b`` next to ``-eta`` and ``eta``."""
    eta = m.eta
    dF = lambda s: m.F(s, 1)
    d2F = lambda s: m.F(s, 2)
    found = []
    for centre in (-eta, eta):
        lo, hi = centre - 0.5 * eta, centre + 0.5 * eta
        roots = grid_roots(dF, lo, hi, n)
        if not roots:
            raise DomainError(f"no critical point of F near {centre:.6g} (b = {m.b})")
        r = min(roots, key=lambda s: abs(s - centre))
        found.append(newton_polish(dF, d2F, r))
    return found[0], found[1]


def breaking_gap(m, b=None):
    """``h(b) = F_b(x_+(b)) - F_b(x_-(b))``."""
    mb = m if b is None else m.with_b(b)
    x_minus, x_plus = jump_points(mb)
    return mb.F(x_plus) - mb.F(x_minus)


@dataclass(frozen=True)
class CanardCycleSpec:
    kind: str
    x: float
    L: float
    y: float
    gamma_y: float = None
    p_minus: tuple = None
    p_plus: tuple = None
    F: object = field(default=None, repr=False, compare=False)

    def polyline(self, n=200):
        """Points along the slow arcs and the fast segments of the cycle."""
        F = self.F
        if self.kind == "hopf":
            s = np.linspace(self.L, self.x, n)
            pts = [np.column_stack([s, F(s)])]
        else:
            left = np.linspace(self.L, self.p_minus[0], n // 2)
            right = np.linspace(self.p_plus[0], self.x, n // 2)
            pts = [np.column_stack([left, F(left)]), np.column_stack([right, F(right)])]
        fast = np.linspace(self.x, self.L, n)
        pts.append(np.column_stack([fast, np.full(n, self.y)]))
        if self.kind == "jump":
            gamma = np.linspace(self.p_minus[0], self.p_plus[0], n)
            pts.append(np.column_stack([gamma, np.full(n, self.gamma_y)]))
        return np.vstack(pts)

    def in_stripe(self):
        xs = [self.L, self.x]
        if self.p_minus is not None:
            xs += [self.p_minus[0], self.p_plus[0]]
        return all(-1.0 < v < 1.0 for v in xs)

    def as_dict(self):
        d = {"kind": self.kind, "x": self.x, "L": self.L, "y": self.y}
        if self.kind == "jump":
            d.update(gamma_y=self.gamma_y, p_minus=list(self.p_minus), p_plus=list(self.p_plus))
        return d


def canard_cycle(m, x):
    L = fast_relation(m, x)
    y = m.F(x)
    if m.kind == "hopf":
        return CanardCycleSpec("hopf", float(x), L, y, F=m.F)
    x_minus, x_plus = jump_points(m)
    p_minus = (x_minus, m.F(x_minus))
    p_plus = (x_plus, m.F(x_plus))
    return CanardCycleSpec("jump", float(x), L, y, p_plus[1], p_minus, p_plus, F=m.F)


def leading_sdi_remainder(m, xs):
    """``max |I_H(x) + 2 delta F_o(x)| / delta^2`` over ``xs`` (Hopf models)."""
    d = m.delta
    return max(abs(sdi_hopf(m, x) + 2.0 * d * m.Fo(x)) for x in xs) / (d * d)


def fast_relation_remainder(m, xs):
    """``max |L_J(x) + x - delta L_1(x)| / delta^2`` over ``xs`` (jump models)."""
    d = m.delta
    return max(abs(fast_relation_jump(m, x) + x - d * m.L1(x)) for x in xs) / (d * d)


def jump_point_expansion(eta, b):
    """Second-order expansions of ``x_+(b)`` and ``x_-(b)`` at ``delta = 0``."""
    lin = b / (2 * eta**2)
    quad_term = 3 * b * b / (8 * eta**5)
    return -eta - lin + quad_term, eta - lin - quad_term

