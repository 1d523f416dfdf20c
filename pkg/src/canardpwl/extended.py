"""Extended-precision (``numpy.longdouble``) integration of the cycle systems.

The stepper is the Dormand-Prince 5(4) pair.  Its coefficients are small
rationals, recovered exactly from scipy's float tableau and rounded once to
long double, so the order conditions hold to long-double accuracy.  The
right-hand side uses the polynomial core of the model directly, which is
the regularized system wherever ``|x| <= rho``.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import RK45

from .errors import DomainError
from .polynomial import ExactPoly

LD = np.longdouble
LD_EPS = np.finfo(LD).eps


def _ld(value):
    f = Fraction(value)
    return LD(f.numerator) / LD(f.denominator)


def _rational(v):
    return Fraction(float(v)).limit_denominator(10**6)


_A = [[_ld(_rational(v)) for v in row] for row in RK45.A]
_B = [_ld(_rational(v)) for v in RK45.B]
_C = [_ld(_rational(v)) for v in RK45.C]
_E = [_ld(_rational(v)) for v in RK45.E]
_N = RK45.n_stages


class LdPoly:
    """Long-double Horner evaluation of an exact polynomial and its derivatives."""

    def __init__(self, poly: ExactPoly):
        p = poly.exact
        self.coeffs = []
        for _ in range(3):
            self.coeffs.append([_ld(Fraction(int(c.p), int(c.q))) for c in p.all_coeffs()])
            p = p.diff()

    def __call__(self, x, nu=0):
        acc = LD(0)
        for c in self.coeffs[nu]:
            acc = acc * x + c
        return acc


def _ld_smoothstep(t, nu=0):
    if t <= 0 or t >= 1:
        return LD(0) if nu or t <= 0 else LD(1)
    one = LD(1)
    z = one / t - one / (one - t)
    s = one / (one + np.exp(z))
    if nu == 0:
        return s
    dz = -one / (t * t) - one / ((one - t) * (one - t))
    return -s * (one - s) * dz


def core_F(model, param=0.0):
    """Long-double ``F`` and ``F'`` of the model core (``b = param`` for jump models)."""
    if model.kind == "hopf":
        poly = LdPoly(model.F)
        return poly

    pe = LdPoly(model.Pe)
    right = LdPoly(model.Po.right)
    eta = _ld(model.eta)
    delta = _ld(model.delta)
    b = _ld(param)

    def T(x, nu):
        t = x / eta
        s0 = _ld_smoothstep(t)
        if nu == 0:
            return s0 * right(x)
        return _ld_smoothstep(t, 1) / eta * right(x) + s0 * right(x, 1)

    def Po(x, nu):
        if x >= eta:
            return right(x, nu)
        if x <= -eta:
            return (-right(-x, nu)) if nu == 0 else right(-x, nu)
        return T(x, nu) - T(-x, nu) if nu == 0 else T(x, nu) + T(-x, nu)

    def F(x, nu=0):
        val = pe(x, nu) + delta * Po(x, nu)
        if nu == 0:
            return val + b * x
        return val + b

    return F


def core_rhs(model, eps, param=0.0):
    """Augmented right-hand side ``[x', y', div]`` in long double."""
    F = core_F(model, param)
    e2 = _ld(eps) * _ld(eps)
    a = _ld(param) if model.kind == "hopf" else LD(0)

    def rhs(t, u):
        x, y = u[0], u[1]
        return [y - F(x), e2 * (a - x), -F(x, 1)]

    return rhs


@dataclass
class LdSolution:
    t: list = field(default_factory=list)
    y: list = field(default_factory=list)
    t_events: list = field(default_factory=list)
    y_events: list = field(default_factory=list)
    status: int = 0
    message: str = ""

    @property
    def success(self):
        return self.status >= 0


def _step(fun, t, u, h):
    k = [fun(t, u)]
    for i in range(1, _N):
        ui = [u[j] + h * sum(_A[i][m] * k[m][j] for m in range(i)) for j in range(len(u))]
        k.append(fun(t + _C[i] * h, ui))
    new = [u[j] + h * sum(_B[m] * k[m][j] for m in range(_N)) for j in range(len(u))]
    k.append(fun(t + h, new))
    err = [h * sum(_E[m] * k[m][j] for m in range(_N + 1)) for j in range(len(u))]
    return new, err


def solve_ld(fun, t_span, y0, rtol, atol, events=(), max_step=np.inf, bound=None, max_steps=10**7):
    """Adaptive DP5(4) in long double with terminal event location.

    Events are callables ``g(t, u)`` with ``direction`` and ``terminal``
    attributes; a crossing is located by bisection on the step length.
    ``bound`` aborts with a ``DomainError`` when ``|x|`` exceeds it.
    """
    t0, t1 = LD(t_span[0]), LD(t_span[1])
    sign = LD(1) if t1 >= t0 else LD(-1)
    u = [LD(v) for v in y0]
    t = t0
    rtol, atol = LD(rtol), LD(atol)
    h = sign * min(LD(1e-3), abs(t1 - t0))
    out = LdSolution(t=[t], y=[list(u)], t_events=[[] for _ in events], y_events=[[] for _ in events])
    g_old = [g(t, u) for g in events]
    for _ in range(max_steps):
        if (t1 - t) * sign <= 0:
            return out
        if abs(h) > abs(t1 - t):
            h = t1 - t
        new, err = _step(fun, t, u, h)
        scale = [atol + rtol * max(abs(a), abs(b)) for a, b in zip(u, new)]
        norm = np.sqrt(sum((e / s) ** 2 for e, s in zip(err, scale)) / len(u))
        if norm > 1:
            h *= max(LD(0.2), LD(0.9) * norm ** LD(-0.2))
            if abs(h) < 8 * LD_EPS * max(abs(t), LD(1)):
                out.status, out.message = -1, "step size underflow"
                return out
            continue
        for i, g in enumerate(events):
            g_new = g(t + h, new)
            d = getattr(g, "direction", 0)
            crossed = (g_old[i] < 0 <= g_new and d >= 0) or (g_old[i] > 0 >= g_new and d <= 0)
            if crossed:
                te, ue = _locate(fun, g, t, u, h, g_old[i])
                out.t_events[i].append(te)
                out.y_events[i].append(ue)
                if getattr(g, "terminal", False):
                    out.t.append(te)
                    out.y.append(ue)
                    out.status, out.message = 1, "terminal event"
                    return out
            g_old[i] = g_new
        t, u = t + h, new
        out.t.append(t)
        out.y.append(list(u))
        if bound is not None and abs(u[0]) > bound:
            raise DomainError(f"orbit left |x| <= {bound} where the core is valid")
        fac = LD(5) if norm == 0 else min(LD(5), LD(0.9) * norm ** LD(-0.2))
        h = sign * min(abs(h) * fac, LD(max_step))
    out.status, out.message = -1, "too many steps"
    return out


def _locate(fun, g, t, u, h, g_start):
    lo, hi = LD(0), h
    ue = u
    for _ in range(80):
        mid = (lo + hi) / 2
        ue, _err = _step(fun, t, u, mid)
        gm = g(t + mid, ue)
        if gm == 0:
            return t + mid, ue
        if (gm > 0) == (g_start > 0):
            lo = mid
        else:
            hi = mid
        if abs(hi - lo) <= 4 * LD_EPS * max(abs(t), LD(1)):
            break
    ue, _err = _step(fun, t, u, hi)
    return t + hi, ue
