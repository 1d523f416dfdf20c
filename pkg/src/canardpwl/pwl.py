"""Piecewise-linear systems, their phi-linear regularizations and slow-fast forms.

The switching line is always ``x = 0``.  ``regularize`` gives the field
``Z_eps = (1 + phi(x/eps))/2 X + (1 - phi(x/eps))/2 Y`` in original
coordinates; ``rescale`` gives the slow-fast system obtained with
``x -> eps x`` and multiplication by ``eps``:

    x' = f(x, y, eps),   y' = eps g(x, y, eps)

with ``f, g`` the phi-blends of the first and second components of X, Y
evaluated at ``(eps x, y)``.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContactPointError,
    InvalidParameterError,
    NotOnCriticalCurveError,
    UnsupportedFormError,
)

__all__ = [
    "AffinePlanarField",
    "PwlSystem",
    "RegularizedField",
    "SlowFastField",
    "LienardSystem",
    "ContactType",
    "Classification",
    "regularize",
    "rescale",
    "lienard_from_pwl",
    "classify_contact_point",
    "is_jump_connection",
    "slow_vector_field",
    "critical_curve_height",
]

ZERO_TOL = 1e-9


@dataclass(frozen=True)
class AffinePlanarField:
    """``(a0 + a1x x + a1y y, b0 + b1x x + b1y y)``."""

    a0: float = 0.0
    a1x: float = 0.0
    a1y: float = 0.0
    b0: float = 0.0
    b1x: float = 0.0
    b1y: float = 0.0

    def __post_init__(self):
        for name in ("a0", "a1x", "a1y", "b0", "b1x", "b1y"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise InvalidParameterError(f"coefficient {name} is not finite")
            object.__setattr__(self, name, v)

    def first(self, x, y):
        return self.a0 + self.a1x * x + self.a1y * y

    def second(self, x, y):
        return self.b0 + self.b1x * x + self.b1y * y

    def __call__(self, x, y):
        return self.first(x, y), self.second(x, y)

    def as_list(self):
        return [self.a0, self.a1x, self.a1y, self.b0, self.b1x, self.b1y]

    @classmethod
    def from_list(cls, coeffs):
        if len(coeffs) != 6:
            raise InvalidParameterError("an affine field needs 6 coefficients")
        return cls(*coeffs)


@dataclass(frozen=True)
class PwlSystem:
    """X on ``x > 0``, Y on ``x < 0``."""

    X: AffinePlanarField
    Y: AffinePlanarField

    def __call__(self, x, y):
        return self.X(x, y) if x > 0 else self.Y(x, y)

    def as_dict(self):
        return {"X": self.X.as_list(), "Y": self.Y.as_list()}

    @classmethod
    def from_dict(cls, d):
        return cls(AffinePlanarField.from_list(d["X"]), AffinePlanarField.from_list(d["Y"]))

    @classmethod
    def centers(cls, c_plus=3.0, c_minus=1.0, alpha=0.0):
        """Linear centers at ``(alpha, c+)`` for X and ``(alpha, c-)`` for Y."""
        return cls(
            AffinePlanarField(-c_plus, 0.0, 1.0, alpha, -1.0, 0.0),
            AffinePlanarField(-c_minus, 0.0, 1.0, alpha, -1.0, 0.0),
        )


def _blend(phi_val, p, q):
    # convex form keeps Z = X (or Y) exact where phi = 1 (or -1)
    return 0.5 * ((1.0 + phi_val) * p + (1.0 - phi_val) * q)


@dataclass(frozen=True)
class RegularizedField:
    pwl: PwlSystem
    phi: object
    eps: float

    def __call__(self, x, y):
        t = self.phi(x / self.eps)
        X1, X2 = self.pwl.X(x, y)
        Y1, Y2 = self.pwl.Y(x, y)
        return _blend(t, X1, Y1), _blend(t, X2, Y2)

    def rhs(self, t, u):
        return list(self(u[0], u[1]))


def regularize(pwl, phi, eps):
    if not eps > 0:
        raise InvalidParameterError(f"eps must be positive, got {eps!r}")
    return RegularizedField(pwl, phi, float(eps))


@dataclass(frozen=True)
class SlowFastField:
    """Rescaled regularization ``x' = f, y' = eps^l g`` with ``l = 1``."""

    pwl: PwlSystem
    phi: object
    eps: float
    l: int = 1

    def f(self, x, y, eps=None):
        eps = self.eps if eps is None else eps
        X, Y = self.pwl.X, self.pwl.Y
        return _blend(self.phi(x), X.first(eps * x, y), Y.first(eps * x, y))

    def g(self, x, y, eps=None):
        eps = self.eps if eps is None else eps
        X, Y = self.pwl.X, self.pwl.Y
        return _blend(self.phi(x), X.second(eps * x, y), Y.second(eps * x, y))

    def partials(self, x, y):
        """f, g and their derivatives at ``(x, y, eps=0)``."""
        X, Y = self.pwl.X, self.pwl.Y
        p0, p1, p2 = self.phi(x), self.phi(x, 1), self.phi(x, 2)
        d1 = X.first(0.0, y) - Y.first(0.0, y)
        d2 = X.second(0.0, y) - Y.second(0.0, y)
        return {
            "f": _blend(p0, X.first(0.0, y), Y.first(0.0, y)),
            "fx": 0.5 * p1 * d1,
            "fxx": 0.5 * p2 * d1,
            "fy": _blend(p0, X.a1y, Y.a1y),
            "fxy": 0.5 * p1 * (X.a1y - Y.a1y),
            "g": _blend(p0, X.second(0.0, y), Y.second(0.0, y)),
            "gx": 0.5 * p1 * d2,
        }

    def augmented(self, t, u):
        """``[x', y', div]`` for integration with the divergence integral."""
        x, y = u[0], u[1]
        eps = self.eps
        X, Y = self.pwl.X, self.pwl.Y
        p0, p1 = self.phi(x), self.phi(x, 1)
        ex = eps * x
        X1, Y1 = X.first(ex, y), Y.first(ex, y)
        X2, Y2 = X.second(ex, y), Y.second(ex, y)
        dx = _blend(p0, X1, Y1)
        dy = eps * _blend(p0, X2, Y2)
        div = eps * _blend(p0, X.a1x, Y.a1x) + 0.5 * p1 * (X1 - Y1) + eps * _blend(p0, X.b1y, Y.b1y)
        return [dx, dy, div]

    def rhs(self, t, u):
        return self.augmented(t, u)[:2]


def rescale(pwl, phi, eps):
    if eps < 0:
        raise InvalidParameterError(f"eps must be non-negative, got {eps!r}")
    return SlowFastField(pwl, phi, float(eps))


class _Drift:
    """``a + (x/2) (s + d phi(x))``: second component of a Lienard reduction."""

    def __init__(self, a, s, d, phi):
        self.a, self.s, self.d, self.phi = a, s, d, phi

    def __call__(self, x, nu=0):
        if self.d == 0.0:
            return self.a + 0.5 * self.s * x if nu == 0 else 0.5 * self.s
        phi = self.phi
        if nu == 0:
            return self.a + 0.5 * x * (self.s + self.d * phi(x))
        return 0.5 * (self.s + self.d * phi(x)) + 0.5 * x * self.d * phi(x, 1)


def linear_drift(a=0.0):
    """Drift ``a - x`` of ``y' = eps^2 (a - x)``."""

    def drift(x, nu=0):
        return a - x if nu == 0 else -1.0

    return drift


@dataclass(frozen=True)
class LienardSystem:
    """``x' = y - F(x) + eps * h(x),  y' = eps^2 * drift(x)``.

    ``F`` and ``drift`` are callables ``(x, nu)``; ``h`` is the optional
    ``eps``-order term of the x-equation.
    """

    F: object
    drift: object = field(default_factory=linear_drift)
    eps: float = 0.0
    h: object = None
    l: int = 2

    def f(self, x, y, eps=None):
        eps = self.eps if eps is None else eps
        val = y - self.F(x)
        if self.h is not None:
            val += eps * self.h(x)
        return val

    def g(self, x, y, eps=None):
        return self.drift(x)

    def partials(self, x, y):
        return {
            "f": y - self.F(x),
            "fx": -self.F(x, 1),
            "fxx": -self.F(x, 2),
            "fy": 1.0,
            "fxy": 0.0,
            "g": self.drift(x),
            "gx": self.drift(x, 1),
        }

    def augmented(self, t, u):
        x, y = u[0], u[1]
        eps = self.eps
        dx = y - self.F(x)
        div = -self.F(x, 1)
        if self.h is not None:
            dx += eps * self.h(x)
            div += eps * self.h(x, 1)
        return [dx, eps * eps * self.drift(x), div]

    def rhs(self, t, u):
        return self.augmented(t, u)[:2]


def lienard_from_pwl(pwl, phi, eps=0.0):
    """Lienard form of the rescaled regularization of a template PWL system.

    The template is ``X = (a1 + b1 x + y, c + b2 x)``,
    ``Y = (alpha1 + beta1 x + y, c + beta2 x)``; a common constant ``c`` in
    the second components is carried as the breaking term ``a = c / eps``.
    """
    X, Y = pwl.X, pwl.Y
    if X.a1y != 1.0 or Y.a1y != 1.0 or X.b1y != 0.0 or Y.b1y != 0.0:
        raise UnsupportedFormError("template needs unit y-coefficient in x' and no y in y'")
    if X.b0 != Y.b0:
        raise UnsupportedFormError("second components must share their constant term")
    if X.b0 != 0.0 and eps <= 0.0:
        raise UnsupportedFormError("a constant term in y' needs eps > 0")
    a1, b1, b2 = X.a0, X.a1x, X.b1x
    al1, be1, be2 = Y.a0, Y.a1x, Y.b1x
    a = X.b0 / eps if X.b0 else 0.0

    def F(x, nu=0):
        if nu == 0:
            return -0.5 * (a1 + al1 + (a1 - al1) * phi(x))
        return -0.5 * (a1 - al1) * phi(x, nu)

    h = None
    if b1 != 0.0 or be1 != 0.0:

        def h(x, nu=0):
            if nu == 0:
                return 0.5 * x * (b1 + be1 + (b1 - be1) * phi(x))
            return 0.5 * (b1 + be1 + (b1 - be1) * phi(x)) + 0.5 * x * (b1 - be1) * phi(x, 1)

    return LienardSystem(F, _Drift(a, b2 + be2, b2 - be2, phi), float(eps), h)


class ContactType(enum.Enum):
    NORMALLY_HYPERBOLIC = "normally_hyperbolic"
    SLOW_FAST_HOPF = "slow_fast_hopf"
    GENERIC_JUMP = "generic_jump"
    DEGENERATE = "degenerate"


@dataclass(frozen=True)
class Classification:
    kind: ContactType
    stability: str = None  # "attracting" / "repelling" for normally hyperbolic points
    values: dict = field(default_factory=dict, compare=False)


def _scale(d, y0):
    return max(1.0, abs(d["fy"]), abs(y0))


def classify_contact_point(sf, x0, y0, tol=ZERO_TOL):
    """Classify a point of the critical curve of ``sf`` (at eps = 0)."""
    d = sf.partials(x0, y0)
    zero = tol * _scale(d, y0)
    if abs(d["f"]) >= zero:
        raise NotOnCriticalCurveError(f"f({x0}, {y0}, 0) = {d['f']:.3e} is not zero")
    if abs(d["fx"]) >= zero:
        stab = "attracting" if d["fx"] < 0 else "repelling"
        return Classification(ContactType.NORMALLY_HYPERBOLIC, stab, d)
    if abs(d["fxx"]) < zero:
        return Classification(ContactType.DEGENERATE, None, d)
    if abs(d["g"]) < zero:
        if abs(d["gx"]) >= zero and d["gx"] * d["fy"] < 0:
            return Classification(ContactType.SLOW_FAST_HOPF, None, d)
        return Classification(ContactType.DEGENERATE, None, d)
    if abs(d["fy"]) >= zero:
        return Classification(ContactType.GENERIC_JUMP, None, d)
    return Classification(ContactType.DEGENERATE, None, d)


def is_jump_connection(sf, x0, x1, y0, n=400, tol=ZERO_TOL):
    """True when two generic jump points at height ``y0`` form a jump connection.

    Requires the same concavity of the critical curve at both points, a
    regular fast orbit between them and slow dynamics arriving at the point
    the fast orbit leaves from and leaving the point it arrives at.
    """
    x0, x1 = sorted((x0, x1))
    try:
        c0 = classify_contact_point(sf, x0, y0, tol)
        c1 = classify_contact_point(sf, x1, y0, tol)
    except NotOnCriticalCurveError:
        return False
    if c0.kind is not ContactType.GENERIC_JUMP or c1.kind is not ContactType.GENERIC_JUMP:
        return False
    d0, d1 = c0.values, c1.values
    if d0["fxx"] * d1["fxx"] <= 0:
        return False
    xs = np.linspace(x0, x1, n + 2)[1:-1]
    fs = np.array([sf.f(x, y0, 0.0) for x in xs])
    if np.any(fs == 0.0) or not (np.all(fs > 0) or np.all(fs < 0)):
        return False
    start, end = (d0, d1) if fs[0] > 0 else (d1, d0)
    # slow flow arrives at a fold when g * fxx / fy > 0
    arrives = start["g"] * start["fxx"] / start["fy"] > 0
    leaves = end["g"] * end["fxx"] / end["fy"] < 0
    return bool(arrives and leaves)


def critical_curve_height(sf, x, y_seed=0.0, steps=50, tol=1e-14):
    """``kappa(x)``: solve ``f(x, y, 0) = 0`` for ``y`` by Newton from ``y_seed``."""
    y = float(y_seed)
    for _ in range(steps):
        d = sf.partials(x, y)
        if d["fy"] == 0.0:
            raise ContactPointError(f"df/dy vanishes at ({x}, {y})")
        step = d["f"] / d["fy"]
        y -= step
        if abs(step) <= tol * max(1.0, abs(y)):
            return y
    raise ContactPointError(f"Newton for the critical curve did not converge at x={x}")


def slow_vector_field(sf, x, y_seed=0.0, tol=ZERO_TOL):
    """``x' = -(f_y / f_x) g`` along the critical curve, with the removable
    singularity at a slow-fast Hopf point replaced by its limit
    ``-f_y g_x / f_xx``."""
    y = critical_curve_height(sf, x, y_seed)
    d = sf.partials(x, y)
    if abs(d["fx"]) < tol * _scale(d, y):
        if classify_contact_point(sf, x, y, tol).kind is ContactType.SLOW_FAST_HOPF:
            return -d["fy"] * d["gx"] / d["fxx"]
        raise ContactPointError(f"contact point at x={x}: slow vector field is unbounded")
    return -d["fy"] / d["fx"] * d["g"]
