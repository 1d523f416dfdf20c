"""Hopf and jump Lienard constructions.

Both models describe ``x' = y - F(x), y' = -eps^2 x`` (plus a breaking term)
inside the regularization stripe.  The functions that become transition
cores are ``psi = (F - C+) / C-`` with ``C+- = (c+ +- c-) / 2``.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import InvalidParameterError
from ..polynomial import ExactPoly, monomial
from ..transition import smoothstep

__all__ = ["HopfModel", "JumpModel", "OddPolynomial", "build_Po"]


def _check_increasing(seeds, lo, hi, what):
    seeds = tuple(float(s) for s in seeds)
    if any(b <= a for a, b in zip(seeds, seeds[1:])):
        raise InvalidParameterError(f"{what} seeds must be strictly increasing: {seeds}")
    if seeds and not (lo < seeds[0] and seeds[-1] < hi):
        raise InvalidParameterError(f"{what} seeds must lie in ({lo:.6g}, {hi:.6g}): {seeds}")
    return seeds


@dataclass(frozen=True)
class HopfModel:
    """``F(x) = x^2/2 + delta * x^3 * prod(x^2 - s_i^2)``.

    ``radius`` is the working half-width on which the canard cycles and the
    normal hyperbolicity check live.
    """

    delta: float
    seeds: tuple = ()
    c_plus: float = 3.0
    c_minus: float = 1.0
    radius: float = 1.0
    Fo: ExactPoly = field(init=False, repr=False, compare=False)
    F: ExactPoly = field(init=False, repr=False, compare=False)

    kind = "hopf"

    def __post_init__(self):
        seeds = _check_increasing(self.seeds, 0.0, 1.0, "Hopf")
        object.__setattr__(self, "seeds", seeds)
        if not (1.0 < 2 * self.c_minus < 2 * self.c_plus):
            raise InvalidParameterError("need 1 < 2 c_minus < 2 c_plus")
        Fo = monomial(3)
        for s in seeds:
            Fo = Fo * (monomial(2) - monomial(0, s) * s)
        object.__setattr__(self, "Fo", Fo)
        object.__setattr__(self, "F", monomial(2, 0.5) + Fo * self.delta)

    @property
    def C_plus(self):
        return 0.5 * (self.c_plus + self.c_minus)

    @property
    def C_minus(self):
        return 0.5 * (self.c_plus - self.c_minus)

    def psi(self, x, nu=0):
        val = self.F(x, nu)
        return (val - self.C_plus) / self.C_minus if nu == 0 else val / self.C_minus

    def hyperbolicity_margin(self, n=2001):
        """min of F'(x)/x over the working interval (must be positive)."""
        xs = np.linspace(-self.radius, self.radius, n)
        xs = xs[xs != 0.0]
        return float(np.min(self.F(xs, 1) / xs))

    def check(self):
        problems = []
        if self.F(0.0) != 0.0 or self.F(0.0, 1) != 0.0:
            problems.append("F(0) = F'(0) = 0 fails")
        if self.hyperbolicity_margin() <= 0.0:
            problems.append("F'(x)/x > 0 fails on the working interval")
        return problems

    def with_delta(self, delta):
        return replace(self, delta=delta)


class OddPolynomial:
    """``P_o``: a right-branch polynomial on ``[eta, inf)`` reflected oddly.

    On ``(-eta, eta)`` the two branches are blended as
    ``S(x) p(x) - S(-x) p(-x)`` with ``S(x) = smoothstep(x / eta)``, which is
    smooth and odd on the whole line.
    """

    def __init__(self, right, eta):
        self.right = right
        self.eta = float(eta)

    def _T(self, x, nu):
        # derivatives of S(x) p(x)
        eta, p = self.eta, self.right
        t = x / eta
        s0 = smoothstep(t)
        if nu == 0:
            return s0 * p(x)
        s1 = smoothstep(t, 1) / eta
        if nu == 1:
            return s1 * p(x) + s0 * p(x, 1)
        s2 = smoothstep(t, 2) / eta**2
        return s2 * p(x) + 2.0 * s1 * p(x, 1) + s0 * p(x, 2)

    def __call__(self, x, nu=0):
        if np.ndim(x) == 0:
            x = float(x)
            if x >= self.eta:
                return self.right(x, nu)
            if x <= -self.eta:
                return (-1.0) ** (nu + 1) * self.right(-x, nu)
        else:
            x = np.asarray(x, dtype=float)
        sign = -1.0 if nu % 2 == 0 else 1.0
        return self._T(x, nu) + sign * self._T(-x, nu)


def build_Po(eta, seeds):
    """Odd function whose slow-divergence integrand integrates to P~.

    On ``[eta, inf)``:
    ``P_o(x) = -(x^2 - eta^2) * int_eta^x P~'(s) / (s^2 - eta^2)^2 ds``
    with ``P~ = (x^2 - eta^2)^3 prod(x - s_i)``.  Writing ``Q = prod(x - s_i)``
    the integrand is the polynomial ``6 s Q + (s^2 - eta^2) Q'``, so the whole
    construction is exact coefficient arithmetic.
    """
    eta = float(eta)
    if not (0.0 < eta < math.sqrt(2) / 2):
        raise InvalidParameterError(f"eta must lie in (0, sqrt(2)/2), got {eta}")
    seeds = _check_increasing(seeds, math.sqrt(2) * eta, 1.0, "jump")
    Q = ExactPoly.from_roots(seeds)
    w = monomial(2) - monomial(0, eta) * eta
    integrand = monomial(1, 6) * Q + w * Q.deriv()
    R = integrand.integral_from(eta)
    right = -(w * R)
    Po = OddPolynomial(right, eta)
    Po.Q = Q
    Po.Ptilde = w**3 * Q
    Po.integrand = integrand
    return Po


@dataclass(frozen=True)
class JumpModel:
    """``F_b(x) = x^4/4 - eta^2 x^2/2 + b x + delta P_o(x)``."""

    eta: float
    seeds: tuple = ()
    delta: float = 0.0
    b: float = 0.0
    c_plus: float = 3.0
    c_minus: float = 1.0
    radius: float = 1.0
    Po: OddPolynomial = field(init=False, repr=False, compare=False)
    Pe: ExactPoly = field(init=False, repr=False, compare=False)

    kind = "jump"

    def __post_init__(self):
        Po = build_Po(self.eta, self.seeds)
        object.__setattr__(self, "seeds", tuple(float(s) for s in self.seeds))
        if not (0.25 - self.eta**2 / 2 < self.c_minus < self.c_plus):
            raise InvalidParameterError("need 1/4 - eta^2/2 < c_minus < c_plus")
        object.__setattr__(self, "Po", Po)
        object.__setattr__(self, "Pe", monomial(4, 0.25) - monomial(2, 0.5) * self.eta * self.eta)

    @property
    def Ptilde(self):
        return self.Po.Ptilde

    @property
    def C_plus(self):
        return 0.5 * (self.c_plus + self.c_minus)

    @property
    def C_minus(self):
        return 0.5 * (self.c_plus - self.c_minus)

    @property
    def D1(self):
        """Default compact interval of right endpoints of canard cycles."""
        return (math.sqrt(2) * self.eta + 0.02, 0.95)

    def F(self, x, nu=0):
        val = self.Pe(x, nu) + self.delta * self.Po(x, nu)
        if nu == 0:
            return val + self.b * x
        if nu == 1:
            return val + self.b
        return val

    def psi(self, x, nu=0):
        val = self.F(x, nu)
        return (val - self.C_plus) / self.C_minus if nu == 0 else val / self.C_minus

    def L1(self, x):
        """First-order coefficient of the fast relation in delta."""
        return -2.0 * self.Po(x) / (x * (x * x - self.eta**2))

    def with_b(self, b):
        return replace(self, b=b)

    def with_delta(self, delta):
        return replace(self, delta=delta)

    def check(self):
        problems = []
        lo, hi = self.D1
        if self.seeds and not (lo < self.seeds[0] and self.seeds[-1] < hi):
            problems.append(f"seeds not inside D1 = [{lo:.4g}, {hi:.4g}]")
        for side in (-1.0, 1.0):
            # Morse minima at +-eta
            if self.F(side * self.eta, 2) <= 0.0:
                problems.append(f"F0'' <= 0 at {side * self.eta}")
        xs = np.linspace(self.eta, self.radius, 1000)[1:]
        if np.any(xs * self.F(xs, 1) <= 0.0) or np.any(-xs * self.F(-xs, 1) <= 0.0):
            problems.append("x F0'(x) > 0 fails outside [-eta, eta]")
        return problems
