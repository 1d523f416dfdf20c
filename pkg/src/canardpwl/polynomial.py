"""Exact-coefficient polynomials with fast float evaluation.

Coefficients live in the rationals (sympy ``QQ``); floats entering a
construction are converted with their exact binary value, so products,
derivatives and antiderivatives carry no rounding.  Evaluation uses the
float image of the coefficients.
"""

from fractions import Fraction

import numpy as np
import sympy
from numpy.polynomial import Polynomial

X = sympy.Symbol("x")


def exact(value):
    """Exact rational image of a float (or int/Fraction)."""
    return sympy.Rational(Fraction(value))


class ExactPoly:
    """A univariate polynomial in ``x`` over QQ, callable as ``p(x, nu=0)``."""

    def __init__(self, poly):
        if not isinstance(poly, sympy.Poly):
            poly = sympy.Poly(poly, X, domain=sympy.QQ)
        self.exact = poly
        coeffs = [float(c) for c in reversed(poly.all_coeffs())]
        self._float = [Polynomial(coeffs)]
        for _ in range(3):
            self._float.append(self._float[-1].deriv())
        # highest order first, for scalar Horner evaluation
        self._horner = [[float(c) for c in reversed(q.coef)] for q in self._float]

    @classmethod
    def from_roots(cls, roots, lead=1):
        p = sympy.Poly(exact(lead), X, domain=sympy.QQ)
        for r in roots:
            p = p * sympy.Poly(X - exact(r), X, domain=sympy.QQ)
        return cls(p)

    def __call__(self, x, nu=0):
        if np.ndim(x) == 0:
            acc = 0.0
            for c in self._horner[nu]:
                acc = acc * x + c
            return float(acc)
        return self._float[nu](np.asarray(x, dtype=float))

    def __add__(self, other):
        return ExactPoly(self.exact + _as_poly(other))

    __radd__ = __add__

    def __sub__(self, other):
        return ExactPoly(self.exact - _as_poly(other))

    def __mul__(self, other):
        return ExactPoly(self.exact * _as_poly(other))

    __rmul__ = __mul__

    def __neg__(self):
        return ExactPoly(-self.exact)

    def __pow__(self, n):
        return ExactPoly(self.exact**n)

    def deriv(self):
        return ExactPoly(self.exact.diff(X))

    def integral_from(self, a):
        """Antiderivative vanishing at ``a``."""
        anti = self.exact.integrate(X)
        return ExactPoly(anti - anti.eval(exact(a)))

    def exact_value(self, x):
        return self.exact.eval(exact(x))

    @property
    def degree(self):
        return self.exact.degree()

    @property
    def coefficients(self):
        """Float coefficients, lowest order first."""
        return [float(c) for c in self._float[0].coef]

    def __repr__(self):
        return f"ExactPoly({self.exact.as_expr()})"


def _as_poly(other):
    if isinstance(other, ExactPoly):
        return other.exact
    return sympy.Poly(exact(other) if not isinstance(other, sympy.Basic) else other, X, domain=sympy.QQ)


def monomial(k, coeff=1):
    return ExactPoly(sympy.Poly(exact(coeff) * X**k, X, domain=sympy.QQ))
