"""Bracketing root search on a sampling grid."""

import math

import numpy as np
from scipy.optimize import brentq


def grid_roots(f, a, b, n=200, xtol=1e-14, values=None):
    """Return the roots of ``f`` on ``[a, b]`` found by sign changes on a grid.

    ``f`` is called on scalars.  Grid points where ``f`` is exactly zero are
    reported as roots directly.  Each bracket is closed with Brent's method,
    which keeps bisection as a fallback.
    """
    xs = np.linspace(a, b, n + 1)
    fs = np.array([f(x) for x in xs]) if values is None else np.asarray(values)
    roots = []
    for i in range(n + 1):
        if fs[i] == 0.0:
            roots.append(float(xs[i]))
    for i in range(n):
        f0, f1 = fs[i], fs[i + 1]
        if f0 == 0.0 or f1 == 0.0 or not (math.isfinite(f0) and math.isfinite(f1)):
            continue
        if (f0 < 0) != (f1 < 0):
            roots.append(brentq(f, xs[i], xs[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps))
    return sorted(roots)


def newton_polish(f, df, x, steps=3):
    """A few Newton steps; returns the input unchanged if a step misbehaves."""
    for _ in range(steps):
        d = df(x)
        if d == 0.0 or not math.isfinite(d):
            break
        step = f(x) / d
        if not math.isfinite(step) or abs(step) > 1e-6:
            break
        x -= step
    return x
