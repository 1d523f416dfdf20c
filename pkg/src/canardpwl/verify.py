"""Invariant suite: each check returns a measured value against a threshold."""

import math
import time
from dataclasses import dataclass

import numpy as np

from .build import make_model, model_transition
from .lienard import (
    I1,
    HopfModel,
    JumpModel,
    breaking_gap,
    fast_relation_hopf,
    fast_relation_jump,
    fast_relation_remainder,
    jump_point_expansion,
    jump_points,
    leading_sdi_remainder,
    sdi_hopf,
    sdi_jump,
    sdi_profile,
)
from .pwl import (
    AffinePlanarField,
    ContactType,
    PwlSystem,
    classify_contact_point,
    lienard_from_pwl,
    regularize,
    rescale,
)
from .transition import validate_transition

__all__ = ["Check", "run_suite", "SUITE"]


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.value:.6g} (threshold {self.threshold:.3g}) {self.detail}".rstrip()

    def as_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "value": self.value,
            "threshold": self.threshold,
            "detail": self.detail,
        }


def _ratio_stable(r1, r2, factor=3.0):
    return r1 > 0 and r2 > 0 and 1.0 / factor <= r2 / r1 <= factor


def i1_oracle(eta=0.5, seeds=(0.75, 0.85), hi=0.95, n=100):
    m = JumpModel(eta, seeds)
    xs = np.linspace(eta, hi, n)
    P = m.Ptilde(xs)
    gap = max(abs(I1(m, x) - p) for x, p in zip(xs, P))
    rel = gap / float(np.max(np.abs(P)))
    return Check("I1 equals P~", rel <= 1e-10, rel, 1e-10, "relative to max|P~|")


def hopf_leading_order(seeds=(0.3,), deltas=(1e-2, 5e-3), n=40):
    xs = np.linspace(0.05, max(seeds) + 0.15, n)
    r = [leading_sdi_remainder(HopfModel(d, seeds), xs) for d in deltas]
    q = r[1] / r[0]
    return Check("I_H + 2 delta F_o = O(delta^2)", _ratio_stable(*r), q, 3.0, f"remainders {r[0]:.4g}, {r[1]:.4g}")


def zero_persistence(tol=0.03):
    cases = [HopfModel(5e-3, (0.25, 0.4)), JumpModel(0.5, (0.75, 0.85), delta=1e-2)]
    worst, ok, notes = 0.0, True, []
    for m in cases:
        prof = sdi_profile(m)
        xs = [z.x for z in prof.zeros if z.simple]
        good = len(xs) == len(prof.zeros) == len(m.seeds)
        if good:
            dist = max(abs(x - s) for x, s in zip(xs, m.seeds))
            worst = max(worst, dist)
            good = dist <= tol
        ok &= good
        notes.append(f"{m.kind}: {len(xs)} simple zeros")
    return Check("SDI zeros persist near seeds", ok, worst, tol, "; ".join(notes))


def breaking_slope(eta=0.5, h=1e-4):
    m = JumpModel(eta)
    slope = (breaking_gap(m, h) - breaking_gap(m, -h)) / (2 * h)
    err = abs(slope - 2 * eta)
    return Check("h'(0) = 2 eta", err <= 1e-5, slope, 2 * eta, f"|error| {err:.2e}")


def jump_point_agreement(eta=0.5, b=0.01):
    x_minus, x_plus = jump_points(JumpModel(eta, b=b))
    e_minus, e_plus = jump_point_expansion(eta, b)
    err = max(abs(x_plus - e_plus), abs(x_minus - e_minus))
    return Check("x_+-(b) expansions", err <= 1e-3, err, 1e-3, f"x_+ = {x_plus:.6f}")


def fast_relation_asymptotics(eta=0.5, seeds=(0.75, 0.85), deltas=(1e-2, 5e-3), n=50):
    lo, hi = JumpModel(eta, seeds).D1
    xs = np.linspace(lo, hi, n)
    r = [fast_relation_remainder(JumpModel(eta, seeds, delta=d), xs) for d in deltas]
    return Check("L_J = -x + delta L_1 + O(delta^2)", _ratio_stable(*r), r[1] / r[0], 3.0, f"remainders {r[0]:.4g}, {r[1]:.4g}")


def transition_validity():
    reports = {
        "hopf": validate_transition(model_transition(make_model("hopf", (0.3,), 1e-2))),
        "jump": validate_transition(model_transition(make_model("jump", (0.75, 0.85)))),
    }
    want = {"hopf": 1, "jump": 3}
    ok = all(r.ok and r.n_critical == want[k] and all(r.morse) for k, r in reports.items())
    jump = max(r.max_jump for r in reports.values())
    counts = ", ".join(f"{k}: {r.n_critical} critical" for k, r in reports.items())
    return Check("transition functions", ok and jump < 1e-8, jump, 1e-8, counts)


def symmetry_null():
    h0 = HopfModel(0.0, (0.3,))
    j0 = JumpModel(0.5, (0.75, 0.85))
    xh = np.linspace(0.05, 0.9, 50)
    xj = np.linspace(*j0.D1, 50)
    sdi_max = max(max(abs(sdi_hopf(h0, x)) for x in xh), max(abs(sdi_jump(j0, x)) for x in xj))
    L_err = max(
        max(abs(fast_relation_hopf(h0, x) + x) for x in xh),
        max(abs(fast_relation_jump(j0, x) + x) for x in xj),
    )
    ok = sdi_max <= 1e-11 and L_err <= 1e-12
    return Check("delta = 0 symmetry", ok, sdi_max, 1e-11, f"max|L + x| {L_err:.2e}")


def regularization_exact(eps=0.05):
    m = make_model("hopf", (0.3,), 1e-2)
    phi = model_transition(m)
    pwl = PwlSystem(AffinePlanarField(-3, 0.2, 1, 0.1, -1, 0.3), AffinePlanarField(-1, -0.4, 1, -0.2, 0.5, 0))
    Z = regularize(pwl, phi, eps)
    err = 0.0
    for y in (-0.5, 0.0, 0.7):
        for x in (eps, 2 * eps, 0.4):
            err = max(err, *(abs(a - b) for a, b in zip(Z(x, y), pwl.X(x, y))))
            err = max(err, *(abs(a - b) for a, b in zip(Z(-x, y), pwl.Y(-x, y))))
    return Check("Z_eps = X, Y outside the stripe", err == 0.0, err, 0.0)


def lienard_commutes(eps=0.05):
    m = make_model("hopf", (0.3,), 1e-2)
    phi = model_transition(m)
    pwl = PwlSystem(AffinePlanarField(-3, 0.2, 1, 0, -1, 0), AffinePlanarField(-1, -0.4, 1, 0, 0.5, 0))
    sf = rescale(pwl, phi, eps)
    ls = lienard_from_pwl(pwl, phi, eps)
    err = 0.0
    for x in np.linspace(-1.2, 1.2, 25):
        for y in (-0.3, 0.1, 2.0):
            err = max(err, abs(sf.f(x, y) - ls.f(x, y)), abs(sf.g(x, y) - ls.g(x, y) * eps))
    return Check("Lienard reduction matches rescaled field", err <= 1e-14, err, 1e-14)


def detector_consistency(n=41):
    """At l = 1 no slow-fast Hopf point occurs and equal-height jump points share g's sign."""
    m = make_model("jump", (0.75, 0.85))
    phi = model_transition(m)
    pwl = PwlSystem(AffinePlanarField(-3, 0, 1, 0.2, -1, 0), AffinePlanarField(-1, 0, 1, -0.1, 0.5, 0))
    sf = rescale(pwl, phi, 0.0)
    hopf = 0
    for x in np.linspace(-0.99, 0.99, n):
        y = 2.0 + phi(x)  # f = y - (2 + phi) at eps = 0
        if classify_contact_point(sf, x, y).kind is ContactType.SLOW_FAST_HOPF:
            hopf += 1
    g = [sf.partials(c, 2.0 + phi(c))["g"] for c in phi.critical_points if abs(c) > 0.1]
    ok = hopf == 0 and len({v > 0 for v in g}) <= 1
    return Check("no Hopf points at l = 1", ok, float(hopf), 0.0)


def morse_minima(etas=(0.2, 0.5, 0.7)):
    worst = math.inf
    for eta in etas:
        m = JumpModel(eta, delta=1e-3)
        for x in jump_points(m):
            h = 1e-4
            worst = min(worst, (m.F(x + h) - 2 * m.F(x) + m.F(x - h)) / h**2)
    return Check("F'' > 0 at jump points", worst > 0, worst, 0.0)


SUITE = [
    i1_oracle,
    hopf_leading_order,
    zero_persistence,
    breaking_slope,
    jump_point_agreement,
    fast_relation_asymptotics,
    transition_validity,
    symmetry_null,
    regularization_exact,
    lienard_commutes,
    detector_consistency,
    morse_minima,
]


def cycle_detection(eps=0.05, cfg=None):
    """Hopf, one seed: two hyperbolic cycles near F(x_1) and F(window)."""
    from .cycles import CycleProblem, sweep_breaking

    m = HopfModel(1e-2, (0.3,))
    problem = CycleProblem(m, eps)
    report = sweep_breaking(problem, (-5e-3, 5e-3), 41, cfg)
    targets = [m.F(0.3), m.F(problem.window_x)]
    gaps = []
    for y in targets:
        hyp = [p for p in report.fixed_points if p.hyperbolic and p.closed]
        gaps.append(min((abs(p.y - y) / y for p in hyp), default=math.inf))
    worst = max(gaps)
    return Check("Hopf k=1 limit cycles", worst <= 0.1, worst, 0.1, f"{report.hyperbolic_count} hyperbolic at a = {report.param:.6g}")


def run_suite(with_cycles=False, checks=None):
    out = []
    for fn in checks or SUITE + ([cycle_detection] if with_cycles else []):
        t0 = time.perf_counter()
        try:
            c = fn()
        except Exception as exc:  # a crashing check is a failing check
            c = Check(fn.__name__, False, math.nan, math.nan, f"{type(exc).__name__}: {exc}")
        out.append(Check(c.name, c.passed, c.value, c.threshold, c.detail, time.perf_counter() - t0))
    return out
