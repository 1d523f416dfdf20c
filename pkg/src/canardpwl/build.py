"""Assemble PWL systems, transition functions and regularized systems from a model."""

from .lienard.analysis import fast_relation, jump_points
from .lienard.models import HopfModel, JumpModel
from .pwl import PwlSystem, lienard_from_pwl
from .transition import auto_rho, build_hopf_transition, build_jump_transition, make_cutoffs

__all__ = [
    "make_model",
    "model_pwl",
    "window_edge",
    "transition_rho",
    "model_transition",
    "regularized_system",
    "breaking_name",
]

WINDOW_OFFSET = 0.06


def make_model(kind, seeds=(), delta=1e-2, eta=0.5, c_plus=3.0, c_minus=1.0, b=0.0):
    if kind == "hopf":
        return HopfModel(delta, tuple(seeds), c_plus, c_minus)
    if kind == "jump":
        return JumpModel(eta, tuple(seeds), delta, b, c_plus, c_minus)
    raise ValueError(f"unknown construction kind {kind!r}")


def breaking_name(model):
    return "a" if model.kind == "hopf" else "b"


def model_pwl(model, eps=0.0, param=0.0):
    """PWL pair of linear centres; for Hopf models ``alpha = eps * a``."""
    alpha = eps * param if model.kind == "hopf" else 0.0
    return PwlSystem.centers(model.c_plus, model.c_minus, alpha)


def window_edge(model):
    """Right endpoint of the outermost canard cycle placed by the breaking parameter."""
    if model.kind == "hopf":
        return max(model.seeds) + WINDOW_OFFSET if model.seeds else 0.3
    lo, hi = model.D1
    if model.seeds:
        return min(max(model.seeds) + WINDOW_OFFSET, hi)
    return 0.5 * (lo + hi)


def transition_rho(model, window_x=None):
    x = window_edge(model) if window_x is None else window_x
    return auto_rho([x, fast_relation(model, x)])


def model_transition(model, rho=None):
    rho = transition_rho(model) if rho is None else rho
    cutoffs = make_cutoffs(rho)
    if model.kind == "hopf":
        return build_hopf_transition(model.psi, cutoffs)
    return build_jump_transition(model.psi, cutoffs)


def regularized_system(model, eps, param=0.0, rho=None):
    """Lienard form of the rescaled regularization at breaking value ``param``.

    For Hopf models ``param`` is ``a`` in ``y' = eps^2 (a - x)``; for jump
    models it is ``b`` in ``F_b``.
    """
    rho = transition_rho(model) if rho is None else rho
    if model.kind == "jump":
        model = model.with_b(param)
        jump_points(model)
    phi = model_transition(model, rho)
    return lienard_from_pwl(model_pwl(model, eps, param), phi, eps)
