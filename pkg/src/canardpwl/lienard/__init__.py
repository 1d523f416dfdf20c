"""Hopf and jump Lienard models and their singular-limit analysis."""

from .analysis import *  # noqa: F401,F403
from .analysis import __all__ as _analysis_all
from .models import HopfModel, JumpModel, OddPolynomial, build_Po

__all__ = ["HopfModel", "JumpModel", "OddPolynomial", "build_Po", *_analysis_all]
