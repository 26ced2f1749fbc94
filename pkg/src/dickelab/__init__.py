"""Numerical laboratory for the equilibrium and driven-dissipative Dicke model."""

from .errors import DickeError
from .params import ModelParams, gamma_total, steady_sz, validate

__all__ = ["DickeError", "ModelParams", "gamma_total", "steady_sz", "validate"]
__version__ = "0.1.0"
