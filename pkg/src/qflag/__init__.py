"""Exact computations around quantum flag manifold actions: Laurent scalars,
root data, Poisson parameters, web calculus, twisted category O and the
classification of scalar systems."""

from .qscalar import INFINITY, ONE, ORIGIN, ZERO, LaurentScalar, ProjParam, q_binomial, q_integer, q_power
from .rootdata import RootSystem, ToricPoint, WeylElement

__version__ = "0.1.0"

__all__ = [
    "INFINITY",
    "ONE",
    "ORIGIN",
    "ZERO",
    "LaurentScalar",
    "ProjParam",
    "RootSystem",
    "ToricPoint",
    "WeylElement",
    "q_binomial",
    "q_integer",
    "q_power",
]
