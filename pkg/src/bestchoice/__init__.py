"""Exact solver, analyser and simulator for weighted games of best choice."""

from .exactnum import ThetaPolynomial, WinFraction, oplus, rising_factorial, theta_factorial
from .permutation import INVERSIONS, LRMAX, PATTERN321, Permutation, Statistic
from .positional import Model, ewens_kappa, mallows_kappa
from .tree_solver import GameSpec, solve

__version__ = "0.1.0"

__all__ = [
    "ThetaPolynomial",
    "WinFraction",
    "oplus",
    "rising_factorial",
    "theta_factorial",
    "INVERSIONS",
    "LRMAX",
    "PATTERN321",
    "Permutation",
    "Statistic",
    "Model",
    "ewens_kappa",
    "mallows_kappa",
    "GameSpec",
    "solve",
]
