"""Exact computations in the vacuum module of a two-point loop algebra of
meromorphic sl2 currents."""
from .scalars import ConfigurationError, QExt, Scalar, S
from .algebra import (Z, W, Generator, Regime, EXACT, State, current, central,
                      normal_order, apply_word, bracket, diagonal_action,
                      enumerate_monomials)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError", "QExt", "Scalar", "S",
    "Z", "W", "Generator", "Regime", "EXACT", "State", "current", "central",
    "normal_order", "apply_word", "bracket", "diagonal_action", "enumerate_monomials",
]
