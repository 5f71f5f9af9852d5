"""Exact arithmetic and certificates for crossed products A * U(g)."""

from .coefficients import BOTTOM, BaseDomain, CommPoly, DerivationSpec, QuotientPresentation
from .pbw import (
    AlgebraPresentation,
    CrossedElement,
    Gen,
    LiePresentation,
    Var,
    load_presentation,
    multiply,
    normal_form,
    preset,
)
from .semigroup import OrderRule

__version__ = "0.1.0"

__all__ = [
    "AlgebraPresentation",
    "BOTTOM",
    "BaseDomain",
    "CommPoly",
    "CrossedElement",
    "DerivationSpec",
    "Gen",
    "LiePresentation",
    "OrderRule",
    "QuotientPresentation",
    "Var",
    "load_presentation",
    "multiply",
    "normal_form",
    "preset",
]
