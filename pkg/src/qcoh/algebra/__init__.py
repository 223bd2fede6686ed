"""Exact coefficient arithmetic: jet polynomials, quotient rings, matrices, roots."""

from .matrix import ExactMatrix, char_poly, char_poly_coeffs, determinant
from .poly import DivisionError, JetPolynomial, Ring, RingMismatchError, jet_multiply
from .quotient import NotInvertibleError, QuotientElement, QuotientRing, quotient_ops
from .roots import PrecisionError, RootReport, numeric_roots
from .univariate import SquarefreeReport, squarefree_discriminant

__all__ = [
    "DivisionError",
    "ExactMatrix",
    "JetPolynomial",
    "NotInvertibleError",
    "PrecisionError",
    "QuotientElement",
    "QuotientRing",
    "Ring",
    "RingMismatchError",
    "RootReport",
    "SquarefreeReport",
    "char_poly",
    "char_poly_coeffs",
    "determinant",
    "jet_multiply",
    "numeric_roots",
    "quotient_ops",
    "squarefree_discriminant",
]
