"""Characteristic series, slopes, factorization, eigenfunctions and expansions."""

from .charseries import CharSeries, berkowitz, char_series, integer_charpoly, slopes, stable_slopes
from .diagonalizer import DiagonalizerReport, diagonalizer
from .eigen import EigenPackage, eigen_solve
from .expansion import (express_in_f_basis, inverse_j_coords, iterate_projection, pairing,
                        partial_sum_residuals, spectral_coefficients)
from .ldu import LDUFactorization, conjecture_check, congruence_interval, ldu

__all__ = [
    "CharSeries", "berkowitz", "char_series", "integer_charpoly", "slopes", "stable_slopes",
    "DiagonalizerReport", "diagonalizer", "EigenPackage", "eigen_solve",
    "express_in_f_basis", "inverse_j_coords", "iterate_projection", "pairing",
    "partial_sum_residuals", "spectral_coefficients",
    "LDUFactorization", "conjecture_check", "congruence_interval", "ldu",
]
