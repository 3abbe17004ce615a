"""Exact U-operator matrices on overconvergent p-adic modular functions of level 1.

Covers the primes 2, 3, 5, 7 and 13, where ``X_0(p)`` has genus zero and the
hauptmodul ``f_p`` gives a basis ``(c f_p)^i`` of the overconvergent space.
"""

from .errors import (BaseRegionIncomplete, CongruenceViolation, DegeneratePairing, EmptyInput,
                     IdentityViolation, InconsistentExpansion, InsufficientQPrec,
                     InvariantViolation, IrrationalScale, NonExactDivision, NonIsolatedRoot,
                     NoSignMatches, NotCuspidal, OverconvError, PrecisionExhausted,
                     PrecisionLoss, SingularMinor, TruncationMismatch, UnstableRange,
                     UnsupportedPrime)
from .hauptmodul import (BivarIntPoly, RecurrenceKernel, compute_Hp, derive_Ip,
                         kernel_for_prime, rational_generation_check, recurrence_kernel)
from .padic import NewtonPolygon, PadicScalar, newton_polygon, padic_roots, segment_roots
from .qseries import (SUPPORTED_PRIMES, QSeries, U_on_qexp, V_on_qexp, delta, eisenstein,
                      hauptmodul_fp, j_invariant, verify_appendix_A)
from .uoperator import (UMatrix, cached_u_matrix, rescale, support_violations,
                        symmetry_check, u_direct, u_matrix, u_recurrence)

__version__ = "0.1.0"

__all__ = [
    # errors
    "BaseRegionIncomplete", "CongruenceViolation", "DegeneratePairing", "EmptyInput",
    "IdentityViolation", "InconsistentExpansion", "InsufficientQPrec", "InvariantViolation",
    "IrrationalScale", "NonExactDivision", "NonIsolatedRoot", "NoSignMatches", "NotCuspidal",
    "OverconvError", "PrecisionExhausted", "PrecisionLoss", "SingularMinor",
    "TruncationMismatch", "UnstableRange", "UnsupportedPrime",
    # hauptmodul
    "BivarIntPoly", "RecurrenceKernel", "compute_Hp", "derive_Ip", "kernel_for_prime",
    "rational_generation_check", "recurrence_kernel",
    # padic
    "NewtonPolygon", "PadicScalar", "newton_polygon", "padic_roots", "segment_roots",
    # qseries
    "SUPPORTED_PRIMES", "QSeries", "U_on_qexp", "V_on_qexp", "delta", "eisenstein",
    "hauptmodul_fp", "j_invariant", "verify_appendix_A",
    # uoperator
    "UMatrix", "cached_u_matrix", "rescale", "support_violations", "symmetry_check",
    "u_direct", "u_matrix", "u_recurrence",
]
