"""The matrix of eigenvectors that conjugates a truncated U-matrix to diagonal form."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import CongruenceViolation
from ..padic import INF, PadicScalar
from .eigen import eigen_solve
from .padic_linalg import integral_shift, inverse_unipotent, ival, to_residues


@dataclass
class DiagonalizerReport:
    C: list               # n x count PadicScalar columns, C[j][j] == 1
    eigenvalues: list
    precision: int        # absolute precision of the integral residues used
    off_diagonal: list = field(default_factory=list)  # (i, j, valuation) with valuation < 1
    diagonal_defect: float | None = None  # min off-diagonal valuation of C^-1 U C, leading block

    @property
    def congruent(self) -> bool:
        return not self.off_diagonal


def _val(x: PadicScalar) -> float:
    return x.absprec if x.is_zero() else x.valuation


def diagonalizer(U, count: int, abs_prec: int = 20, *, strict: bool = True,
                 eigens=None, check_radius=None) -> DiagonalizerReport:
    """Columns ``v_j`` with ``U v_j = lambda_j v_j`` scaled so ``v_j[j] = 1``.

    With ``strict`` an off-diagonal unit raises :class:`CongruenceViolation`;
    otherwise it is only listed in the report.  ``check_radius`` judges the
    congruence at another radius, where the entries become
    ``c^(j-i) C_ij``; the scale need not be a rational power of ``p`` there.  When every column is
    congruent to a basis vector, ``C^-1 U C`` is formed modulo ``p^precision``
    with the remaining columns taken from the identity, and the smallest
    valuation of its off-diagonal entries in the first ``count`` columns is
    recorded as ``diagonal_defect``.
    """
    p = U.p
    n = U.n
    if eigens is None:
        eigens = eigen_solve(U, count, abs_prec, qterms=1)
    shift = 0
    if check_radius is not None:
        shift = (Fraction(check_radius) - U.radius) * Fraction(12, p - 1)
    C, lams, bad = [], [], []
    for j, e in enumerate(eigens):
        pivot = e.coords[j]
        if pivot.is_zero():
            raise CongruenceViolation(f"column {j + 1} vanishes at its diagonal position")
        col = [x / pivot for x in e.coords]
        for i, x in enumerate(col):
            v = _val(x) + shift * (j - i)
            if i != j and v <= 0:
                bad.append((i + 1, j + 1, v))
        C.append(col)
        lams.append(e.eigenvalue)
    if bad and strict:
        i, j, v = bad[0]
        raise CongruenceViolation(f"C[{i}][{j}] has valuation {v}")
    prec = int(min(x.absprec for col in C for x in col))
    rep = DiagonalizerReport(C, lams, prec, bad)
    if bad or prec < 1 or shift:
        return rep
    mod = p ** prec
    Csq = [[int(i == j) for j in range(n)] for i in range(n)]
    for j, col in enumerate(C):
        for i, x in enumerate(col):
            Csq[i][j] = x.residue(prec)
    rows = U.rows()
    s = integral_shift(rows, p)
    Ur = to_residues(rows, p, prec, shift=s)
    Cinv = inverse_unipotent(Csq, p, prec)
    UC = [[sum(Ur[i][k] * Csq[k][j] for k in range(n)) % mod for j in range(count)]
          for i in range(n)]
    worst = INF
    for i in range(count):
        row = Cinv[i]
        for j in range(count):
            if i != j:
                x = sum(row[k] * UC[k][j] for k in range(n)) % mod
                worst = min(worst, ival(x, p, prec))
    # entries carry the shift p^s used to make U integral
    rep.diagonal_defect = worst - s if worst != INF else INF
    return rep
