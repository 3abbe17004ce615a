"""Finite-slope eigenfunctions of truncated U-matrices over Q_p."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import NonIsolatedRoot, PrecisionLoss
from ..hauptmodul import scale_exponent
from ..padic import PadicScalar, segment_roots
from ..qseries import fp_powers
from ..uoperator import radius_exponent
from .charseries import CharSeries, char_series
from .padic_linalg import integral_shift, kernel_vector, to_residues

log = logging.getLogger(__name__)

DEFAULT_QTERMS = 20


@dataclass(frozen=True)
class EigenPackage:
    index: int
    eigenvalue: PadicScalar
    slope: Fraction
    coords: tuple  # PadicScalar coordinates in the basis (c f_p)^i of the matrix's radius
    qexp: tuple    # coefficients of q^1 .. q^Q; qexp[0] == 1
    self_pairing: PadicScalar
    radius: Fraction = Fraction(0)
    notes: tuple = field(default_factory=tuple)

    @property
    def prime(self) -> int:
        return self.eigenvalue.prime

    def f_coords(self) -> list[PadicScalar]:
        """Coordinates in the basis ``f_p^i`` (radius 0)."""
        e = radius_exponent(self.prime, self.radius)
        return [x * Fraction(self.prime) ** (e * i) for i, x in enumerate(self.coords, 1)]


def _check_segment(slope: Fraction, length: int, index: int):
    if length != 1 or slope.denominator != 1:
        raise NonIsolatedRoot(
            f"eigenvalue {index}: Newton segment of slope {slope} has length {length}",
            slope=slope, length=length)


def eigen_slopes(cs: CharSeries) -> list[tuple[Fraction, int]]:
    """``(slope, segment length)`` for each eigenvalue, in increasing slope order."""
    out = []
    for slope, length in cs.newton_polygon().segments:
        out.extend([(slope, length)] * length)
    return out


def eigenvalue(cs: CharSeries, index: int, abs_prec: int) -> PadicScalar:
    """The ``index``-th smallest-slope root of ``det(xI - U_n)``."""
    slope, length = eigen_slopes(cs)[index - 1]
    _check_segment(slope, length, index)
    return segment_roots(cs.charpoly(), cs.p, -slope, abs_prec)[0]


def self_pairing_of(f_coords, p: int) -> PadicScalar:
    c = scale_exponent(p)
    total = PadicScalar.zero(p)
    for i, a in enumerate(f_coords, 1):
        total = total + a * a * Fraction(i, p ** (c * i))
    return total


def eigenvector(U, lam: PadicScalar, W: int):
    """Kernel of ``U - lam`` in ``U``'s coordinates as integral residues.

    Returns ``(v, prec)`` with ``v`` known modulo ``p^prec``.
    """
    p = U.p
    rows = U.rows()
    e = integral_shift(rows, p)
    A = to_residues(rows, p, W, shift=e)
    lam_shifted = (lam * Fraction(p) ** e).residue(W)
    mod = p ** W
    for i in range(U.n):
        A[i][i] = (A[i][i] - lam_shifted) % mod
    v, prec, pivots, residual = kernel_vector(A, p, W)
    log.debug("kernel: shift %d, max pivot %d, residual %d", e, max(pivots, default=0), residual)
    return v, prec


def qexpansion(f_coords, p: int, qterms: int) -> list[PadicScalar]:
    powers = fp_powers(p, min(qterms, len(f_coords)), qterms + 1)
    out = []
    for m in range(1, qterms + 1):
        total = PadicScalar.zero(p)
        for i in range(1, min(m, len(f_coords)) + 1):
            c = powers[i][m]
            if c:
                total = total + f_coords[i - 1] * c
        out.append(total)
    return out


def eigen_solve(U, count: int, abs_prec: int = 20, *, qterms: int = DEFAULT_QTERMS,
                cs: CharSeries | None = None, skip_nonisolated: bool = False,
                working_prec: int | None = None, notes: list | None = None) -> list[EigenPackage]:
    """Eigenpackages for the ``count`` smallest slopes of ``U``.

    ``abs_prec`` is the absolute precision requested for the normalized
    coordinates and q-coefficients.  With ``skip_nonisolated`` the indices
    whose Newton segment does not isolate a root in Q_p are left out and a
    message for each is appended to ``notes``; otherwise
    :class:`NonIsolatedRoot` propagates.
    """
    p = U.p
    if cs is None:
        cs = char_series(U)
    segs = eigen_slopes(cs)
    if count > len(segs):
        raise ValueError(f"only {len(segs)} eigenvalues at n={U.n}")
    e_r = radius_exponent(p, U.radius)
    out = []
    for k in range(1, count + 1):
        slope, length = segs[k - 1]
        try:
            _check_segment(slope, length, k)
        except NonIsolatedRoot as exc:
            if skip_nonisolated:
                if notes is not None:
                    notes.append(str(exc))
                continue
            raise
        s = int(slope)
        W = working_prec or (abs_prec + 3 * s + 2 * e_r * min(qterms, U.n) + 30)
        while True:
            lam = segment_roots(cs.charpoly(), p, -slope, W + s + 10)[0]
            try:
                v, prec = eigenvector(U, lam, W)
                pkg = _package(U, k, lam, slope, v, prec, qterms)
            except PrecisionLoss:
                if working_prec:
                    raise
                W *= 2
                continue
            worst = min(x.absprec for x in pkg.qexp)
            if worst >= abs_prec or working_prec:
                break
            W += abs_prec - worst + 10
        out.append(pkg)
    return out


def _package(U, k, lam, slope, v, prec, qterms) -> EigenPackage:
    p = U.p
    e_r = radius_exponent(p, U.radius)
    raw = [PadicScalar.from_residue(x, p, prec) for x in v]
    f1 = raw[0] * Fraction(p) ** e_r
    if f1.is_zero():
        raise PrecisionLoss(f"eigenvector {k} has a vanishing first f-coordinate")
    coords = tuple(x / f1 for x in raw)
    f_coords = [x * Fraction(p) ** (e_r * i) for i, x in enumerate(coords, 1)]
    qexp = tuple(qexpansion(f_coords, p, qterms))
    return EigenPackage(k, lam, slope, coords, qexp, self_pairing_of(f_coords, p), U.radius)
