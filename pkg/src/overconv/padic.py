"""Capped relative precision p-adic scalars, Newton polygons and simple roots.

Exact linear algebra elsewhere in the package runs over Q; :class:`PadicScalar`
only appears at the boundary where p-adic limits (eigenvalues, eigenvector
coordinates, q-coefficients) are reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import EmptyInput, NonIsolatedRoot, PrecisionExhausted
from .qseries import check_prime

INF = math.inf
DEFAULT_RELPREC = 10


def int_valuation(n: int, p: int):
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation_of_rational(x, p: int):
    """``v`` with ``x = p^v * (unit)``; ``inf`` for zero."""
    check_prime(p)
    return _val(x, p)


def _val(x, p):
    if isinstance(x, PadicScalar):
        return x.valuation
    x = Fraction(x)
    if x == 0:
        return INF
    return int_valuation(x.numerator, p) - int_valuation(x.denominator, p)


def residue(x, p: int, prec: int) -> int:
    """Image of a p-integral rational (or PadicScalar) in ``Z/p^prec``."""
    mod = p ** prec
    if isinstance(x, PadicScalar):
        if x.is_zero():
            return 0
        if x.valuation < 0:
            raise ValueError("not p-integral")
        return (p ** x.valuation * x.unit) % mod
    x = Fraction(x)
    if x.denominator % p == 0:
        raise ValueError(f"{x} is not {p}-integral")
    if x.denominator == 1:
        return x.numerator % mod
    return x.numerator * pow(x.denominator, -1, mod) % mod


@dataclass(frozen=True)
class PadicScalar:
    """``prime^valuation * unit + O(prime^(valuation + relprec))``.

    A zero stores ``valuation = inf`` and keeps its absolute precision in
    ``relprec`` (``inf`` for an exact zero).
    """

    prime: int
    valuation: float | int
    unit: int
    relprec: float | int

    # construction ---------------------------------------------------------
    @classmethod
    def zero(cls, p: int, absprec=INF) -> PadicScalar:
        return cls(p, INF, 0, absprec)

    @classmethod
    def from_rational(cls, x, p: int, relprec: int | None = None,
                      absprec: int | None = None) -> PadicScalar:
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, INF if absprec is None else absprec)
        v = _val(x, p)
        if relprec is None:
            relprec = DEFAULT_RELPREC if absprec is None else absprec - v
        if relprec <= 0:
            return cls.zero(p, v + relprec)
        u = x / Fraction(p) ** v
        return cls(p, v, residue(u, p, relprec), relprec)

    @classmethod
    def from_residue(cls, n: int, p: int, absprec: int, shift: int = 0) -> PadicScalar:
        """``p^shift * n`` where ``n`` is known modulo ``p^absprec``."""
        n %= p ** absprec
        if n == 0:
            return cls.zero(p, absprec + shift)
        v = int_valuation(n, p)
        return cls(p, v + shift, n // p ** v, absprec - v)

    # basic properties -----------------------------------------------------
    @property
    def absprec(self):
        if self.is_zero():
            return self.relprec
        return self.valuation + self.relprec

    def is_zero(self) -> bool:
        return self.valuation == INF

    def lift(self) -> Fraction:
        """A rational representative."""
        if self.is_zero():
            return Fraction(0)
        return Fraction(self.prime) ** self.valuation * self.unit

    def residue(self, prec: int) -> int:
        return residue(self, self.prime, prec)

    def _coerce(self, other, like: str) -> PadicScalar:
        if isinstance(other, PadicScalar):
            if other.prime != self.prime:
                raise ValueError("mismatched primes")
            return other
        other = Fraction(other)
        if other == 0:
            return PadicScalar.zero(self.prime)
        # exact rationals carry the precision of the operand they meet
        if like == "abs":
            if self.absprec == INF:
                return PadicScalar.from_rational(other, self.prime, relprec=DEFAULT_RELPREC * 10)
            v = _val(other, self.prime)
            return PadicScalar.from_rational(other, self.prime,
                                             relprec=max(self.absprec - v, 1))
        rel = self.relprec if self.relprec != INF else DEFAULT_RELPREC * 10
        return PadicScalar.from_rational(other, self.prime, relprec=rel)

    # arithmetic -------------------------------------------------------------
    def __neg__(self):
        if self.is_zero():
            return self
        return PadicScalar(self.prime, self.valuation,
                           (-self.unit) % self.prime ** self.relprec, self.relprec)

    def __add__(self, other):
        other = self._coerce(other, "abs")
        p = self.prime
        absprec = min(self.absprec, other.absprec)
        if self.is_zero():
            return other if other.absprec <= absprec else _reduce(other, absprec)
        if other.is_zero():
            return self if self.absprec <= absprec else _reduce(self, absprec)
        v = min(self.valuation, other.valuation)
        if absprec == INF:
            return PadicScalar.from_rational(self.lift() + other.lift(), p,
                                             relprec=max(self.relprec, other.relprec))
        n = (self.unit * p ** (self.valuation - v) + other.unit * p ** (other.valuation - v))
        return PadicScalar.from_residue(n, p, absprec - v, shift=v)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other, "abs"))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other, "rel")
        p = self.prime
        if self.is_zero() or other.is_zero():
            if self.is_zero() and other.is_zero():
                return PadicScalar.zero(p, self.absprec + other.absprec)
            z, nz = (self, other) if self.is_zero() else (other, self)
            return PadicScalar.zero(p, z.absprec + nz.valuation)
        rel = min(self.relprec, other.relprec)
        return PadicScalar(p, self.valuation + other.valuation,
                           self.unit * other.unit % p ** rel, rel)

    __rmul__ = __mul__

    def inverse(self) -> PadicScalar:
        if self.is_zero():
            raise ZeroDivisionError("inverse of a p-adic zero")
        p = self.prime
        return PadicScalar(p, -self.valuation, pow(self.unit, -1, p ** self.relprec), self.relprec)

    def __truediv__(self, other):
        other = self._coerce(other, "rel")
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other, "rel") * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = PadicScalar.from_rational(1, self.prime, relprec=self.relprec
                                           if self.relprec != INF else DEFAULT_RELPREC)
        for _ in range(e):
            result = result * self
        return result

    # comparison and display -----------------------------------------------
    def agrees_with(self, other, absprec: int) -> bool:
        """True when both values agree modulo ``p^absprec``."""
        d = self - other
        return d.is_zero() or d.valuation >= absprec

    def with_relprec(self, relprec: int) -> PadicScalar:
        if self.is_zero() or relprec >= self.relprec:
            return self
        return PadicScalar(self.prime, self.valuation,
                           self.unit % self.prime ** relprec, relprec)

    def __str__(self):
        p = self.prime
        if self.is_zero():
            return f"0 + O({p}^{self.relprec})"
        return f"{p}^{self.valuation}*{self.unit}"

    def paper_str(self, relprec: int = DEFAULT_RELPREC) -> str:
        """Table typography: ``5^a×b`` with ``b`` reduced modulo ``p^relprec``."""
        p = self.prime
        if self.is_zero():
            return f"O({p}^{self.relprec})"
        if relprec > self.relprec:
            raise PrecisionExhausted(
                f"only {self.relprec} digits known, {relprec} requested")
        b = self.unit % p ** relprec
        if self.valuation == 0:
            return f"{b}"
        if self.valuation == 1:
            return f"{p}×{b}"
        return f"{p}^{self.valuation}×{b}"


def _reduce(x: PadicScalar, absprec) -> PadicScalar:
    if x.is_zero():
        return PadicScalar.zero(x.prime, min(absprec, x.absprec))
    rel = absprec - x.valuation
    if rel <= 0:
        return PadicScalar.zero(x.prime, absprec)
    return x.with_relprec(rel)


# ---------------------------------------------------------------------------
# Newton polygons

@dataclass(frozen=True)
class NewtonPolygon:
    vertices: tuple  # ((degree, valuation), ...)
    segments: tuple  # ((slope, length), ...)

    def slopes(self) -> list[Fraction]:
        """Slopes repeated according to segment length."""
        out = []
        for slope, length in self.segments:
            out.extend([slope] * length)
        return out


def newton_polygon(points) -> NewtonPolygon:
    """Lower convex hull of ``(degree, valuation)`` points; infinite valuations are ignored."""
    best = {}
    for d, v in points:
        if v == INF or v is None:
            continue
        v = Fraction(v)
        if d not in best or v < best[d]:
            best[d] = v
    pts = sorted(best.items())
    if len(pts) < 2:
        raise EmptyInput("a Newton polygon needs at least two finite points")
    hull = []
    for pt in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or above the chord hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    segments = tuple(
        (Fraction(y2 - y1) / (x2 - x1), x2 - x1)
        for (x1, y1), (x2, y2) in zip(hull, hull[1:])
    )
    return NewtonPolygon(tuple(hull), segments)


# ---------------------------------------------------------------------------
# roots

def _poly_eval_mod(coeffs: Sequence[int], y: int, mod: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * y + c) % mod
    return acc


def _coeff_absprec(c):
    if isinstance(c, PadicScalar):
        return c.absprec
    return INF


def segment_roots(poly: Sequence, p: int, slope: Fraction, abs_prec: int) -> list[PadicScalar]:
    """Roots of ``poly`` (ascending coefficients) whose valuation is ``-slope``.

    ``slope`` must be the slope of a segment of the Newton polygon of ``poly``.
    Every root on the segment must reduce to a simple root in F_p, otherwise
    :class:`NonIsolatedRoot` is raised.
    """
    slope = Fraction(slope)
    s = -slope
    vals = [_val(c, p) for c in poly]
    if s.denominator != 1:
        raise NonIsolatedRoot(f"slope {slope} is not integral; roots are ramified",
                              slope=slope)
    s = int(s)
    shifted = [v + s * k for k, v in enumerate(vals)]
    m = min(shifted)
    on = [k for k, v in enumerate(shifted) if v == m]
    k0, k1 = on[0], on[-1]
    length = k1 - k0

    # residual polynomial over F_p
    def scaled(k, prec):
        c = poly[k]
        if shifted[k] == INF:
            return 0
        shift = s * k - m
        if isinstance(c, PadicScalar):
            return residue(c * Fraction(p) ** shift, p, prec)
        return residue(Fraction(c) * Fraction(p) ** shift, p, prec)

    g = [scaled(k, 1) if shifted[k] == m else 0 for k in range(k0, k1 + 1)]
    dg = [(i * c) % p for i, c in enumerate(g)][1:]
    residues = [y for y in range(1, p) if _poly_eval_mod(g, y, p) == 0]
    if len(residues) != length or any(_poly_eval_mod(dg, y, p) == 0 for y in residues):
        raise NonIsolatedRoot(
            f"segment of slope {slope} and length {length} has no {length} simple "
            f"roots in F_{p}", slope=slope, length=length)

    t = max(abs_prec - m, abs_prec - s, 1)
    available = min(_coeff_absprec(c) + s * k - m for k, c in enumerate(poly))
    if t > available:
        raise PrecisionExhausted(
            f"need {t} digits of the scaled polynomial, coefficients give {available}")
    mod = p ** t
    Q = [scaled(k, t) for k in range(len(poly))]
    dQ = [(i * c) % mod for i, c in enumerate(Q)][1:]
    roots = []
    for y in residues:
        prec = 1
        while prec < t:
            prec = min(2 * prec, t)
            md = p ** prec
            y = (y - _poly_eval_mod(Q, y, md) * pow(_poly_eval_mod(dQ, y, md), -1, md)) % md
        roots.append(PadicScalar(p, s, y % mod, t))
    return roots


def padic_roots(poly: Sequence, p: int, abs_prec: int, *, skip_nonisolated: bool = False):
    """Roots in Q_p of a polynomial given by ascending coefficients.

    One root is produced for each simple root of each Newton segment with
    integral slope.  Segments that do not isolate simple roots raise
    :class:`NonIsolatedRoot`, or are skipped when ``skip_nonisolated`` is set.
    Roots are returned in order of increasing valuation.
    """
    check_prime(p)
    poly = list(poly)
    while poly and not isinstance(poly[-1], PadicScalar) and poly[-1] == 0:
        poly.pop()
    if not poly:
        raise EmptyInput("zero polynomial")
    roots = []
    zeros = 0
    while zeros < len(poly) and not isinstance(poly[zeros], PadicScalar) and poly[zeros] == 0:
        zeros += 1
    roots.extend(PadicScalar.zero(p) for _ in range(zeros))
    poly = poly[zeros:]
    if len(poly) == 1:
        return roots
    np_ = newton_polygon((k, _val(c, p)) for k, c in enumerate(poly))
    found = []
    for slope, _length in np_.segments:
        try:
            found.extend(segment_roots(poly, p, slope, abs_prec))
        except NonIsolatedRoot:
            if not skip_nonisolated:
                raise
    found.sort(key=lambda r: r.valuation)
    return roots + found
