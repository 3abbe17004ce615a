"""Exact ``U = A D B`` factorization and the closed-form checks on its factors."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

from ..errors import SingularMinor
from ..padic import newton_polygon, valuation_of_rational
from ..uoperator import UMatrix, u_matrix

# radius with an integral scale constant at which the factors are checked
CHECK_RADIUS = {2: Fraction(1, 2), 3: Fraction(1, 2), 5: Fraction(1, 3)}


@dataclass(frozen=True)
class LDUFactorization:
    A: tuple  # lower unitriangular
    D: tuple  # diagonal entries
    B: tuple  # upper unitriangular

    @property
    def n(self) -> int:
        return len(self.D)

    def product(self) -> list[list[Fraction]]:
        n = self.n
        return [[sum(self.A[i][k] * self.D[k] * self.B[k][j] for k in range(min(i, j) + 1))
                 for j in range(n)] for i in range(n)]


def ldu(U) -> LDUFactorization:
    """Doolittle elimination without pivoting; ``D_kk`` is the ratio of consecutive leading minors."""
    rows = U.rows() if isinstance(U, UMatrix) else [list(r) for r in U]
    n = len(rows)
    W = [[Fraction(x) for x in r] for r in rows]
    A = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(n):
        piv = W[k][k]
        if piv == 0:
            raise SingularMinor(k + 1)
        prow = W[k]
        for i in range(k + 1, n):
            if W[i][k]:
                m = W[i][k] / piv
                A[i][k] = m
                r = W[i]
                for j in range(k, n):
                    if prow[j]:
                        r[j] -= m * prow[j]
    D = tuple(W[k][k] for k in range(n))
    B = tuple(tuple(W[i][j] / D[i] if j > i else Fraction(int(i == j)) for j in range(n))
              for i in range(n))
    return LDUFactorization(tuple(tuple(r) for r in A), D, B)


def transport(f: LDUFactorization, e: int, p: int) -> LDUFactorization:
    """Factors of ``L^-1 U L`` with ``L = diag(p^(e i))``; ``D`` is unchanged."""
    c = Fraction(p) ** e
    n = f.n
    A = tuple(tuple(f.A[i][j] * c ** (j - i) for j in range(n)) for i in range(n))
    B = tuple(tuple(f.B[i][j] * c ** (j - i) for j in range(n)) for i in range(n))
    return LDUFactorization(A, f.D, B)


def diagonal_closed_form(p: int, i: int) -> Fraction:
    """Conjectured value of ``D_ii`` for ``p`` in 2, 3, 5."""
    F = factorial
    if p == 2:
        return Fraction(2 ** (4 * i + 1) * F(3 * i) ** 2 * F(i) ** 2, 3 * F(2 * i) ** 4)
    if p == 3:
        return Fraction(3 ** (3 * i) * F(6 * i) * F(2 * i) * F(i), 2 * F(3 * i) ** 3)
    if p == 5:
        return Fraction(5 ** (2 * i) * F(10 * i) * F(3 * i) ** 2 * F(i),
                        3 * F(5 * i) ** 3 * F(2 * i))
    raise ValueError(f"no closed form for p={p}")


def _nu_factorial(n: int, p: int) -> int:
    v, q = 0, p
    while q <= n:
        v += n // q
        q *= p
    return v


def slope_closed_form(p: int, i: int) -> int:
    """Conjectured ``i``-th slope, evaluated with Legendre's formula."""
    if p == 2:
        return 1 + 2 * (_nu_factorial(3 * i, 2) - _nu_factorial(i, 2))
    if p == 3:
        return 2 * i + 2 * (_nu_factorial(2 * i, 3) - _nu_factorial(i, 3))
    if p == 5:
        return i + 2 * (_nu_factorial(3 * i, 5) - _nu_factorial(i, 5))
    raise ValueError(f"no closed form for p={p}")


def lemma_a_entry(i: int, j: int) -> Fraction:
    """Closed form of the ``(i, j)`` entry of ``A`` for ``p = 2`` at ``c = 2^6``, ``i > j``."""
    F = factorial
    return (6 * i * j
            * Fraction(F(2 * j), 2 ** j * F(j)) ** 2
            * Fraction(2 ** i * F(i), F(2 * i)) ** 2
            * Fraction(F(2 * i - 1), F(i + j))
            * Fraction(F(2 * j + i - 1), F(3 * j))
            * comb(j, i - j))


@dataclass
class ConjectureReport:
    p: int
    n: int
    radius: Fraction
    exact: bool  # False when the factors were checked through valuations only
    diagonal_failures: list = field(default_factory=list)   # i with D_ii != closed form
    congruence_failures: list = field(default_factory=list)  # ("A"/"B", i, j, valuation)
    lemma_failures: list = field(default_factory=list)       # (i, j) for p=2
    diagonal_checked: int = 0
    lemma_checked: int = 0

    @property
    def passed(self) -> bool:
        return not (self.diagonal_failures or self.congruence_failures or self.lemma_failures)


def conjecture_check(p: int, n: int, r=None, *, diagonal_upto: int | None = None,
                     lemma_upto: int = 20, U0: UMatrix | None = None) -> ConjectureReport:
    """Compare the factors of ``U`` at radius ``r`` with their conjectured shape.

    ``r`` defaults to :data:`CHECK_RADIUS`.  When ``12r/(p-1)`` is an integer
    the matrix is rescaled and factored exactly; otherwise the radius-0
    factors are used and each off-diagonal valuation is shifted by
    ``(12r/(p-1)) (j - i)``.  Off-diagonal entries must have positive
    valuation, i.e. reduce to the identity.
    """
    r = CHECK_RADIUS[p] if r is None else Fraction(r)
    if U0 is None:
        U0 = u_matrix(p, n)
    U0 = U0.leading(n)
    e = r * Fraction(12, p - 1)
    exact = e.denominator == 1
    f0 = ldu(U0)
    f = transport(f0, int(e), p) if exact else f0
    rep = ConjectureReport(p, n, r, exact)
    k = n if diagonal_upto is None else min(n, diagonal_upto)
    for i in range(1, k + 1):
        rep.diagonal_checked += 1
        if f.D[i - 1] != diagonal_closed_form(p, i):
            rep.diagonal_failures.append(i)
    shift = 0 if exact else e
    for name, M in (("A", f.A), ("B", f.B)):
        for i in range(n):
            for j in range(n):
                if i != j and M[i][j]:
                    v = valuation_of_rational(M[i][j], p) + shift * (j - i)
                    if v <= 0:
                        rep.congruence_failures.append((name, i + 1, j + 1, v))
    if p == 2:
        # the closed form lives at c = 2^6
        A = transport(f0, 6, 2).A
        for i in range(2, min(n, lemma_upto) + 1):
            for j in range((i + 1) // 2, i):
                rep.lemma_checked += 1
                if A[i - 1][j - 1] != lemma_a_entry(i, j):
                    rep.lemma_failures.append((i, j))
    return rep


def diagonal_newton_polygon(f: LDUFactorization, p: int):
    """Newton polygon of ``prod (1 - D_ii t)``: vertices at partial sums of ``nu_p(D_ii)``."""
    vals = sorted(valuation_of_rational(d, p) for d in f.D)
    pts = [(0, 0)]
    for k, v in enumerate(vals, 1):
        pts.append((k, pts[-1][1] + v))
    return newton_polygon(pts)


def congruence_interval(p: int, n: int, U0: UMatrix | None = None) -> tuple[Fraction, Fraction]:
    """Open interval of radii on which every off-diagonal entry of ``A`` and ``B`` has positive valuation.

    Entries move as ``nu(x^(r)_ij) = nu(x_ij) + (12r/(p-1)) (j - i)``, so the
    bounds come from the radius-0 factors without any irrational scaling.
    """
    if U0 is None:
        U0 = u_matrix(p, n)
    if U0.radius != 0:
        raise ValueError("expected the radius-0 matrix")
    f = ldu(U0.leading(n))
    lo, hi = Fraction(-10 ** 9), Fraction(10 ** 9)
    for i in range(n):
        for j in range(n):
            if i < j and f.B[i][j]:
                lo = max(lo, Fraction(-valuation_of_rational(f.B[i][j], p), j - i))
            elif i > j and f.A[i][j]:
                hi = min(hi, Fraction(valuation_of_rational(f.A[i][j], p), i - j))
    scale = Fraction(12, p - 1)
    return lo / scale, hi / scale
