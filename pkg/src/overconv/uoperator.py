"""Exact matrices of U in the basis ``(c f_p)^i``, plus an on-disk cache."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import BaseRegionIncomplete, InsufficientQPrec, IrrationalScale
from .hauptmodul import RecurrenceKernel, kernel_for_prime, scale_exponent
from .qseries import U_on_qexp, check_prime, fp_powers

CACHE_ENV = "OVERCONV_CACHE_DIR"
CACHE_SCHEMA = "overconv.umatrix/1"


def radius_exponent(p: int, r) -> int:
    """``e`` with ``c = p^e`` for radius ``r``; raises unless ``12r/(p-1)`` is a nonnegative integer."""
    e = Fraction(r) * 12 / (p - 1)
    if e.denominator != 1 or e < 0:
        raise IrrationalScale(
            f"12r/(p-1) = {e} for p={p}, r={r}: the scaling constant is not a rational power of p")
    return int(e)


@dataclass(frozen=True)
class UMatrix:
    p: int
    n: int
    entries: tuple  # entries[i-1][j-1] = u_ij (Fraction/int, or None outside a base region)
    radius: Fraction = Fraction(0)
    qprec_used: int = 0

    def u(self, i: int, j: int):
        """1-based entry; zero outside ``1..n``."""
        if i < 1 or j < 1 or i > self.n or j > self.n:
            return 0
        return self.entries[i - 1][j - 1]

    def rows(self) -> list[list]:
        return [list(r) for r in self.entries]

    def leading(self, k: int) -> UMatrix:
        return UMatrix(self.p, k, tuple(tuple(r[:k]) for r in self.entries[:k]),
                       self.radius, self.qprec_used)

    @property
    def scale(self) -> Fraction:
        return Fraction(self.p) ** radius_exponent(self.p, self.radius)

    def is_integral(self) -> bool:
        return all(Fraction(x).denominator == 1 for row in self.entries for x in row)

    def __eq__(self, other):
        if not isinstance(other, UMatrix):
            return NotImplemented
        return (self.p, self.n, self.radius, self.entries) == (
            other.p, other.n, other.radius, other.entries)

    def __hash__(self):
        return hash((self.p, self.n, self.radius, self.entries))


def _norm(x):
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


def _direct_columns(p: int, n: int, columns, rows: int):
    """Coefficients ``u_ij`` for ``i <= rows`` and ``j`` in ``columns``."""
    qprec = p * rows + 1
    jmax = max(columns)
    powers = fp_powers(p, jmax, qprec)
    low = [pw.truncate(rows + 1) for pw in fp_powers(p, rows, rows + 1)]
    out = {}
    for j in columns:
        image = U_on_qexp(powers[j], p)
        if image.trunc < rows + 1:
            raise InsufficientQPrec(f"U(f^{j}) known to q^{image.trunc}, need q^{rows + 1}")
        rest = image.truncate(rows + 1)
        if rest[0] != 0:
            raise InsufficientQPrec(f"U(f^{j}) has a constant term")
        for i in range(1, rows + 1):
            c = rest[i]
            out[(i, j)] = c
            if c:
                rest = rest - c * low[i]
        if not rest.is_zero():
            raise InsufficientQPrec(f"triangular solve for column {j} left a remainder")
    return out, qprec


def u_direct(p: int, n: int) -> UMatrix:
    """Every entry by expanding ``U(f^j)`` in powers of ``f`` from q-expansions to order ``pn+1``."""
    check_prime(p)
    vals, qprec = _direct_columns(p, n, range(1, n + 1), n)
    entries = tuple(tuple(_norm(vals[(i, j)]) for j in range(1, n + 1)) for i in range(1, n + 1))
    return UMatrix(p, n, entries, Fraction(0), qprec)


def direct_base(p: int, n: int) -> UMatrix:
    """Entries with ``i <= p`` or ``j <= p`` only; the rest are ``None``."""
    check_prime(p)
    k = min(p, n)
    cols, q1 = _direct_columns(p, n, range(1, k + 1), n)
    rows, q2 = _direct_columns(p, n, range(1, n + 1), k) if n > 0 else ({}, 0)
    vals = {**rows, **cols}
    entries = tuple(tuple(_norm(vals[(i, j)]) if (i, j) in vals else None
                          for j in range(1, n + 1)) for i in range(1, n + 1))
    return UMatrix(p, n, entries, Fraction(0), max(q1, q2))


def u_recurrence(p: int, n: int, M: RecurrenceKernel, base: UMatrix) -> UMatrix:
    """Fill entries with ``i, j > p`` by ``u_ij = sum M_ab u_{i-a, j-b}``."""
    if base.n < n or base.p != p or M.p != p:
        raise BaseRegionIncomplete(f"base of size {base.n} for p={base.p} cannot seed n={n}")
    grid = [[None] * (n + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i <= p or j <= p:
                v = base.u(i, j)
                if v is None:
                    raise BaseRegionIncomplete(f"base entry ({i},{j}) missing")
                grid[i][j] = v
    terms = [(a, b, M.M[a - 1][b - 1]) for a in range(1, p + 1)
             for b in range(1, p + 1) if M.M[a - 1][b - 1]]
    for i in range(p + 1, n + 1):
        for j in range(p + 1, n + 1):
            grid[i][j] = _norm(sum(m * grid[i - a][j - b] for a, b, m in terms))
    entries = tuple(tuple(grid[i][1:]) for i in range(1, n + 1))
    return UMatrix(p, n, entries, Fraction(0), base.qprec_used)


def u_matrix(p: int, n: int, r=0) -> UMatrix:
    """Base region directly, interior by the recurrence, then rescaled to radius ``r``."""
    _, _, M = kernel_for_prime(p)
    U0 = u_recurrence(p, n, M, direct_base(p, n))
    return rescale(U0, r) if r else U0


def rescale(U: UMatrix, r) -> UMatrix:
    """``u^(r)_ij = c^(j-i) u_ij`` relative to ``U``'s own radius."""
    r = Fraction(r)
    e = radius_exponent(U.p, r) - radius_exponent(U.p, U.radius)
    if e == 0:
        return UMatrix(U.p, U.n, U.entries, r, U.qprec_used)
    c = Fraction(U.p) ** e
    entries = tuple(
        tuple(None if x is None else _norm(x * c ** (j - i)) for j, x in enumerate(row))
        for i, row in enumerate(U.entries))
    return UMatrix(U.p, U.n, entries, r, U.qprec_used)


@dataclass(frozen=True)
class SymmetryReport:
    passed: bool
    checked: int
    first_violation: tuple | None = None


def symmetry_check(U0: UMatrix, n: int | None = None) -> SymmetryReport:
    """``i p^(cj) u_ij = j p^(ci) u_ji`` with ``c = 12/(p-1)``, on the r=0 matrix."""
    if U0.radius != 0:
        U0 = rescale(U0, 0)
    p = U0.p
    n = U0.n if n is None else n
    c = scale_exponent(p)
    count = 0
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            count += 1
            if i * p ** (c * j) * U0.u(i, j) != j * p ** (c * i) * U0.u(j, i):
                return SymmetryReport(False, count, (i, j))
    return SymmetryReport(True, count)


def support_violations(U: UMatrix) -> list[tuple[int, int]]:
    """Entries that are nonzero although ``i > pj`` or ``j > pi``."""
    p = U.p
    return [(i, j) for i in range(1, U.n + 1) for j in range(1, U.n + 1)
            if (i > p * j or j > p * i) and U.u(i, j)]


# ---------------------------------------------------------------------------
# cache

def _fmt(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def dumps_umatrix(U: UMatrix) -> str:
    doc = {
        "schema": CACHE_SCHEMA,
        "p": U.p,
        "n": U.n,
        "r": _fmt(U.radius),
        "qprec_used": U.qprec_used,
        "entries": [[_fmt(x) for x in row] for row in U.entries],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def loads_umatrix(text: str) -> UMatrix:
    doc = json.loads(text)
    if doc.get("schema") != CACHE_SCHEMA:
        raise ValueError(f"unknown matrix schema {doc.get('schema')!r}")
    entries = tuple(tuple(_norm(Fraction(x)) for x in row) for row in doc["entries"])
    return UMatrix(doc["p"], doc["n"], entries, Fraction(doc["r"]), doc["qprec_used"])


def cache_dir(override=None) -> Path | None:
    d = override or os.environ.get(CACHE_ENV)
    return Path(d) if d else None


def cached_u_matrix(p: int, n: int, r=0, directory=None) -> UMatrix:
    """:func:`u_matrix`, stored at radius 0 under the cache directory when one is configured."""
    d = cache_dir(directory)
    if d is None:
        return u_matrix(p, n, r)
    path = d / f"umatrix_p{p}_n{n}.json"
    if path.exists():
        U0 = loads_umatrix(path.read_text())
    else:
        U0 = u_matrix(p, n)
        d.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(dumps_umatrix(U0))
        tmp.replace(path)
    return rescale(U0, r) if Fraction(r) else U0
