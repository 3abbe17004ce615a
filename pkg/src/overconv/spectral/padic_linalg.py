"""Fixed-modulus linear algebra over Z_p.

Matrices are lists of integers modulo ``p^W``.  Elimination always pivots on
an entry of minimal valuation in the remaining block, so every multiplier is
integral and the absolute precision ``W`` is preserved through elimination;
precision is only spent when dividing by pivots during back substitution.
"""

from __future__ import annotations

from fractions import Fraction

from ..errors import PrecisionLoss
from ..padic import INF, residue


def ival(x: int, p: int, cap: int) -> int:
    """Valuation of a residue, capped at ``cap`` (the zero residue maps to ``cap``)."""
    if x == 0:
        return cap
    if p == 2:
        return min((x & -x).bit_length() - 1, cap)
    v = 0
    while x % p == 0 and v < cap:
        x //= p
        v += 1
    return v


def rational_valuation(x, p):
    x = Fraction(x)
    if x == 0:
        return INF
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def integral_shift(rows, p: int) -> int:
    """Smallest ``e >= 0`` making ``p^e * rows`` p-integral."""
    vmin = min((rational_valuation(x, p) for row in rows for x in row), default=0)
    return 0 if vmin == INF or vmin >= 0 else -vmin


def to_residues(rows, p: int, W: int, shift: int = 0) -> list[list[int]]:
    scale = Fraction(p) ** shift
    return [[residue(Fraction(x) * scale, p, W) for x in row] for row in rows]


def kernel_vector(M: list[list[int]], p: int, W: int):
    """A generator of the (numerically one-dimensional) kernel of ``M`` mod ``p^W``.

    Returns ``(v, prec, pivots, residual)``: ``v`` is integral with a unit
    entry and known modulo ``p^prec``; ``pivots`` are the pivot valuations;
    ``residual`` is the valuation of the last, discarded pivot.
    """
    n = len(M)
    mod = p ** W
    A = [row[:] for row in M]
    perm = list(range(n))
    pivots = []
    uinvs = []
    for k in range(n - 1):
        best = None
        bv = W
        for i in range(k, n):
            row = A[i]
            for j in range(k, n):
                x = row[j]
                if x:
                    v = ival(x, p, bv)
                    if v < bv:
                        bv = v
                        best = (i, j)
                        if v == 0:
                            break
            if bv == 0:
                break
        if best is None:
            raise PrecisionLoss(f"kernel has dimension > 1 modulo {p}^{W}")
        i, j = best
        A[k], A[i] = A[i], A[k]
        if j != k:
            for row in A:
                row[k], row[j] = row[j], row[k]
            perm[k], perm[j] = perm[j], perm[k]
        pk = p ** bv
        uinv = pow(A[k][k] // pk, -1, mod)
        pivots.append(bv)
        uinvs.append(uinv)
        prow = A[k]
        for i2 in range(k + 1, n):
            x = A[i2][k]
            if x:
                m = (x // pk) * uinv % mod
                r = A[i2]
                for j2 in range(k, n):
                    if prow[j2]:
                        r[j2] = (r[j2] - m * prow[j2]) % mod
    residual = ival(A[n - 1][n - 1], p, W) if n else W
    worst = max(pivots, default=0)
    prec = W - worst
    if prec <= 0 or residual <= worst:
        raise PrecisionLoss(
            f"pivot valuations up to {worst} exhaust the working precision {W}")
    y = [0] * n
    y[n - 1] = 1
    for k in range(n - 2, -1, -1):
        s = sum(A[k][j] * y[j] for j in range(k + 1, n))
        pk = p ** pivots[k]
        y[k] = (-(s // pk) * uinvs[k]) % mod
    v = [0] * n
    for k in range(n):
        v[perm[k]] = y[k] % p ** prec
    return v, prec, pivots, residual


def mat_vec(M, v, mod):
    return [sum(a * b for a, b in zip(row, v)) % mod for row in M]


def inverse_unipotent(M: list[list[int]], p: int, W: int) -> list[list[int]]:
    """Inverse modulo ``p^W`` of a matrix congruent to the identity modulo ``p``."""
    n = len(M)
    mod = p ** W
    A = [row[:] + [int(i == j) for j in range(n)] for i, row in enumerate(M)]
    for k in range(n):
        inv = pow(A[k][k], -1, mod)
        A[k] = [x * inv % mod for x in A[k]]
        for i in range(n):
            if i != k and A[i][k]:
                m = A[i][k]
                A[i] = [(a - m * b) % mod for a, b in zip(A[i], A[k])]
    return [row[n:] for row in A]
