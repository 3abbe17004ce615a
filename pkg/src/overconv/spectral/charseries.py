"""Characteristic series ``det(I - tU)`` of truncated U-matrices, and slopes.

The exact integer characteristic polynomial is assembled by the Chinese
remainder theorem from Hessenberg reductions modulo many 31-bit primes, all
primes processed at once as one numpy array.  The number of primes follows
from a Hadamard-type bound, so the result is exact.  :func:`berkowitz` is a
division-free reference used to cross-check small cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ..errors import UnstableRange
from ..padic import newton_polygon, valuation_of_rational


@dataclass(frozen=True)
class CharSeries:
    p: int
    n: int
    coeffs: tuple  # c_0 .. c_n of det(I - t U_n), exact rationals

    def newton_polygon(self):
        return newton_polygon(
            (k, valuation_of_rational(c, self.p)) for k, c in enumerate(self.coeffs))

    def charpoly(self) -> list:
        """Ascending coefficients of ``det(x I - U_n)``."""
        return list(reversed(self.coeffs))


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for sp in (2, 3, 5, 7, 11, 13):
        if n % sp == 0:
            return n == sp
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11):  # deterministic below 2.1e12
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=None)
def _moduli(count: int) -> tuple:
    out = []
    q = (1 << 31) - 1
    while len(out) < count:
        if _is_probable_prime(q):
            out.append(q)
        q -= 2
    return tuple(out)


def _powmod_vec(a: np.ndarray, e: np.ndarray, m: np.ndarray) -> np.ndarray:
    result = np.ones_like(a)
    base = a % m
    e = e.copy()
    while np.any(e):
        odd = (e & 1).astype(bool)
        result = np.where(odd, result * base % m, result)
        base = base * base % m
        e >>= 1
    return result


def _residues(values: list[int], q: np.ndarray) -> np.ndarray:
    """``values mod q`` for every modulus, shape (len(q), len(values))."""
    nbytes = max((abs(v).bit_length() + 31) // 32 * 4 for v in values) or 4
    buf = b"".join(abs(v).to_bytes(nbytes, "little") for v in values)
    limbs = np.frombuffer(buf, dtype="<u4").reshape(len(values), nbytes // 4).astype(np.int64)
    qc = q[:, None]
    shift = (1 << 32) % qc
    r = np.zeros((len(q), len(values)), dtype=np.int64)
    for k in range(limbs.shape[1] - 1, -1, -1):
        # r < 2^31 so r * 2^32 + limb stays below 2^63
        r = (r * shift % qc + limbs[:, k][None, :]) % qc
    neg = np.array([v < 0 for v in values])
    return np.where(neg[None, :], (qc - r) % qc, r)


def _hessenberg_charpoly_mod(A: list[list[int]], moduli: tuple) -> np.ndarray:
    """Descending coefficients of ``det(xI - A)`` modulo each modulus, shape (P, n+1)."""
    n = len(A)
    P = len(moduli)
    q = np.array(moduli, dtype=np.int64)
    qa = q[:, None, None]
    H = _residues([x for row in A for x in row], q).reshape(P, n, n)
    ar = np.arange(P)
    for k in range(n - 2):
        col = H[:, k + 1:, k]
        nz = col != 0
        has = nz.any(axis=1)
        piv = np.argmax(nz, axis=1) + k + 1
        swap = has & (piv != k + 1)
        if swap.any():
            s = ar[swap]
            ps = piv[swap]
            rows_a = H[s, k + 1, :].copy()
            H[s, k + 1, :] = H[s, ps, :]
            H[s, ps, :] = rows_a
            cols_a = H[s, :, k + 1].copy()
            H[s, :, k + 1] = H[s, :, ps]
            H[s, :, ps] = cols_a
        if k + 2 >= n:
            continue
        pv = H[:, k + 1, k]
        inv = _powmod_vec(np.where(has, pv, 1), q - 2, q)
        mult = H[:, k + 2:, k] * inv[:, None] % q[:, None]
        mult[~has] = 0
        # rows r > k+1: R_r -= m_r R_{k+1}
        H[:, k + 2:, :] = (H[:, k + 2:, :] - mult[:, :, None] * H[:, k + 1, None, :] % qa) % qa
        # column k+1: C_{k+1} += sum_r m_r C_r
        contrib = (H[:, :, k + 2:] * mult[:, None, :] % qa).sum(axis=2) % q[:, None]
        H[:, :, k + 1] = (H[:, :, k + 1] + contrib) % q[:, None]
    # characteristic polynomial of an upper Hessenberg matrix, ascending in x per prime
    polys = [np.ones((P, 1), dtype=np.int64)]
    qc = q[:, None]
    for m in range(1, n + 1):
        prev = polys[m - 1]
        new = np.zeros((P, m + 1), dtype=np.int64)
        new[:, 1:] = prev
        new[:, :m] = (new[:, :m] - H[:, m - 1, m - 1][:, None] * prev % qc) % qc
        prod = np.ones(P, dtype=np.int64)
        for i in range(m - 1, 0, -1):
            prod = prod * H[:, i, i - 1] % q
            coef = H[:, i - 1, m - 1] * prod % q
            if not coef.any():
                continue
            lower = polys[i - 1]
            new[:, :i] = (new[:, :i] - coef[:, None] * lower % qc) % qc
        polys.append(new)
    return polys[n][:, ::-1]


def _coefficient_bound_bits(A: list[list[int]]) -> int:
    """Bits bounding every coefficient of ``det(xI - A)`` in absolute value."""
    bits = len(A) + 1
    for row in A:
        norm2 = sum(x * x for x in row)
        bits += max(1, (norm2.bit_length() + 1) // 2 + 1)
    return bits


def _crt(residues: np.ndarray, moduli: tuple) -> list[int]:
    M = math.prod(moduli)
    basis = []
    for m in moduli:
        Mi = M // m
        basis.append(Mi * pow(Mi % m, -1, m))
    out = []
    half = M // 2
    for col in residues.T:
        x = sum(int(r) * b for r, b in zip(col, basis)) % M
        out.append(x - M if x > half else x)
    return out


def integer_charpoly(A: list[list[int]]) -> list[int]:
    """Exact descending coefficients ``[1, a_1, ..., a_n]`` of ``det(xI - A)``."""
    n = len(A)
    if n == 0:
        return [1]
    bits = _coefficient_bound_bits(A) + 2
    moduli = _moduli(bits // 30 + 1)
    out = []
    # chunks keep the (P, n, n) temporaries small
    chunk = max(1, min(len(moduli), 4_000_000 // (n * n)))
    residues = np.concatenate(
        [_hessenberg_charpoly_mod(A, moduli[i:i + chunk])
         for i in range(0, len(moduli), chunk)], axis=0)
    out = _crt(residues, moduli)
    return out


def berkowitz(A: list[list]) -> list:
    """Division-free characteristic polynomial, descending coefficients of ``det(xI - A)``."""
    n = len(A)
    poly = [1]
    for i in range(n):
        C = [A[r][i] for r in range(i)]
        R = A[i][:i]
        sub = [row[:i] for row in A[:i]]
        t = [1, -A[i][i]]
        v = C
        for m in range(i):
            t.append(-sum(a * b for a, b in zip(R, v)))
            if m < i - 1:
                v = [sum(a * b for a, b in zip(row, v)) for row in sub]
        poly = [sum(t[m] * poly[k - m] for m in range(max(0, k - len(poly) + 1), min(k, len(t) - 1) + 1))
                for k in range(i + 2)]
    return poly


def _integerize(rows) -> tuple[list[list[int]], int]:
    den = 1
    for row in rows:
        for x in row:
            d = Fraction(x).denominator
            if d != 1:
                den = math.lcm(den, d)
    if den == 1:
        return [[int(x) for x in row] for row in rows], 1
    return [[int(Fraction(x) * den) for x in row] for row in rows], den


def char_series(U) -> CharSeries:
    """Exact coefficients of ``det(I - t U_n)``."""
    A, den = _integerize(U.rows())
    desc = integer_charpoly(A)
    coeffs = tuple(
        c if den == 1 else (Fraction(c, den ** k) if c % den ** k else c // den ** k)
        for k, c in enumerate(desc))
    return CharSeries(U.p, U.n, coeffs)


def slopes(cs: CharSeries, count: int, against: CharSeries | None = None) -> list[Fraction]:
    """First ``count`` Newton slopes of ``cs`` in increasing order.

    When ``against`` (the series of a larger truncation) is supplied, the
    slopes must agree between the two, otherwise :class:`UnstableRange`.
    """
    found = cs.newton_polygon().slopes()
    # the final segment of a truncation is an artefact of cutting the matrix
    usable = found[:max(0, len(found) - 1)]
    if count > len(usable):
        raise UnstableRange(f"only {len(usable)} slopes available at n={cs.n}")
    out = usable[:count]
    if against is not None:
        ref = against.newton_polygon().slopes()
        if ref[:count] != out:
            k = next(i for i, (a, b) in enumerate(zip(out, ref)) if a != b)
            raise UnstableRange(
                f"slope {k + 1} differs between n={cs.n} and n={against.n}; increase n")
    return out


def stable_slopes(U, count: int, step: int = 5) -> list[Fraction]:
    """Slopes of ``U`` checked against the leading ``n - step`` block."""
    small = char_series(U.leading(U.n - step))
    big = char_series(U)
    return slopes(small, count, against=big)
