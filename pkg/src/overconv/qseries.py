"""Exact truncated q-series and the classical expansions built from them.

A :class:`QSeries` stores coefficients for exponents ``lowest_order <= n < trunc``.
Integer series are multiplied by Kronecker substitution (pack into one big
integer, multiply, unpack), which keeps products of a few hundred terms with
large coefficients fast in pure Python.  Rational series go through the same
path after clearing denominators.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import IdentityViolation, UnsupportedPrime

SUPPORTED_PRIMES = (2, 3, 5, 7, 13)


def check_prime(p):
    if p not in SUPPORTED_PRIMES:
        raise UnsupportedPrime(f"p={p} is not one of {SUPPORTED_PRIMES}")
    return p


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _pack(coeffs: Sequence[int], nbytes: int, bias: int) -> int:
    return int.from_bytes(
        b"".join((c + bias).to_bytes(nbytes, "little") for c in coeffs), "little"
    )


def _kronecker_mul(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    """First ``n`` coefficients of the product of two integer coefficient lists."""
    a = a[:n]
    b = b[:n]
    if not a or not b:
        return [0] * n
    if min(len(a), len(b)) < 12:
        out = [0] * n
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b[: n - i]):
                    out[i + j] += x * y
        return out
    ma = max(abs(x) for x in a)
    mb = max(abs(x) for x in b)
    # slot must hold |sum| < 2^(bits-1) after biasing
    bits = ma.bit_length() + mb.bit_length() + min(len(a), len(b)).bit_length() + 2
    nbytes = (bits + 7) // 8
    half = 1 << (8 * nbytes - 1)
    # packing signed values: A = A_biased - bias_vector
    ones_a = _pack([0] * len(a), nbytes, 1)
    ones_b = _pack([0] * len(b), nbytes, 1)
    pa = _pack(a, nbytes, half) - half * ones_a
    pb = _pack(b, nbytes, half) - half * ones_b
    prod = pa * pb
    m = len(a) + len(b) - 1
    bias = half * _pack([0] * m, nbytes, 1)
    raw = (prod + bias).to_bytes(nbytes * m, "little")
    out = [
        int.from_bytes(raw[k * nbytes:(k + 1) * nbytes], "little") - half
        for k in range(min(m, n))
    ]
    out.extend([0] * (n - len(out)))
    return out


def _common_denominator(coeffs) -> int:
    d = 1
    for c in coeffs:
        if isinstance(c, Fraction) and c.denominator != 1:
            d = math.lcm(d, c.denominator)
    return d


def _mul_lists(a, b, n):
    da = _common_denominator(a)
    db = _common_denominator(b)
    ia = [int(c * da) for c in a] if da != 1 else [int(c) for c in a]
    ib = [int(c * db) for c in b] if db != 1 else [int(c) for c in b]
    out = _kronecker_mul(ia, ib, n)
    d = da * db
    if d == 1:
        return out
    return [_norm(Fraction(c, d)) for c in out]


class QSeries:
    """Truncated Laurent series ``sum_{lowest_order <= n < trunc} a_n q^n`` over Q."""

    __slots__ = ("lowest_order", "coeffs", "trunc")

    def __init__(self, coeffs: Iterable, lowest_order: int = 0, trunc: int | None = None):
        cs = [_norm(c) for c in coeffs]
        if trunc is None:
            trunc = lowest_order + len(cs)
        cs = cs[: max(trunc - lowest_order, 0)]
        cs.extend([0] * (trunc - lowest_order - len(cs)))
        k = 0
        while k < len(cs) and cs[k] == 0:
            k += 1
        self.lowest_order = lowest_order + k
        self.coeffs = cs[k:]
        self.trunc = trunc
        if not self.coeffs:
            self.lowest_order = trunc

    # construction -------------------------------------------------------
    @classmethod
    def from_dict(cls, terms: dict, trunc: int) -> QSeries:
        if not terms:
            return cls([], trunc, trunc)
        lo = min(terms)
        cs = [0] * (trunc - lo)
        for e, c in terms.items():
            if e < trunc:
                cs[e - lo] = c
        return cls(cs, lo, trunc)

    @classmethod
    def one(cls, trunc: int) -> QSeries:
        return cls([1], 0, trunc)

    @classmethod
    def monomial(cls, exponent: int, trunc: int, coeff=1) -> QSeries:
        return cls([coeff], exponent, trunc)

    # access -------------------------------------------------------------
    def __getitem__(self, n: int):
        if n >= self.trunc:
            raise IndexError(f"coefficient of q^{n} is not known (trunc={self.trunc})")
        if n < self.lowest_order:
            return 0
        return self.coeffs[n - self.lowest_order]

    def coefficient_list(self, start: int, stop: int) -> list:
        return [self[n] for n in range(start, stop)]

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs)

    def truncate(self, trunc: int) -> QSeries:
        if trunc > self.trunc:
            raise ValueError("cannot extend truncation")
        return QSeries(self.coeffs, self.lowest_order, trunc)

    def shift(self, k: int) -> QSeries:
        """Multiply by q^k."""
        return QSeries(self.coeffs, self.lowest_order + k, self.trunc + k)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries([other], 0, self.trunc)
        trunc = min(self.trunc, other.trunc)
        lo = min(self.lowest_order, other.lowest_order)
        if lo >= trunc:
            return QSeries([], trunc, trunc)
        return QSeries([self[n] + other[n] for n in range(lo, trunc)], lo, trunc)

    __radd__ = __add__

    def __neg__(self):
        return QSeries([-c for c in self.coeffs], self.lowest_order, self.trunc)

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries([other], 0, self.trunc)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            if other == 0:
                return QSeries([], self.trunc, self.trunc)
            return QSeries([c * other for c in self.coeffs], self.lowest_order, self.trunc)
        if self.is_zero() or other.is_zero():
            t = min(self.trunc + other.lowest_order, other.trunc + self.lowest_order)
            return QSeries([], t, t)
        lo = self.lowest_order + other.lowest_order
        trunc = min(self.trunc + other.lowest_order, other.trunc + self.lowest_order)
        return QSeries(_mul_lists(self.coeffs, other.coeffs, trunc - lo), lo, trunc)

    __rmul__ = __mul__

    def inverse(self) -> QSeries:
        """Inverse of a series with nonzero leading coefficient.

        Relative precision ``trunc - lowest_order`` is preserved.
        """
        if self.is_zero():
            raise ZeroDivisionError("series is zero to its truncation")
        n = self.trunc - self.lowest_order
        a = self.coeffs
        lead = a[0]
        inv_lead = _norm(Fraction(1) / lead) if lead not in (1, -1) else lead
        g = [inv_lead]
        k = 1
        # Newton: g <- g*(2 - a*g)
        while k < n:
            k = min(2 * k, n)
            ag = _mul_lists(a, g, k)
            ag = [-c for c in ag]
            ag[0] += 2
            g = _mul_lists(g, ag, k)
        return QSeries(g, -self.lowest_order, -self.lowest_order + n)

    def __truediv__(self, other):
        if isinstance(other, QSeries):
            return self * other.inverse()
        return QSeries([_norm(Fraction(c) / other) for c in self.coeffs],
                       self.lowest_order, self.trunc)

    def __pow__(self, e: int) -> QSeries:
        if e < 0:
            return self.inverse() ** (-e)
        shift = self.lowest_order * e
        unit = self.shift(-self.lowest_order)
        result = QSeries([1], 0, unit.trunc)
        while e:
            if e & 1:
                result = result * unit
            e >>= 1
            if e:
                unit = unit * unit
        return result.shift(shift)

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return (self.trunc == other.trunc and self.lowest_order == other.lowest_order
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.lowest_order, self.trunc, tuple(self.coeffs)))

    def __repr__(self):
        terms = []
        for n, c in enumerate(self.coeffs[:8], self.lowest_order):
            if c:
                terms.append(f"{c}*q^{n}")
        more = " + ..." if len(self.coeffs) > 8 else ""
        return f"QSeries({' + '.join(terms) or '0'}{more} + O(q^{self.trunc}))"

    def dump(self) -> str:
        """Series dump: one ``n: coefficient`` line per known exponent."""
        lo = min(self.lowest_order, 0)
        return "".join(f"{n}: {self[n]}\n" for n in range(lo, self.trunc))


# ---------------------------------------------------------------------------
# operators on q-expansions

def U_on_qexp(h: QSeries, p: int) -> QSeries:
    """``sum a_n q^n  ->  sum a_{pn} q^n``.

    Exponent ``m`` of the output is known iff ``p*m < h.trunc``.
    """
    lo = -((-h.lowest_order) // p)  # ceil
    trunc = -((-h.trunc) // p)
    if lo >= trunc:
        return QSeries([], trunc, trunc)
    return QSeries([h[p * m] for m in range(lo, trunc)], lo, trunc)


def V_on_qexp(h: QSeries, p: int) -> QSeries:
    """``sum a_n q^n  ->  sum a_n q^{pn}``."""
    if h.is_zero():
        return QSeries([], p * h.trunc, p * h.trunc)
    cs = [0] * (p * len(h.coeffs))
    cs[::p] = h.coeffs
    return QSeries(cs, p * h.lowest_order, p * h.trunc)


# ---------------------------------------------------------------------------
# classical expansions

@lru_cache(maxsize=None)
def _euler_coeffs(T: int) -> tuple:
    """prod_{n>=1} (1 - q^n) mod q^T, by the pentagonal number theorem."""
    cs = [0] * T
    k = 0
    while True:
        e1 = k * (3 * k - 1) // 2
        e2 = k * (3 * k + 1) // 2
        if e1 >= T:
            break
        sign = -1 if k % 2 else 1
        cs[e1] += sign
        if k and e2 < T:
            cs[e2] += sign
        k += 1
    return tuple(cs)


def euler_product(T: int) -> QSeries:
    return QSeries(_euler_coeffs(T), 0, T)


def dedekind_style_product(p: int, e: int, T: int) -> QSeries:
    """``prod_{n>=1} (1 - q^{pn})^e (1 - q^n)^{-e}`` truncated at order ``T``."""
    if T < 1:
        raise ValueError("T must be positive")
    if e == 0:
        return QSeries.one(T)
    eta = euler_product(T)
    return (V_on_qexp(eta, p).truncate(T) ** e) * (eta ** (-e))


def sigma(k: int, n: int) -> int:
    total = 0
    d = 1
    while d * d <= n:
        if n % d == 0:
            total += d ** k
            if d * d != n:
                total += (n // d) ** k
        d += 1
    return total


def delta(T: int) -> QSeries:
    """The discriminant ``q prod (1 - q^n)^24``."""
    return (euler_product(T) ** 24).shift(1).truncate(T)


_EISENSTEIN = {2: (1, -24), 4: (3, 240), 6: (5, -504)}


def eisenstein(k: int, T: int) -> QSeries:
    if k not in _EISENSTEIN:
        raise ValueError("weight must be 2, 4 or 6")
    power, scale = _EISENSTEIN[k]
    return QSeries([1] + [scale * sigma(power, n) for n in range(1, T)], 0, T)


def j_invariant(T: int) -> QSeries:
    """``E4^3 / Delta``, known for exponents ``-1 <= n < T``."""
    e4 = eisenstein(4, T + 2)
    return ((e4 ** 3) / delta(T + 2)).truncate(T)


def hauptmodul_fp(p: int, T: int) -> QSeries:
    """``f_p = (Delta(pz)/Delta(z))^(1/(p-1))``, integral with leading term ``q``."""
    check_prime(p)
    f = dedekind_style_product(p, 24 // (p - 1), max(T - 1, 1)).shift(1).truncate(T)
    if not f.is_integral():
        raise ArithmeticError(f"f_{p} has a non-integral coefficient")
    return f


@lru_cache(maxsize=32)
def _fp_cached(p: int, T: int) -> QSeries:
    return hauptmodul_fp(p, T)


def fp_powers(p: int, count: int, T: int) -> list[QSeries]:
    """``[f_p^0, f_p^1, ..., f_p^count]`` each truncated at ``T``."""
    f = _fp_cached(p, T)
    powers = [QSeries.one(T)]
    for _ in range(count):
        powers.append(powers[-1] * f)
    return powers


# ---------------------------------------------------------------------------
# level-2 identities relating E2', E6, Delta and f_2

def compare_series(lhs: QSeries, rhs: QSeries, upto: int, name: str = "identity"):
    """Raise :class:`IdentityViolation` at the first exponent ``< upto`` that differs."""
    lo = min(lhs.lowest_order, rhs.lowest_order)
    for n in range(lo, upto):
        if lhs[n] != rhs[n]:
            raise IdentityViolation(f"{name} fails at q^{n}: {lhs[n]} != {rhs[n]}", n)


def appendix_a_series(T: int) -> dict:
    """Series entering the two level-2 identities, each known beyond order ``T``."""
    T2 = T + 3
    e2 = eisenstein(2, T2)
    return {
        "E2p": 2 * V_on_qexp(e2, 2).truncate(T2) - e2,
        "E6": eisenstein(6, T2),
        "Delta": delta(T2 + 1),
        "f2": hauptmodul_fp(2, T2 + 1),
    }


def verify_appendix_A(T: int, series: dict | None = None) -> dict:
    """Check ``E2'^6/Delta = (1+2^6 f)^3/f`` and ``E6^2/Delta = (1+2^6 f)(1-2^9 f)^2/f``.

    Both sides are compared at every exponent ``< T`` (starting at ``q^-1``).
    ``series`` may override the inputs from :func:`appendix_a_series`.
    """
    if T < 1:
        raise ValueError("T must be positive")
    s = appendix_a_series(T)
    if series:
        s.update(series)
    f, d = s["f2"], s["Delta"]
    one = QSeries.one(f.trunc)
    a = 1 + 64 * f
    lhs1 = s["E2p"] ** 6 / d
    rhs1 = a ** 3 / f
    compare_series(lhs1, rhs1, T, "E2'^6/Delta")
    lhs2 = s["E6"] ** 2 / d
    rhs2 = a * (one - 512 * f) ** 2 / f
    compare_series(lhs2, rhs2, T, "E6^2/Delta")
    return {"T": T, "identities": ["E2'^6/Delta", "E6^2/Delta"], "passed": True}
