"""The polynomials H_p and I_p attached to the hauptmodul f_p, and the kernel M."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (InconsistentExpansion, InvariantViolation, NonExactDivision,
                     NoSignMatches)
from .qseries import QSeries, V_on_qexp, check_prime, fp_powers, hauptmodul_fp, j_invariant


def scale_exponent(p: int) -> int:
    """``12/(p-1)``, integral for every supported prime."""
    return 12 // (p - 1)


@dataclass(frozen=True)
class BivarIntPoly:
    coeffs: dict = field(default_factory=dict)  # (x-degree, y-degree) -> int

    def __getitem__(self, ab):
        return self.coeffs.get(ab, 0)

    def total_degree(self) -> int:
        return max(a + b for a, b in self.coeffs)

    def degree_x(self) -> int:
        return max(a for a, _ in self.coeffs)

    def degree_y(self) -> int:
        return max(b for _, b in self.coeffs)

    def evaluate(self, x, y):
        """Evaluate at ring elements (ints, Fractions or QSeries)."""
        xs = [1]
        ys = [1]
        for _ in range(self.degree_x()):
            xs.append(xs[-1] * x)
        for _ in range(self.degree_y()):
            ys.append(ys[-1] * y)
        total = 0
        for (a, b), c in sorted(self.coeffs.items()):
            total = total + c * (xs[a] * ys[b])
        return total

    def serialize(self) -> str:
        return "".join(f"({a},{b}): {c}\n" for (a, b), c in sorted(self.coeffs.items()))

    @classmethod
    def parse(cls, text: str) -> BivarIntPoly:
        coeffs = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            key, val = line.split(":")
            a, b = key.strip().strip("()").split(",")
            coeffs[(int(a), int(b))] = int(val)
        return cls(coeffs)


@dataclass(frozen=True)
class RecurrenceKernel:
    p: int
    M: tuple  # p x p, M[a-1][b-1] = coefficient of x^a y^b in -I_p

    def as_lists(self) -> list[list[int]]:
        return [list(row) for row in self.M]


def compute_Hp(p: int, T_hint: int | None = None) -> list[int]:
    """Integer coefficients (ascending) of ``H_p`` with ``j * f_p = H_p(f_p)``.

    The coefficients are read off by triangular matching against powers of
    ``f_p``; the remaining q-coefficients up to ``T_hint`` must then vanish.
    """
    check_prime(p)
    T = max(T_hint or 0, 2 * p + 10)
    jf = j_invariant(T + 1) * hauptmodul_fp(p, T + 2)
    jf = jf.truncate(T)
    powers = fp_powers(p, p + 1, T)
    rest = jf
    H = []
    for k in range(p + 2):
        c = rest[k]
        if not isinstance(c, int):
            raise InconsistentExpansion(f"non-integral coefficient {c} of H_{p}")
        H.append(c)
        rest = rest - c * powers[k]
    if not rest.is_zero():
        raise InconsistentExpansion(
            f"j*f_{p} - H_{p}(f_{p}) has a nonzero q^{rest.lowest_order} term")
    if H[0] != 1:
        raise InconsistentExpansion("constant coefficient of H_p must be 1")
    return H


def _ypoly_add(a: dict, b: dict, scale=1) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + scale * v
        if out[k] == 0:
            del out[k]
    return out


def derive_Ip(p: int, H: list[int]) -> BivarIntPoly:
    """``I_p(x, y)`` with ``I_p(V(f_p), 1/f_p) = 0``.

    With ``s = p^(-12/(p-1))`` the relation ``H(x)/x = H(s y)/(s y)`` clears to
    ``x H(s y) - s y H(x)``; dividing out ``x - s y`` and scaling the constant
    term to 1 gives ``I_p``.
    """
    check_prime(p)
    s = Fraction(1, p ** scale_exponent(p))
    # numerator as {x-degree: {y-degree: coeff}}
    num: dict[int, dict[int, Fraction]] = {}

    def add(a, b, c):
        if c:
            row = num.setdefault(a, {})
            row[b] = row.get(b, 0) + c
            if row[b] == 0:
                del row[b]

    for k, h in enumerate(H):
        add(1, k, h * s ** k)       # x * h_k (s y)^k
        add(k, 1, -h * s)           # - s y * h_k x^k
    deg = max(a for a, row in num.items() if row)
    # synthetic division by (x - s y) in x over Q[y]
    quotient: dict[int, dict] = {}
    carry: dict = {}
    for a in range(deg, 0, -1):
        cur = _ypoly_add(num.get(a, {}), carry)
        quotient[a - 1] = cur
        carry = {b + 1: c * s for b, c in cur.items()}
    remainder = _ypoly_add(num.get(0, {}), carry)
    if remainder:
        raise NonExactDivision(f"x - s*y does not divide the numerator for p={p}")
    const = quotient.get(0, {}).get(0, 0)
    if const == 0:
        raise InvariantViolation("I_p has zero constant term")
    coeffs = {}
    for a, row in quotient.items():
        for b, c in row.items():
            c = Fraction(c) / const
            if c.denominator != 1:
                raise InvariantViolation(f"coefficient of x^{a} y^{b} is not integral: {c}")
            coeffs[(a, b)] = int(c)
    Ip = BivarIntPoly(coeffs)
    check_Ip(p, Ip)
    return Ip


def check_Ip(p: int, Ip: BivarIntPoly) -> None:
    if Ip[(0, 0)] != 1:
        raise InvariantViolation("constant coefficient is not 1")
    if Ip[(1, 0)] or Ip[(0, 1)]:
        raise InvariantViolation("linear terms are not zero")
    if Ip.total_degree() != p + 1:
        raise InvariantViolation(f"total degree {Ip.total_degree()} != {p + 1}")
    if Ip.degree_x() > p or Ip.degree_y() > p:
        raise InvariantViolation("degree in one variable exceeds p")


def check_Ip_on_series(p: int, Ip: BivarIntPoly, T: int = 50) -> None:
    """Raise unless ``I_p(V(f_p), 1/f_p) = O(q^T)``."""
    f = hauptmodul_fp(p, T + p + 2)
    x = V_on_qexp(f, p).truncate(T + p + 2)
    y = f.inverse()
    val = Ip.evaluate(x, y)
    if not isinstance(val, QSeries):
        raise InvariantViolation("evaluation did not produce a series")
    if val.trunc < T:
        raise InvariantViolation("insufficient q-precision for the check")
    if val.truncate(T).coeffs:
        raise InvariantViolation(f"I_{p}(V f, 1/f) has a nonzero q^{val.lowest_order} term")


def recurrence_kernel(Ip: BivarIntPoly, p: int | None = None) -> RecurrenceKernel:
    if p is None:
        p = Ip.total_degree() - 1
    for (a, b), c in Ip.coeffs.items():
        if (a, b) != (0, 0) and (a == 0 or b == 0 or a > p or b > p):
            raise InvariantViolation(f"unexpected term x^{a} y^{b} in I_p")
    M = tuple(tuple(-Ip[(a, b)] for b in range(1, p + 1)) for a in range(1, p + 1))
    for a in range(1, p + 1):
        for b in range(1, p + 1):
            if a + b > p + 1 and M[a - 1][b - 1]:
                raise InvariantViolation(f"M is not skew upper triangular at ({a},{b})")
    return RecurrenceKernel(p, M)


def kernel_for_prime(p: int) -> tuple[list[int], BivarIntPoly, RecurrenceKernel]:
    H = compute_Hp(p)
    Ip = derive_Ip(p, H)
    return H, Ip, recurrence_kernel(Ip, p)


def check_Ip_symmetry(p: int, Ip: BivarIntPoly) -> bool:
    """``I_p(x, y) = I_p(p^-c y, p^c x)`` with ``c = 12/(p-1)``."""
    c = scale_exponent(p)
    for (a, b), coeff in Ip.coeffs.items():
        # term coeff * (p^-c y)^a (p^c x)^b lands on x^b y^a
        if Fraction(coeff) * Fraction(p) ** (c * (b - a)) != Ip[(b, a)]:
            return False
    return True


# ---------------------------------------------------------------------------
# rational generation

def _bmul(A, B, n):
    """Product of bivariate series stored as (n+1)x(n+1) arrays, truncated in each degree."""
    out = [[0] * (n + 1) for _ in range(n + 1)]
    nzA = [(i, j, a) for i, row in enumerate(A) for j, a in enumerate(row) if a]
    nzB = [(i, j, b) for i, row in enumerate(B) for j, b in enumerate(row) if b]
    for i1, j1, a in nzA:
        for i2, j2, b in nzB:
            if i1 + i2 <= n and j1 + j2 <= n:
                out[i1 + i2][j1 + j2] += a * b
    return out


def generating_function(Ip: BivarIntPoly, p: int, n: int, sign: int) -> list[list[Fraction]]:
    """Taylor coefficients ``R[i][j]`` of ``sign * (y/p) d/dy log I_p`` for ``i, j <= n``."""
    I = [[0] * (n + 1) for _ in range(n + 1)]
    yIy = [[0] * (n + 1) for _ in range(n + 1)]
    for (a, b), c in Ip.coeffs.items():
        if a <= n and b <= n:
            I[a][b] = c
            yIy[a][b] = b * c
    # 1/I = sum_k J^k with J = 1 - I; J has no pure x or pure y terms
    J = [[-c for c in row] for row in I]
    J[0][0] = 0
    inv = [[0] * (n + 1) for _ in range(n + 1)]
    inv[0][0] = 1
    term = [row[:] for row in inv]
    for _ in range(n):
        term = _bmul(term, J, n)
        if not any(any(row) for row in term):
            break
        inv = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(inv, term)]
    R = _bmul(yIy, inv, n)
    return [[Fraction(sign * c, p) for c in row] for row in R]


def rational_generation_check(Ip: BivarIntPoly, U0, n: int) -> int:
    """Return the sign ``s`` for which ``s (y/p) d/dy log I_p`` generates ``u_ij``.

    Every coefficient with ``1 <= i, j <= n`` must match, along with the
    vanishing of pure-x and pure-y terms.
    """
    p = U0.p
    if U0.n < n:
        raise ValueError(f"U0 has size {U0.n} < {n}")
    for sign in (1, -1):
        R = generating_function(Ip, p, n, sign)
        if any(R[i][0] for i in range(n + 1)) or any(R[0][j] for j in range(n + 1)):
            continue
        if all(R[i][j] == U0.u(i, j) for i in range(1, n + 1) for j in range(1, n + 1)):
            return sign
    raise NoSignMatches(f"neither sign generates u_ij for p={p}, n={n}")
