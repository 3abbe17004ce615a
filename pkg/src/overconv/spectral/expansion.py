"""The self-adjoint pairing and spectral expansions built on it."""

from __future__ import annotations

from fractions import Fraction

from ..errors import DegeneratePairing, NotCuspidal, TruncationMismatch
from ..hauptmodul import compute_Hp, scale_exponent
from ..padic import INF, PadicScalar
from ..qseries import QSeries, fp_powers, j_invariant
from ..uoperator import rescale
from .padic_linalg import rational_valuation


def pairing(h_coords, k_coords, p: int):
    """``sum_i i h_i k_i p^(-12i/(p-1))`` on radius-0 (``f_p``-power) coordinates.

    This is ``<g^i, g^j> = i delta_ij`` transported from ``g = p^(6/(p-1)) f_p``.
    Exact when both inputs are rational, a :class:`PadicScalar` otherwise.
    """
    if len(h_coords) != len(k_coords):
        raise TruncationMismatch(f"{len(h_coords)} vs {len(k_coords)} coordinates")
    c = scale_exponent(p)
    exact = not any(isinstance(x, PadicScalar) for x in (*h_coords, *k_coords))
    total = Fraction(0) if exact else PadicScalar.zero(p)
    for i, (a, b) in enumerate(zip(h_coords, k_coords), 1):
        if (isinstance(a, PadicScalar) and a.is_zero() and a.absprec == INF) or \
                (isinstance(b, PadicScalar) and b.is_zero() and b.absprec == INF):
            continue
        if not isinstance(a, PadicScalar) and a == 0:
            continue
        if not isinstance(b, PadicScalar) and b == 0:
            continue
        w = Fraction(i, p ** (c * i))
        total = total + (a * b) * w if not exact else total + Fraction(a) * b * w
    return total


def express_in_f_basis(h: QSeries, p: int, n: int) -> list[Fraction]:
    """Coordinates ``h_1..h_n`` with ``h = sum h_i f_p^i + O(q^(n+1))``."""
    if h.lowest_order < 1:
        raise NotCuspidal("the series must vanish at q = 0")
    if h.trunc < n + 1:
        raise TruncationMismatch(f"need q-coefficients below q^{n + 1}, have {h.trunc}")
    powers = fp_powers(p, n, n + 1)
    rest = h.truncate(n + 1)
    out = []
    for i in range(1, n + 1):
        c = rest[i]
        out.append(c)
        if c:
            rest = rest - c * powers[i]
    return out


def inverse_j_coords(p: int, n: int) -> list[Fraction]:
    """``1/j`` in the ``f_p`` basis from its q-expansion."""
    j = j_invariant(n + 2)
    return express_in_f_basis(j.inverse(), p, n)


def inverse_j_coords_closed_form(p: int, n: int) -> list[int]:
    """``1/j = f / H_p(f)`` expanded as a power series in ``f``."""
    H = compute_Hp(p)
    # 1/H(x) by the recurrence for power series inversion (H(0) = 1)
    inv = [0] * n
    inv[0] = 1
    for m in range(1, n):
        inv[m] = -sum(H[k] * inv[m - k] for k in range(1, min(m, len(H) - 1) + 1))
    return inv  # coefficient of f^(m+1) is inv[m]


def spectral_coefficients(h_coords, eigens) -> list[PadicScalar]:
    """``c_i = <h, phi_i> / <phi_i, phi_i>`` with ``phi_i = q + O(q^2)``."""
    out = []
    for e in eigens:
        phi = e.f_coords()
        if len(h_coords) < len(phi):
            raise TruncationMismatch("h has fewer coordinates than the eigenvectors")
        num = pairing(list(h_coords[:len(phi)]), phi, e.prime)
        if e.self_pairing.is_zero():
            raise DegeneratePairing(f"<phi_{e.index}, phi_{e.index}> vanishes to precision")
        out.append(num / e.self_pairing)
    return out


def radius_norm(coords, p: int, r) -> float:
    """Valuation of the sup norm at radius ``r`` of radius-0 coordinates."""
    e = Fraction(r) * scale_exponent(p)
    best = INF
    for i, x in enumerate(coords, 1):
        v = x.valuation if isinstance(x, PadicScalar) else rational_valuation(x, p)
        if isinstance(x, PadicScalar) and x.is_zero():
            v = x.absprec
        best = min(best, v - e * i)
    return best


def partial_sum_residuals(h_coords, eigens, coefficients, r) -> list:
    """Norm valuations of ``h - sum_{i<=m} c_i phi_i`` at radius ``r`` for ``m = 0..len``."""
    p = eigens[0].prime
    n = len(eigens[0].coords)
    resid = [x if isinstance(x, PadicScalar)
             else PadicScalar.from_rational(x, p, absprec=10 ** 6) if x else PadicScalar.zero(p)
             for x in h_coords[:n]]
    out = [radius_norm(resid, p, r)]
    for e, c in zip(eigens, coefficients):
        resid = [a - c * b for a, b in zip(resid, e.f_coords())]
        out.append(radius_norm(resid, p, r))
    return out


def iterate_projection(h_coords, U, lam: PadicScalar, steps: int) -> list[PadicScalar]:
    """``(U/lam)^steps h`` on radius-0 coordinates; tends to the first spectral projection."""
    U0 = rescale(U, 0) if U.radius else U
    p = U0.p
    v = [PadicScalar.from_rational(x, p, absprec=lam.absprec + 10 * steps) if x
         else PadicScalar.zero(p) for x in h_coords[:U0.n]]
    inv = lam.inverse()
    rows = U0.rows()
    for _ in range(steps):
        new = []
        for row in rows:
            acc = PadicScalar.zero(p)
            for a, x in zip(row, v):
                if a and not (x.is_zero() and x.absprec == INF):
                    acc = acc + x * a
            new.append(acc * inv)
        v = new
    return v
