from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from overconv.errors import SingularMinor
from overconv.spectral.charseries import char_series
from overconv.spectral.ldu import (conjecture_check, congruence_interval, diagonal_closed_form,
                                   diagonal_newton_polygon, ldu, slope_closed_form, transport)
from overconv.uoperator import u_matrix

square = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.lists(st.integers(-99, 99), min_size=n, max_size=n),
                       min_size=n, max_size=n))


def det(M):
    """Fraction-valued Gaussian elimination with row swaps."""
    M = [[Fraction(x) for x in r] for r in M]
    n, sign, out = len(M), 1, Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if M[i][k]), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
            sign = -sign
        out *= M[k][k]
        for i in range(k + 1, n):
            m = M[i][k] / M[k][k]
            M[i] = [a - m * b for a, b in zip(M[i], M[k])]
    return sign * out


def minors_ratio(M, k):
    """``D_kk`` as a ratio of leading principal minors."""
    lead = lambda m: det([r[:m] for r in M[:m]]) if m else Fraction(1)  # noqa: E731
    return lead(k) / lead(k - 1)


@settings(max_examples=100, deadline=None)
@given(square)
def test_reconstruction_and_shape(M):
    n = len(M)
    assume(all(det([r[:k] for r in M[:k]]) for k in range(1, n + 1)))
    f = ldu(M)
    assert f.product() == [[Fraction(x) for x in r] for r in M]
    for i in range(n):
        assert f.A[i][i] == 1 and f.B[i][i] == 1
        assert all(f.A[i][j] == 0 for j in range(i + 1, n))
        assert all(f.B[i][j] == 0 for j in range(i))
    prod = Fraction(1)
    for d in f.D:
        prod *= d
    assert prod == det(M)


def test_one_by_one():
    f = ldu([[7]])
    assert f.D == (7,) and f.A == ((1,),) and f.B == ((1,),)


def test_singular_minor():
    with pytest.raises(SingularMinor) as exc:
        ldu([[1, 2, 0], [2, 4, 1], [0, 1, 1]])
    assert exc.value.k == 2


def test_first_diagonal_entries():
    assert ldu(u_matrix(2, 3)).D[:2] == (24, Fraction(3200, 3))
    assert ldu(u_matrix(3, 3)).D[0] == 90


@pytest.mark.parametrize("p", [2, 3, 5])
def test_diagonal_is_ratio_of_minors(p):
    U = u_matrix(p, 8)
    rows = U.rows()
    assert list(ldu(U).D) == [minors_ratio(rows, k) for k in range(1, 9)]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_diagonal_closed_form(p):
    D = ldu(u_matrix(p, 12)).D
    assert [D[i - 1] for i in range(1, 13)] == [diagonal_closed_form(p, i) for i in range(1, 13)]


@pytest.mark.parametrize("p,r", [(2, Fraction(1, 2)), (5, Fraction(1, 3)), (13, 1)])
def test_transport_matches_factoring_rescaled_matrix(p, r):
    U0 = u_matrix(p, 10)
    e = int(r * 12 / (p - 1))
    assert ldu(u_matrix(p, 10, r)) == transport(ldu(U0), e, p)


def test_slope_closed_form_values():
    assert [slope_closed_form(5, i) for i in (1, 2, 3)] == [1, 4, 5]
    assert [slope_closed_form(2, i) for i in (1, 2, 3)] == [3, 7, 13]
    with pytest.raises(ValueError):
        slope_closed_form(7, 1)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_newton_polygon_of_diagonal_matches_char_series(p):
    U = u_matrix(p, 20)
    ref = char_series(U).newton_polygon()
    got = diagonal_newton_polygon(ldu(U), p)
    assert got.vertices == ref.vertices


def test_factor_shape_p2():
    rep = conjecture_check(2, 24)
    assert rep.passed and rep.exact and rep.lemma_checked > 0


def test_factor_shape_p3():
    assert conjecture_check(3, 24).passed


def test_factor_shape_p5_valuation_mode_at_half():
    rep = conjecture_check(5, 24, Fraction(1, 2))
    assert not rep.exact and rep.passed


def test_factor_shape_p5_fails_at_interval_endpoint():
    rep = conjecture_check(5, 15, Fraction(1, 3))
    assert not rep.diagonal_failures
    assert ("B", 4, 6, 0) in rep.congruence_failures


def test_factor_shape_detects_wrong_radius():
    # at r = 0 the superdiagonal of B is far from integral
    rep = conjecture_check(2, 10, 0)
    assert rep.congruence_failures and not rep.diagonal_failures


def test_congruence_intervals():
    assert congruence_interval(2, 30) == (Fraction(5, 12), Fraction(7, 12))
    assert congruence_interval(3, 30) == (Fraction(1, 3), Fraction(2, 3))
    assert congruence_interval(5, 30) == (Fraction(1, 3), Fraction(2, 3))


def test_congruence_interval_needs_radius_zero():
    with pytest.raises(ValueError):
        congruence_interval(2, 5, u_matrix(2, 5, Fraction(1, 2)))
