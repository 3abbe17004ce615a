from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import matches_golden
from overconv.errors import DegeneratePairing, NotCuspidal, TruncationMismatch
from overconv.padic import PadicScalar
from overconv.qseries import QSeries, hauptmodul_fp, j_invariant
from overconv.spectral.expansion import (express_in_f_basis, inverse_j_coords,
                                         inverse_j_coords_closed_form, iterate_projection,
                                         pairing, partial_sum_residuals, radius_norm,
                                         spectral_coefficients)
from overconv.uoperator import u_matrix

THIRD = Fraction(1, 3)


def val(x):
    return x.absprec if x.is_zero() else x.valuation


@pytest.fixture(scope="module")
def U2():
    return u_matrix(2, 20)


def apply(U, h):
    return [sum(Fraction(a) * b for a, b in zip(row, h)) for row in U.rows()]


class TestPairing:
    @pytest.mark.parametrize("p", [2, 3, 5, 7, 13])
    def test_basis_vectors(self, p):
        e = lambda i: [int(k == i) for k in range(4)]  # noqa: E731
        c = 12 // (p - 1)
        for i in range(4):
            for j in range(4):
                want = Fraction(i + 1, p ** (c * (i + 1))) if i == j else 0
                assert pairing(e(i), e(j), p) == want

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.integers(-1000, 1000), min_size=10, max_size=10),
           st.lists(st.integers(-1000, 1000), min_size=10, max_size=10))
    def test_u_is_self_adjoint(self, U2, h, k):
        # supported on f^1..f^10, so U h stays inside the 20x20 truncation
        h = h + [0] * 10
        k = k + [0] * 10
        assert pairing(apply(U2, h), k, 2) == pairing(h, apply(U2, k), 2)

    @given(st.lists(st.fractions(max_denominator=50), min_size=5, max_size=5),
           st.lists(st.fractions(max_denominator=50), min_size=5, max_size=5))
    def test_symmetric_and_bilinear(self, h, k):
        assert pairing(h, k, 3) == pairing(k, h, 3)
        assert pairing([2 * x for x in h], k, 3) == 2 * pairing(h, k, 3)

    def test_padic_inputs(self):
        h = [PadicScalar.from_rational(x, 5, relprec=20) for x in (1, 2, 3)]
        got = pairing(h, h, 5)
        assert got.agrees_with(PadicScalar.from_rational(pairing([1, 2, 3], [1, 2, 3], 5), 5,
                                                         relprec=40), 14)

    def test_length_mismatch(self):
        with pytest.raises(TruncationMismatch):
            pairing([1, 2], [1], 2)

    def test_distinct_eigenfunctions_are_orthogonal(self, eigens5):
        F = [e.f_coords() for e in eigens5]
        for i in range(len(F)):
            for j in range(len(F)):
                v = val(pairing(F[i], F[j], 5))
                if i == j:
                    assert v == val(eigens5[i].self_pairing) < 0
                else:
                    assert v >= 40


class TestCoordinates:
    @pytest.mark.parametrize("p", [2, 5, 13])
    def test_hauptmodul_is_first_basis_vector(self, p):
        assert express_in_f_basis(hauptmodul_fp(p, 12), p, 10) == [1] + [0] * 9

    @pytest.mark.parametrize("p", [2, 3, 5, 7, 13])
    def test_inverse_j_two_routes(self, p):
        a = inverse_j_coords(p, 25)
        assert a[0] == 1
        assert a == inverse_j_coords_closed_form(p, 25)

    def test_reconstruct_q_expansion(self):
        coords = inverse_j_coords(5, 15)
        f = hauptmodul_fp(5, 16)
        total = sum((c * f ** i for i, c in enumerate(coords, 1)), QSeries([], 0, 16))
        assert total == j_invariant(16).inverse().truncate(16)

    def test_not_cuspidal(self):
        with pytest.raises(NotCuspidal):
            express_in_f_basis(QSeries.one(10), 5, 5)

    def test_short_series(self):
        with pytest.raises(TruncationMismatch):
            express_in_f_basis(hauptmodul_fp(5, 5), 5, 10)


class TestSpectral:
    def test_eigenfunction_expands_to_itself(self, eigens5):
        c = spectral_coefficients(eigens5[0].f_coords(), eigens5)
        assert c[0].agrees_with(PadicScalar.from_rational(1, 5), 30)
        assert all(val(x) >= 40 for x in c[1:])

    def test_inverse_j_table(self, eigens5, golden_spectral):
        c = spectral_coefficients(inverse_j_coords(5, 30), eigens5)
        for x, want in zip(c, golden_spectral["c"]):
            assert matches_golden(x, want, 10)

    def test_iteration_converges_to_first_projection(self, U5, eigens5):
        h = inverse_j_coords(5, 30)
        c1 = spectral_coefficients(h, eigens5[:1])[0]
        it = iterate_projection(h, U5, eigens5[0].eigenvalue, 20)
        for a, b in zip(it, eigens5[0].f_coords()):
            target = c1 * b
            assert val(a - target) - val(target) >= 8

    def test_iteration_kills_second_eigenfunction(self, U5, eigens5):
        phi2 = [x.lift() for x in eigens5[1].f_coords()]
        it = iterate_projection(phi2, U5, eigens5[0].eigenvalue, 10)
        # each step divides by lambda_1/lambda_2, of valuation 3
        assert radius_norm(it, 5, THIRD) >= radius_norm(phi2, 5, THIRD) + 25

    def test_degenerate_pairing(self, eigens5):
        bad = replace(eigens5[0], self_pairing=PadicScalar.zero(5, 10))
        with pytest.raises(DegeneratePairing):
            spectral_coefficients(inverse_j_coords(5, 30), [bad])

    def test_short_input(self, eigens5):
        with pytest.raises(TruncationMismatch):
            spectral_coefficients([1, 2, 3], eigens5[:1])

    def test_residuals_follow_the_projections(self, eigens5):
        h = inverse_j_coords(5, 30)
        c = spectral_coefficients(h, eigens5)
        res = partial_sum_residuals(h, eigens5, c, THIRD)
        assert res == [-1, 2, 2, 5, 5, 7, 8, 10, 12, 14, 14]
        assert all(a <= b for a, b in zip(res, res[1:]))
        proj = [radius_norm([x * y for y in e.f_coords()], 5, THIRD) for x, e in zip(c, eigens5)]
        # the residual after m terms is the largest remaining projection
        for m in range(9):
            assert res[m] == min(proj[m:])

    def test_radius_norm(self):
        assert radius_norm([5, 0, Fraction(1, 25)], 5, 0) == -2
        assert radius_norm([5, 0, Fraction(1, 25)], 5, THIRD) == -5
        assert radius_norm([PadicScalar.zero(5, 7)], 5, 0) == 7


def test_strictness_depends_on_radius(eigens5):
    # equal projection norms at r = 0 and r >= 1/3 are split for radii in between
    h = inverse_j_coords(5, 30)
    c = spectral_coefficients(h, eigens5)

    def strict(r):
        res = partial_sum_residuals(h, eigens5, c, r)[:9]
        return all(a < b for a, b in zip(res, res[1:]))

    assert [strict(r) for r in (0, Fraction(1, 4), THIRD, Fraction(1, 2))] == [
        False, True, False, False]
