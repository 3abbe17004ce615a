from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from overconv.errors import BaseRegionIncomplete, IrrationalScale
from overconv.hauptmodul import kernel_for_prime
from overconv.padic import valuation_of_rational
from overconv.qseries import U_on_qexp, hauptmodul_fp
from overconv.uoperator import (CACHE_ENV, UMatrix, cached_u_matrix, direct_base,
                                dumps_umatrix, loads_umatrix, radius_exponent, rescale,
                                support_violations, symmetry_check, u_direct, u_matrix,
                                u_recurrence)

PRIMES = [2, 3, 5, 7, 13]


def test_small_p2_matrix():
    assert u_direct(2, 3).rows() == [[24, 1, 0], [2048, 1152, 72], [0, 196608, 61440]]


def test_first_column_is_u_of_f():
    # U(f) = 24 f + 2048 f^2 + ... for p = 2, read off by hand from the q-expansion
    f = hauptmodul_fp(2, 9)
    Uf = U_on_qexp(f, 2)
    col = [row[0] for row in u_direct(2, 4).rows()]
    recon = sum((c * f ** (i + 1) for i, c in enumerate(col)), 0 * f).truncate(Uf.trunc)
    assert recon == Uf


def test_rescaled_p2_matrix():
    assert u_matrix(2, 3, Fraction(1, 2)).rows() == [
        [24, 64, 0], [32, 1152, 4608], [0, 3072, 61440]]


@pytest.mark.parametrize("p", PRIMES)
def test_recurrence_matches_direct_small(p):
    n = 2 * p + 4
    _, _, M = kernel_for_prime(p)
    assert u_recurrence(p, n, M, direct_base(p, n)) == u_direct(p, n)


def test_base_region_has_holes():
    base = direct_base(3, 6)
    assert base.u(4, 4) is None and base.u(3, 6) is not None


def test_recurrence_rejects_short_base():
    _, _, M = kernel_for_prime(2)
    with pytest.raises(BaseRegionIncomplete):
        u_recurrence(2, 8, M, direct_base(2, 5))


@pytest.mark.parametrize("p", PRIMES)
def test_integral_at_radius_zero(p):
    assert u_matrix(p, 12).is_integral()


def test_p5_integral_at_one_third():
    assert u_matrix(5, 20, Fraction(1, 3)).is_integral()


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([(2, 1), (3, 1), (5, 1), (7, 1), (13, 1)]),
       st.integers(0, 3), st.integers(0, 3))
def test_rescale_composes(pr, a, b):
    p, _ = pr
    step = Fraction(p - 1, 12)
    U0 = u_matrix(p, 8)
    ra, rb = a * step, b * step
    assert rescale(rescale(U0, ra), rb) == rescale(U0, rb)
    assert rescale(rescale(U0, ra), 0) == U0


def test_rescale_rule():
    U0 = u_matrix(5, 6)
    U = rescale(U0, Fraction(1, 3))
    for i in range(1, 7):
        for j in range(1, 7):
            assert U.u(i, j) == Fraction(5) ** (j - i) * U0.u(i, j)


def test_irrational_scale():
    assert radius_exponent(5, Fraction(1, 3)) == 1
    assert radius_exponent(2, Fraction(1, 2)) == 6
    with pytest.raises(IrrationalScale):
        radius_exponent(5, Fraction(1, 2))
    with pytest.raises(IrrationalScale):
        u_matrix(7, 4, Fraction(1, 3))


@pytest.mark.parametrize("p", PRIMES)
def test_support_band(p):
    assert support_violations(u_matrix(p, 30)) == []


def test_support_detects_planted_entry():
    U = u_matrix(2, 6)
    rows = U.rows()
    rows[0][5] = 1
    bad = UMatrix(2, 6, tuple(tuple(r) for r in rows))
    assert support_violations(bad) == [(1, 6)]


@pytest.mark.parametrize("p", PRIMES)
def test_symmetry(p):
    rep = symmetry_check(u_matrix(p, 25))
    assert rep.passed and rep.checked == 25 * 24 // 2


def test_symmetry_on_rescaled_input():
    assert symmetry_check(u_matrix(2, 10, Fraction(1, 2))).passed


def test_symmetry_detects_perturbation():
    U = u_matrix(3, 6)
    rows = U.rows()
    rows[1][3] += 1
    rep = symmetry_check(UMatrix(3, 6, tuple(tuple(r) for r in rows)))
    assert not rep.passed and rep.first_violation == (2, 4)


def test_diagonal_valuations_p5():
    # the diagonal of U0 for p = 5 is where the small slopes come from
    U = u_matrix(5, 3)
    assert [valuation_of_rational(U.u(i, i), 5) for i in (1, 2, 3)] == [1, 4, 5]


def test_serialization_round_trip():
    U = u_matrix(5, 8, Fraction(1, 3))
    text = dumps_umatrix(U)
    assert loads_umatrix(text) == U
    assert dumps_umatrix(loads_umatrix(text)) == text


def test_serialization_rejects_foreign_schema():
    with pytest.raises(ValueError):
        loads_umatrix('{"schema": "other"}')


def test_cache_directory(tmp_path):
    U = cached_u_matrix(3, 7, Fraction(1, 2), directory=tmp_path)
    path = tmp_path / "umatrix_p3_n7.json"
    assert path.exists() and U == u_matrix(3, 7, Fraction(1, 2))
    first = path.read_bytes()
    assert cached_u_matrix(3, 7, 0, directory=tmp_path) == u_matrix(3, 7)
    assert path.read_bytes() == first


def test_cache_env(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    cached_u_matrix(2, 5)
    assert (tmp_path / "umatrix_p2_n5.json").exists()


def test_cache_hit_is_used(tmp_path):
    # a planted file is returned as is, which shows it is read rather than recomputed
    U = u_matrix(2, 4)
    rows = U.rows()
    rows[0][0] = 7
    planted = UMatrix(2, 4, tuple(tuple(r) for r in rows))
    (tmp_path / "umatrix_p2_n4.json").write_text(dumps_umatrix(planted))
    assert cached_u_matrix(2, 4, directory=tmp_path).u(1, 1) == 7
