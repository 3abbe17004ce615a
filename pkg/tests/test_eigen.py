from fractions import Fraction

import pytest

from conftest import matches_golden
from overconv.errors import NonIsolatedRoot, PrecisionLoss
from overconv.padic import PadicScalar
from overconv.spectral.charseries import char_series
from overconv.spectral.eigen import eigen_slopes, eigen_solve, eigenvalue
from overconv.uoperator import u_matrix

THIRD = Fraction(1, 3)


def val(x):
    return x.absprec if x.is_zero() else x.valuation


def test_leading_coefficient_and_index(eigens5):
    for k, e in enumerate(eigens5, 1):
        assert e.index == k
        assert e.qexp[0].agrees_with(PadicScalar.from_rational(1, 5), 40)


def test_eigenvalue_valuation_is_slope(eigens5):
    assert [e.eigenvalue.valuation for e in eigens5] == [e.slope for e in eigens5]
    assert [e.slope for e in eigens5[:3]] == [1, 4, 5]


def test_eigenvector_equation(U5, eigens5):
    rows = U5.rows()
    for e in eigens5:
        lam, v = e.eigenvalue, e.coords
        for i, row in enumerate(rows):
            acc = PadicScalar.zero(5)
            for x, y in zip(row, v):
                if x:
                    acc = acc + y * x
            d = acc - lam * v[i]
            assert val(d) >= 40


def test_hecke_relation_on_q_expansion(eigens5):
    # U phi = lam phi reads a_{5m} = lam a_m on q-expansions
    for e in eigens5[:4]:
        for m in range(1, 5):
            assert val(e.qexp[5 * m - 1] - e.eigenvalue * e.qexp[m - 1]) >= 40


def test_first_function_first_coefficients(golden_eigen, eigens5):
    for m in range(20):
        assert matches_golden(eigens5[0].qexp[m], golden_eigen["phi"]["1"][m], 10)


def test_tiny_truncation_already_close():
    e = eigen_solve(u_matrix(5, 3, THIRD), 1, 20)[0]
    assert (e.qexp[1].residue(8) - 8528631) % 5 ** 8 == 0


def test_radius_does_not_change_the_function():
    a = eigen_solve(u_matrix(5, 20), 2, 20)
    b = eigen_solve(u_matrix(5, 20, THIRD), 2, 20)
    for x, y in zip(a, b):
        assert all(s.agrees_with(t, 20) for s, t in zip(x.qexp, y.qexp))
        for s, t in zip(x.f_coords(), y.f_coords()):
            assert s.agrees_with(t, 15)


def test_eigenvalue_is_a_root():
    cs = char_series(u_matrix(2, 15))
    lam = eigenvalue(cs, 1, 30)
    poly = cs.charpoly()
    acc = PadicScalar.zero(2)
    for c in reversed(poly):
        acc = acc * lam + c
    assert val(acc) >= 30


def test_p13_has_a_long_segment():
    U = u_matrix(13, 20)
    segs = eigen_slopes(char_series(U))
    assert segs[0] == (0, 1) and segs[5] == (5, 3)
    with pytest.raises(NonIsolatedRoot) as exc:
        eigen_solve(U, 6, 10)
    assert exc.value.length == 3


def test_p13_skip_and_note():
    notes = []
    got = eigen_solve(u_matrix(13, 20), 10, 10, skip_nonisolated=True, notes=notes)
    assert [e.index for e in got] == [1, 2, 3, 4, 5, 9, 10]
    assert len(notes) == 3 and "length 3" in notes[0]


def test_tight_working_precision_is_refused():
    with pytest.raises(PrecisionLoss):
        eigen_solve(u_matrix(5, 30, THIRD), 3, 30, working_prec=3)


def test_reduced_working_precision_is_reported():
    e = eigen_solve(u_matrix(5, 30, THIRD), 1, 30, working_prec=8)[0]
    assert min(x.absprec for x in e.qexp) < 30
    assert (e.qexp[1].residue(7) - 8528631) % 5 ** 7 == 0


def test_too_many_requested():
    with pytest.raises(ValueError):
        eigen_solve(u_matrix(5, 4), 5)
