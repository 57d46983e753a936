import pytest
from gmpy2 import mpq

from orbhae import freering as fr
from orbhae.freering import Elem, evaluate_to_series
from orbhae.rmatrix import (
    DepthError, FrobeniusData, NormalizationError, PolynomialityError, build_rtable,
    derivative_lemmas, flatness_residuals, row0_is_laurent, solve_d_laurent,
    symplectic_residual, symplectic_residual_direct,
)

K = 8


def all_zero(mat, N=None):
    for row in mat:
        for x in row:
            x = x.truncate(N) if N is not None else x
            if not x.is_zero():
                return False
    return True


def test_frobenius_data():
    F = FrobeniusData()
    assert all(r.is_zero() for r in F.orthonormality_residual())
    base = F.base_case()
    assert all(x == 1 for row in base for x in row)


def test_shown_and_lifted_psi_agree():
    F = FrobeniusData()
    for i in range(5):
        for j in range(5):
            assert F.psi_shown[i][j] == F.Psi[i][j]


def test_level_zero(table):
    assert all(table.P(0, i, j) == 1 for i in range(5) for j in range(5))


def test_first_row_zero_entry(table):
    assert table.row0(1) == Elem.monomial(mpq(3, 12500), L=4)


@pytest.mark.parametrize("k", range(K + 1))
def test_flatness_symbolic(table, k):
    for col in flatness_residuals(table, k, "sym"):
        assert all(r.is_zero() for r in col)


@pytest.mark.parametrize("k", range(K + 1))
def test_flatness_series(table, mirror, k):
    for col in flatness_residuals(table, k, "ser"):
        assert all(r.truncate(mirror.N).is_zero() for r in col)


@pytest.mark.parametrize("k", range(K + 1))
def test_row_zero_laurent(table, k):
    assert row0_is_laurent(table, k)


@pytest.mark.parametrize("k", range(1, K + 1))
def test_symplectic(table, mirror, k):
    assert all_zero(symplectic_residual(table, k, "sym"))
    assert all_zero(symplectic_residual(table, k, "ser"), mirror.N)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_symplectic_direct_oracle(table, k):
    assert all_zero(symplectic_residual_direct(table.sym, k, fr.ZERO))


@pytest.mark.parametrize("k", range(K + 1))
def test_series_table_is_the_evaluated_symbolic_table(table, mirror, k):
    for i in range(5):
        for j in range(5):
            diff = evaluate_to_series(table.P(k, i, j), mirror) - table.P(k, i, j, "ser")
            assert diff.truncate(mirror.N).is_zero()


def test_derivative_lemmas(table):
    for k in range(K + 1):
        for i in range(5):
            for j in range(5):
                assert derivative_lemmas(table, k, i, j) == (True, True), (k, i, j)


def test_column_uniform_by_default(table):
    assert table.column_uniform()
    assert all(c == 0 for k in range(1, K + 1, 2) for c in table.constants[k])


def test_odd_constants_are_a_free_choice():
    t = build_rtable(4, odd_constants={1: 2})
    assert all(c == 2 for c in t.constants[1])
    for k in range(1, 5):
        assert all_zero(symplectic_residual(t, k))
        for col in flatness_residuals(t, k):
            assert all(r.is_zero() for r in col)


def test_strict_policy_refuses_odd_levels():
    with pytest.raises(NormalizationError):
        build_rtable(2, odd_constants="strict")


@pytest.mark.parametrize("level", [2, 4, 6])
def test_poisoned_constant_breaks_symplecticity(level):
    t = build_rtable(K, poison=(level, 0, 1))
    assert not all_zero(symplectic_residual(t, level))
    assert not t.column_uniform()
    # the flatness recursion itself still holds, so only the symplectic check sees it
    for col in flatness_residuals(t, level):
        assert all(r.is_zero() for r in col)


def test_poison_beyond_depth_rejected():
    with pytest.raises(ValueError):
        build_rtable(3, poison=(5, 0, 1))


def test_depth_error_names_level(table):
    with pytest.raises(DepthError) as exc:
        table.P(K + 1, 0, 0)
    assert str(K + 1) in str(exc.value)


def test_d_laurent_solver():
    f = Elem.monomial(2, L=3) - Elem.monomial(mpq(1, 7), L=-2)
    assert solve_d_laurent(fr.d_derive(f)) == f
    with pytest.raises(PolynomialityError):
        solve_d_laurent(fr.A1)
