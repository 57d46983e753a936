from fractions import Fraction
from math import comb

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from orbhae.cyclo import ZETA
from orbhae.series import PrecisionError, Series, const, x_series

ORDER = 14
rat = st.fractions(min_value=-9, max_value=9, max_denominator=7)


def series_st(val_min=0, unit=False):
    def build(cs, val):
        if unit:
            cs = [Fraction(1)] + cs[1:]
        return Series([mpq(c) for c in cs], ORDER, val)
    return st.builds(build, st.lists(rat, min_size=ORDER + 1, max_size=ORDER + 1),
                     st.integers(val_min, 2) if not unit else st.just(0))


plain = series_st()
units = series_st(unit=True)


def test_reversion_against_catalan_numbers():
    # y = x - x^2 inverts to sum C_{k-1} x^k with Catalan C
    f = Series([0, 1, -1], 20)
    g = f.revert()
    catalan = [comb(2 * k, k) // (k + 1) for k in range(20)]
    assert g.dense(20) == [0] + catalan[:20]
    assert f.compose(g) == x_series(20)


def test_binomial_power():
    x = x_series(12)
    half = (1 + x).frac_pow(mpq(1, 2))
    assert half * half == 1 + x
    third = (1 - 4 * x).frac_pow(mpq(-1, 2))
    assert third.dense(6) == [comb(2 * k, k) for k in range(7)]


@given(plain, plain, plain)
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)


@given(units)
def test_inverse(a):
    assert a * a.mul_inv() == 1


@given(plain, plain)
def test_leibniz(a, b):
    D = Series.d_op
    assert D(a * b) == D(a) * b + a * D(b)


@given(units, st.fractions(min_value=-3, max_value=3, max_denominator=5))
def test_frac_pow_exponent_law(a, p):
    p = mpq(p)
    assert a.frac_pow(p) * a.frac_pow(1 - p) == a


def test_precision_is_tracked():
    a = Series([1, 2, 3], 5)
    b = Series([0, 1], 3)
    assert (a + b).order == 3
    with pytest.raises(PrecisionError):
        (a * b)[7]


def test_negative_valuation_product():
    x = x_series(10)
    inv_x = x.mul_inv()
    assert inv_x.val == -1
    assert (inv_x * x) == 1


def test_cyclotomic_coefficients():
    s = Series([1, ZETA], 6)
    t = s.mul_inv()
    assert s * t == const(1, 6)
    assert t[3] == -(ZETA**3)
