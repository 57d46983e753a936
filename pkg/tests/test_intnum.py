from fractions import Fraction
from math import factorial

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from orbhae.intnum import UnstableError, clear_memo, load_memo, psi_integral, save_memo


@st.composite
def stable_keys(draw, g_max=3):
    """A genus and exponent multiset with sum = 3g - 3 + n (a nonzero-dimension match)."""
    g = draw(st.integers(0, g_max))
    n = draw(st.integers(1 if g else 3, 5))
    dim = 3 * g - 3 + n
    cuts = sorted(draw(st.lists(st.integers(0, dim), min_size=n - 1, max_size=n - 1)))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [dim])]
    return g, tuple(parts)


def test_base_values():
    assert psi_integral(0, (0, 0, 0)) == 1
    assert psi_integral(1, (1,)) == mpq(1, 24)
    assert psi_integral(2, (4,)) == mpq(1, 1152)


@pytest.mark.parametrize("g", [1, 2, 3, 4])
def test_one_point_formula(g):
    assert psi_integral(g, (3 * g - 2,)) == mpq(1, 24**g * factorial(g))


def test_known_values():
    assert psi_integral(2, (2, 3)) == mpq(29, 5760)
    assert psi_integral(2, (2, 2, 2)) == mpq(7, 240)
    assert psi_integral(3, (2,) * 6) == mpq(1225, 144)
    assert psi_integral(1, (1, 1)) == mpq(1, 24)


def test_dimension_mismatch_vanishes():
    assert psi_integral(2, (1, 1)) == 0
    assert psi_integral(0, (1, 0, 0, 0, 0)) == 0


@given(stable_keys())
def test_string_equation(key):
    g, a = key
    lhs = psi_integral(g, a + (0,))
    rhs = sum(
        (psi_integral(g, a[:i] + (a[i] - 1,) + a[i + 1:]) for i in range(len(a)) if a[i] > 0),
        mpq(0),
    )
    assert lhs == rhs


@given(stable_keys())
def test_dilaton_equation(key):
    g, a = key
    assert psi_integral(g, a + (1,)) == (2 * g - 2 + len(a)) * psi_integral(g, a)


@given(st.integers(3, 7).flatmap(
    lambda n: st.lists(st.integers(0, n - 3), min_size=n, max_size=n).filter(lambda a: sum(a) == n - 3)))
def test_genus_zero_multinomial(a):
    n = len(a)
    want = Fraction(factorial(n - 3))
    for x in a:
        want /= factorial(x)
    assert psi_integral(0, a) == mpq(want)


def test_symmetric_in_exponents():
    assert psi_integral(2, (3, 1, 2)) == psi_integral(2, (1, 2, 3))


def test_unstable_rejected():
    with pytest.raises(UnstableError):
        psi_integral(0, (0, 0))
    with pytest.raises(UnstableError):
        psi_integral(1, ())
    with pytest.raises(ValueError):
        psi_integral(1, (-1, 2))


def test_memo_round_trip(tmp_path):
    psi_integral(3, (2, 2, 2, 2, 2, 2))
    save_memo(tmp_path)
    clear_memo()
    assert load_memo(tmp_path) > 0
    assert psi_integral(3, (2,) * 6) == mpq(1225, 144)
