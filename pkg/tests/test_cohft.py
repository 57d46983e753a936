import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from orbhae import build_rtable
from orbhae.cohft import (
    Algebra, edge_lemmas, gw_expansion, hae_check, potential, required_depth, string_check,
    t_derivative,
)
from orbhae.freering import Elem, evaluate_to_series
from orbhae.rmatrix import INV, DepthError

F11 = (Elem.monomial(mpq(3, 5000), L=5, C1=-1) + Elem.monomial(mpq(1, 2), L=1, A2=1, C1=-1)
       + Elem.monomial(mpq(3, 2), L=1, A1=1, C1=-1))
F12 = (Elem.monomial(mpq(1, 2), L=2, A2=2, C1=-2) + Elem.monomial(mpq(3, 5000), L=6, A1=1, C1=-2)
       + Elem.monomial(mpq(1, 2), L=2, A1=1, A2=1, C1=-2) + Elem.monomial(2, L=2, A1=2, C1=-2))


def selection_allows(g, ins):
    return (3 * g - 3 + len(ins) + sum(INV[c] for c in ins)) % 5 == 0


@pytest.fixture(scope="module")
def cache(table):
    store = {}

    def get(g, ins, **kw):
        key = (g, tuple(ins), tuple(sorted(kw.items())))
        if key not in store:
            store[key] = potential(table, g, ins, **kw)
        return store[key]
    return get


def test_frozen_genus_one(cache):
    assert cache(1, (1,)).value == F11
    assert cache(1, (1, 1)).value == F12


def test_gw_expansion(cache, mirror):
    s = cache(1, (1,)).series(mirror)
    assert s.val == 9 and s[9] == mpq(97, 10125000000)
    gw = gw_expansion(s, mirror, 19)
    assert all(gw[d] == 0 for d in range(9))
    assert gw[9] == mpq(1358, 390625)
    assert gw[14] == mpq(-93640118, 244140625)
    assert gw[19] == mpq(30809584399768, 152587890625)
    assert all(gw[d] == 0 for d in range(20) if d % 5 != 4)


@pytest.mark.parametrize("g,ins", [(2, ()), (3, ()), (1, (2,)), (1, (2, 2)), (2, (1,)), (2, (1, 1))])
def test_forbidden_by_selection_rule(cache, g, ins):
    assert not selection_allows(g, ins)
    assert cache(g, ins).value.is_zero()


@settings(max_examples=25)
@given(st.integers(1, 2).flatmap(
    lambda g: st.tuples(st.just(g), st.lists(st.integers(0, 4), min_size=1, max_size=3 if g == 1 else 2))))
def test_selection_rule(cache, key):
    g, ins = key
    f = cache(g, tuple(sorted(ins)))
    if not selection_allows(g, ins):
        assert f.value.is_zero()


@settings(max_examples=20)
@given(st.lists(st.integers(0, 4), min_size=2, max_size=3))
def test_insertion_order_irrelevant(cache, ins):
    assert cache(1, tuple(ins)).value == cache(1, tuple(sorted(ins))).value


@pytest.mark.parametrize("g,ins", [(1, (1,)), (1, (1, 1)), (1, (3, 4)), (2, (4,))])
def test_engines_agree(cache, g, ins):
    ref = cache(g, ins, engine="character").value
    assert cache(g, ins, engine="explicit").value == ref
    assert cache(g, ins, engine="literal").value == ref


def test_engines_agree_on_column_dependent_table(mirror):
    t = build_rtable(4, mirror=mirror, poison=(2, 1, 1))
    assert not t.column_uniform()
    for ins in [(1,), (1, 1), (3, 4)]:
        a = potential(t, 1, ins, engine="explicit").value
        assert a == potential(t, 1, ins, engine="literal").value
    with pytest.raises(ValueError):
        potential(t, 1, (1,), engine="character")


@pytest.mark.parametrize("g,ins", [(1, (1,)), (1, (1, 1, 1)), (1, (3, 4)), (2, (4,))])
def test_series_pipeline(cache, table, mirror, g, ins):
    ser = potential(table, g, ins, kind="ser").value
    diff = evaluate_to_series(cache(g, ins).value, mirror) - ser
    assert diff.truncate(mirror.N).is_zero()


def test_parallel_matches_serial(cache, table):
    assert potential(table, 2, (4,), jobs=2).value == cache(2, (4,)).value


@pytest.mark.parametrize("k", [1, 2, 3])
def test_t_derivative_genus_one(cache, table, mirror, k):
    td = t_derivative(table, cache(1, (1,)), k, mirror=mirror)
    assert td["ring_equal"] and td["series_equal"]


def test_t_derivative_genus_two(cache, table, mirror):
    td = t_derivative(table, cache(2, (4,)), 1, mirror=mirror)
    assert not td["chain"].is_zero()
    assert td["ring_equal"] and td["series_equal"]


@pytest.mark.parametrize("g,ins", [(1, (1,)), (1, (3, 4)), (1, (2, 2)), (2, (4,))])
def test_string_equation(table, g, ins):
    assert string_check(table, g, ins)


def test_string_equation_needs_stable_base(table):
    with pytest.raises(ValueError):
        string_check(table, 0, (1, 4))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_c1_degree(cache, n):
    assert cache(1, (1,) * n).c1_degree() == (n, n)


def test_edge_lemmas(table):
    alg = Algebra(table)
    for b1 in range(5):
        for b2 in range(5 - b1):
            for p1 in range(5):
                for p2 in range(5):
                    assert edge_lemmas(alg, b1, b2, p1, p2) == {"A2": True, "D2A1": True, "swap": True}


@pytest.mark.parametrize("den", [3, 4, 6, 7])
def test_wrong_translation_denominator_breaks_t_derivative(table, mirror, den):
    f = potential(table, 1, (1,), t_denominator=den)
    td = t_derivative(table, f, 1, mirror=mirror, t_denominator=den)
    assert not td["ring_equal"]


def test_unshifted_translation_diagnostics(table, mirror):
    # the unshifted translation index keeps the first equation but loses the
    # T-derivative, and produces a nonzero F_2 against the selection rule
    kw = {"translation": "unshifted"}
    f = potential(table, 1, (1,), **kw)
    assert not t_derivative(table, f, 1, **kw)["ring_equal"]
    assert not potential(table, 2, (), **kw).value.is_zero()
    pots = {}
    assert hae_check(table, 2, mirror=mirror, pots=pots, **kw)["first"]["ring_zero"]
    assert not hae_check(table, 2, rhs_factor=1, pots=pots, **kw)["first"]["ring_zero"]


def test_depth_and_stability_errors(mirror):
    shallow = build_rtable(2)
    assert required_depth(2, 0) > 2
    with pytest.raises(DepthError):
        potential(shallow, 2, ())
    with pytest.raises(ValueError):
        potential(shallow, 0, (1, 1))
    with pytest.raises(ValueError):
        hae_check(shallow, 1)
