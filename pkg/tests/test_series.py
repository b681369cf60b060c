from fractions import Fraction

import pytest
from helpers import NaiveRing
from hypothesis import given
from hypothesis import strategies as st

from kisinram.algebra import standard_field
from kisinram.algebra.series import INF, PuiseuxSeries, USeries, series_invert
from kisinram.errors import KisinRamError

F3 = standard_field(3, 1)
F9 = standard_field(3, 2)


@st.composite
def series(draw, field=F3, dens=(1, 2, 3, 6), integral=False):
    den = 1 if integral else draw(st.sampled_from(dens))
    n = draw(st.integers(0, 6))
    terms = {}
    for _ in range(n):
        k = draw(st.integers(0, 12))
        c = draw(st.lists(st.integers(0, field.p - 1), min_size=field.m, max_size=field.m))
        terms[Fraction(k, den)] = field(c)
    prec = draw(st.one_of(st.just(INF), st.integers(1, 4)))
    cls = USeries if integral else PuiseuxSeries
    return cls(field, terms, prec)


def as_dict(s, field):
    return NaiveRing(field).series(s, field)


@given(series(), series())
def test_product_matches_naive_oracle(a, b):
    prod = a * b
    ring = NaiveRing(F3)
    va, vb = a.valuation_lower_bound(), b.valuation_lower_bound()
    prec = min(a.prec + vb, b.prec + va)
    assert prod.prec == prec
    want = ring.mul(as_dict(a, F3), as_dict(b, F3), prec)
    assert as_dict(prod, F3) == want


@given(series(field=F9), series(field=F9))
def test_product_over_extension_matches_naive_oracle(a, b):
    ring = NaiveRing(F9)
    prod = a * b
    assert as_dict(prod, F9) == ring.mul(as_dict(a, F9), as_dict(b, F9), prod.prec)


@given(series(), series())
def test_sum_precision_and_terms(a, b):
    s = a + b
    assert s.prec == min(a.prec, b.prec)
    assert as_dict(s, F3) == NaiveRing(F3).add(
        as_dict(a.truncate(s.prec), F3), as_dict(b.truncate(s.prec), F3)
    )


@given(series())
def test_frobenius_is_pth_power_and_pth_root_inverts_it(a):
    assert (a ** 3).agrees_with(a.frobenius())
    assert a.frobenius().prec == 3 * a.prec
    assert a.frobenius().pth_root() == a


@given(series(integral=True))
def test_substitute_is_a_ring_map(a):
    b = a.substitute(2)
    assert (a * a).substitute(2).agrees_with(b * b)
    assert b.prec == 2 * a.prec


@given(series(integral=True))
def test_invert_units(a):
    unit = (a.shift(1) + USeries.constant(F3(2))).truncate(5)
    inv = series_invert(unit)
    one = unit * inv
    assert one.prec == unit.prec
    assert one.agrees_with(USeries.constant(F3.one))


def test_exact_inverse_needs_precision():
    f = USeries(F3, {0: 1, 1: 1})
    with pytest.raises(KisinRamError) as exc:
        series_invert(f)
    assert exc.value.code == "precision-exhausted"
    with pytest.raises(KisinRamError):
        series_invert(USeries(F3, {1: 1}, prec=4))


def test_precision_of_product_and_zero():
    a = PuiseuxSeries(F3, {Fraction(1, 2): 1}, prec=2)
    b = PuiseuxSeries(F3, {1: 1}, prec=3)
    assert (a * b).prec == min(2 + 1, 3 + Fraction(1, 2))
    z = PuiseuxSeries.zero(F3, prec=1)
    assert z.is_zero() and z.valuation() is None and z.valuation_lower_bound() == 1


def test_terms_at_or_above_precision_are_dropped():
    s = PuiseuxSeries(F3, {0: 1, Fraction(7, 3): 2, 3: 1}, prec=Fraction(7, 3))
    assert s.exponents() == [0]


def test_denominator_normalized():
    s = PuiseuxSeries(F3, {Fraction(2, 4): 1, Fraction(3, 2): 2})
    assert s.den == 2
    assert s.to_json() == [["1/2", 1], ["3/2", 2]]


def test_pth_root_denominator_cap():
    s = PuiseuxSeries(F3, {Fraction(1, 9): 1})
    with pytest.raises(KisinRamError) as exc:
        s.pth_root(cap=9)
    assert exc.value.code == "denominator-overflow"
    assert s.pth_root(cap=27).exponents() == [Fraction(1, 27)]


def test_useries_rejects_fractions_and_negative_exponents():
    with pytest.raises(KisinRamError):
        USeries(F3, {Fraction(1, 2): 1})
    with pytest.raises(KisinRamError):
        PuiseuxSeries(F3, {-1: 1})
    with pytest.raises(KisinRamError):
        USeries(F3, {1: 1}).shift(-2)


def test_field_mismatch_is_an_error():
    with pytest.raises(KisinRamError):
        USeries(F3, {0: 1}) + USeries(F9, {0: 1})


def test_agrees_with_uses_the_smaller_precision():
    a = USeries(F3, {0: 1, 3: 1}, prec=5)
    b = USeries(F3, {0: 1}, prec=3)
    assert a.agrees_with(b)
    assert not a.agrees_with(USeries(F3, {0: 1}, prec=4))
