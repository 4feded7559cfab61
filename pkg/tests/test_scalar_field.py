from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, strategies as st

from projcoh.scalar_field import (LAM, MU_, ONE, ZERO, ParamPoly, ParamRatFun, PoleError,
                                  as_ratfun, parse_rational, poly_gcd, rational_roots)

L, M = sp.symbols("lam mu")


def to_sympy(f: ParamRatFun):
    def poly(p):
        return sum(sp.Rational(c.numerator, c.denominator) * L ** a * M ** b
                   for (a, b), c in p.terms.items())
    return poly(f.num) / poly(f.den)


small = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def polys(draw, max_deg=2):
    terms = draw(st.dictionaries(st.tuples(st.integers(0, max_deg), st.integers(0, max_deg)),
                                 small, max_size=4))
    return ParamRatFun.from_poly(ParamPoly(terms))


@st.composite
def ratfuns(draw):
    num = draw(polys())
    den = draw(polys().filter(lambda p: not p.is_zero()))
    return num / den


def test_basic_cancellation():
    assert LAM / (LAM + 1) + 1 / (LAM + 1) == ONE
    assert (2 * LAM + 1) * (1 / (2 * LAM + 1)) == ONE
    assert (LAM * LAM - 1) / (LAM - 1) == LAM + 1


def test_zero_is_unique():
    z = LAM - LAM
    assert z.is_zero() and z == ZERO
    assert z.den.is_one()


def test_denominator_is_monic_and_coprime():
    f = (LAM + MU_) / (2 * LAM * LAM - 2 * MU_ * MU_)
    assert f.den.leading_term()[1] == 1
    assert poly_gcd(f.num, f.den).is_constant()
    assert f == ONE / (2 * (LAM - MU_))


def test_evaluate_and_pole():
    f = LAM * (LAM + 3) / 5
    assert f.evaluate({"λ": 2}) == 2
    with pytest.raises(PoleError) as err:
        (1 / (2 * LAM + 1)).evaluate({"λ": Fraction(-1, 2)})
    assert "2λ + 1" in str(err.value)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        LAM / ZERO


def test_rational_roots_with_residual():
    p = ((LAM + 1) ** 2 * (2 * LAM - 3) * (LAM * LAM - 2)).num
    res = rational_roots(p)
    assert res.roots == [Fraction(-1), Fraction(-1), Fraction(3, 2)]
    assert res.residual == (LAM * LAM - 2).num
    assert rational_roots((LAM * LAM + 1).num).roots == []
    with pytest.raises(ValueError):
        rational_roots(ZERO.num)


def test_parse_rational():
    assert parse_rational("-3/2") == Fraction(-3, 2)
    assert parse_rational(" 4 ") == 4
    for bad in ("x", "1/0", "1.5", ""):
        with pytest.raises(ValueError):
            parse_rational(bad)


def test_printing_is_unambiguous():
    assert str(1 / (2 * LAM + 1)) == "1/(2λ + 1)"
    assert str(LAM / 2) == "(1/2)λ"


@given(ratfuns(), ratfuns(), ratfuns())
def test_field_axioms(a, b, c):
    assert a + b == b + a
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a - a == ZERO
    if not a.is_zero():
        assert a * a.inverse() == ONE


@given(ratfuns(), ratfuns())
def test_agrees_with_sympy(a, b):
    for ours, theirs in ((a + b, to_sympy(a) + to_sympy(b)), (a * b, to_sympy(a) * to_sympy(b))):
        assert sp.cancel(to_sympy(ours) - theirs) == 0


@given(polys(), polys(), polys())
def test_gcd_matches_sympy(a, b, c):
    p, q = (a * c).num, (b * c).num
    if p.is_zero() or q.is_zero():
        return
    ours = to_sympy(ParamRatFun.from_poly(poly_gcd(p, q)))
    theirs = sp.gcd(to_sympy(ParamRatFun.from_poly(p)), to_sympy(ParamRatFun.from_poly(q)))
    assert sp.cancel(ours / theirs).is_number
