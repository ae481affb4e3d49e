from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from feynpoly.errors import ParseError, ZeroPolynomial
from feynpoly.poly import KinPoly, kin_space, parse_poly

SPACE = kin_space(3, 2)


def P(text, n=4, space=SPACE):
    return parse_poly(text, n, space)


def test_scalar_products_use_conservation():
    # q3 = -(q1 + q2)
    assert P("q3^2") == P("s11 + 2*s12 + s22")
    assert P("q1*q3") == P("-s11 - s12")
    assert P("(q1+q2)^2") == P("q3^2")


def test_mass_spellings():
    assert P("m1^2*a1") == P("msq1*a1") == P("m_1^2 a1")
    with pytest.raises(ParseError):
        P("m1*a1")


def test_implicit_multiplication_and_precedence():
    assert P("2 a1 a2 + a3^2") == P("2*a1*a2 + a3**2")
    assert P("-a1^2") == P("-(a1*a1)")
    assert P("a1/2 + a1/2") == P("a1")


@pytest.mark.parametrize("bad", ["a5", "a1 +", "q1*q2*q1", "x1", "s44", "(a1", "m3^2"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        P(bad)


def test_degrees_and_valuation():
    p = P("a1^2*a2 + s11*a3^3 + a2*a3*a4")
    assert p.degree() == 3 and p.is_homogeneous()
    assert p.valuation({1, 2}) == 0 and p.valuation({2, 3}) == 1
    assert p.max_degree_in(3) == 3
    with pytest.raises(ZeroPolynomial):
        KinPoly.zero(4, SPACE).degree()


def test_set_zero_and_coefficients():
    p = P("a1*a2 + a1*a3 + a2*a3")
    assert p.set_zero(3) == P("a1*a2")
    assert p.coefficient_of_power(3, 1) == P("a1 + a2")


def test_json_round_trip():
    p = P("3/2*s12*a1*a2 - msq2*a4^2 + 7")
    assert KinPoly.from_json(p.to_json()) == p


def test_evaluate():
    p = P("s11*a1 + msq1*a2^2")
    vals = [2.0, 0, 0, 5.0, 0]  # s11 s12 s22 msq1 msq2
    assert p.evaluate([1.0, 3.0, 0, 0], vals) == pytest.approx(2 + 45)


monomials = st.dictionaries(
    st.tuples(st.tuples(*[st.integers(0, 2)] * 4), st.tuples(*[st.integers(0, 1)] * len(SPACE))),
    st.fractions(max_denominator=5).filter(lambda c: c != 0),
    max_size=5,
)


def poly_of(terms):
    return KinPoly(4, SPACE, {k: (c.numerator if c.denominator == 1 else c) for k, c in terms.items()})


@settings(max_examples=80, deadline=None)
@given(monomials, monomials, monomials)
def test_ring_axioms(x, y, z):
    a, b, c = poly_of(x), poly_of(y), poly_of(z)
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a - a).is_zero()


@settings(max_examples=80, deadline=None)
@given(monomials)
def test_format_parse_round_trip(x):
    a = poly_of(x)
    assert parse_poly(a.to_string(), 4, SPACE) == a


def test_fraction_coefficients_format():
    a = KinPoly.const(4, SPACE, Fraction(-3, 4)) * KinPoly.alpha(4, SPACE, 2)
    assert parse_poly(a.to_string(), 4, SPACE) == a
