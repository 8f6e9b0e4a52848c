from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from hodgecert.errors import DegreeMismatchError, NonHomogeneousError, ParseError
from hodgecert.poly import (Polynomial, count_monomials, euler_sum, format_polynomial, grevlex_key,
                            monomials_of_degree, mul, parse_polynomial, partials)

X = sympy.symbols("x0:4")


def to_sympy(f):
    return sympy.Add(*[c * sympy.Mul(*[X[i] ** a for i, a in enumerate(m)]) for m, c in f.terms.items()])


def forms(num_vars=3, max_deg=4):
    def make(deg, coeffs):
        monos = monomials_of_degree(num_vars, deg)
        return Polynomial({m: Fraction(c) for m, c in zip(monos, coeffs) if c}, num_vars)
    return st.integers(0, max_deg).flatmap(
        lambda d: st.lists(st.integers(-5, 5), min_size=count_monomials(num_vars, d),
                           max_size=count_monomials(num_vars, d)).map(lambda cs: make(d, cs)))


def test_monomial_counts():
    for n, e in [(4, 4), (6, 6), (3, 0), (5, 7)]:
        assert len(monomials_of_degree(n, e)) == count_monomials(n, e) == sympy.binomial(n + e - 1, e)


def test_grevlex_order():
    # grevlex on x0 > x1 > x2: x0^2 > x0x1 > x1^2 > x0x2 > x1x2 > x2^2
    expected = [(2, 0, 0), (1, 1, 0), (0, 2, 0), (1, 0, 1), (0, 1, 1), (0, 0, 2)]
    assert sorted(monomials_of_degree(3, 2), key=grevlex_key, reverse=True) == expected


def test_parse_format_roundtrip():
    f = parse_polynomial("x0^4 + x1^4 - 3/2*x0*x1^3", 2)
    assert format_polynomial(f) == "x0^4 - 3/2*x0*x1^3 + x1^4"
    assert parse_polynomial(format_polynomial(f), 2) == f
    assert parse_polynomial("2*x0 - 2*x0", 1).is_zero()


@pytest.mark.parametrize("text", ["", "x0^", "x7", "1/0*x0", "x0 +", "y0"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_polynomial(text, 2)


def test_degree_and_homogeneity():
    assert parse_polynomial("x0^2*x1 + x2^3", 3).degree == 3
    assert Polynomial.zero(2).degree is None
    with pytest.raises(NonHomogeneousError):
        parse_polynomial("x0^2 + x1", 2).degree
    with pytest.raises(DegreeMismatchError):
        mul(parse_polynomial("x0^2 + x1", 2), parse_polynomial("x0", 2))


@given(forms(), forms())
def test_mul_matches_sympy(f, g):
    assert sympy.expand(to_sympy(mul(f, g)) - to_sympy(f) * to_sympy(g)) == 0


@given(forms())
def test_partials_match_sympy(f):
    for i, df in enumerate(partials(f)):
        assert sympy.expand(to_sympy(df) - sympy.diff(to_sympy(f), X[i])) == 0


@given(forms())
def test_euler_identity(f):
    if f.is_zero():
        return
    assert euler_sum(f) == f.scale(f.degree)


@given(forms())
def test_format_roundtrip_property(f):
    assert parse_polynomial(format_polynomial(f), f.num_vars) == f
