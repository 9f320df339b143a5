import cmath
import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, strategies as st

from tempgrowth.gaussian import QI, exact_nth_root, mpf_to_fraction, parse_qi

from conftest import gaussian


@pytest.mark.parametrize("text, expected", [
    ("3", QI(3)),
    ("-1/2", QI(Fraction(-1, 2))),
    ("2i", QI(0, 2)),
    ("1+2i", QI(1, 2)),
    ("1/2-3/4i", QI(Fraction(1, 2), Fraction(-3, 4))),
    ("-i", QI(0, -1)),
])
def test_parse_qi(text, expected):
    assert parse_qi(text) == expected


def test_parse_qi_rejects_garbage():
    with pytest.raises(ValueError):
        parse_qi("1+2j+")


def test_division_is_exact():
    a, b = QI(1, 2), QI(3, -1)
    assert (a / b) * b == a


def test_exact_roots():
    assert exact_nth_root(QI(4), 2) == QI(2)
    assert exact_nth_root(QI(-4), 2) == QI(0, 2)
    assert exact_nth_root(QI(0, 2), 2) == QI(1, 1)
    assert exact_nth_root(QI(2), 2) is None


@given(gaussian(nonzero=True), gaussian(nonzero=True))
def test_field_axioms(a, b):
    assert a * b == b * a
    assert (a + b) - b == a
    assert (a * b) / b == a
    assert (a * a.inverse()) == QI(1)


@given(gaussian(nonzero=True))
def test_format_roundtrip(a):
    assert parse_qi(str(a)) == a


@given(st.integers(-(2 ** 40), 2 ** 40), st.integers(0, 10))
def test_mpf_to_fraction_keeps_sign(num, k):
    x = Fraction(num, 2 ** k)
    assert mpf_to_fraction(mpmath.mpf(num) / 2 ** k) == x


@given(gaussian(nonzero=True), st.integers(1, 4))
def test_exact_root_of_principal_power(c, n):
    assume(-math.pi / n < cmath.phase(complex(c)) <= math.pi / n)
    assert exact_nth_root(c ** n, n) == c
