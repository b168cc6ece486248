"""Arithmetic in Q(sqrt5): field axioms, ordering and a sympy oracle."""
from fractions import Fraction

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, strategies as st

from h4algebra.field import PHI_MINUS, PHI_PLUS, ExactScalar, as_scalar

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=30)
scalars = st.builds(lambda a, b: ExactScalar(mpq(a), mpq(b)), rationals, rationals)
nonzero = scalars.filter(bool)


def to_sympy(x: ExactScalar):
    return sympy.Rational(int(x.a.numerator), int(x.a.denominator)) + sympy.Rational(
        int(x.b.numerator), int(x.b.denominator)) * sympy.sqrt(5)


@given(scalars, scalars, scalars)
def test_ring_axioms(x, y, z):
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == 0


@given(nonzero)
def test_inverse(x):
    assert x * x.inverse() == 1
    assert x / x == 1


@given(scalars, scalars)
def test_product_matches_sympy(x, y):
    assert sympy.simplify(to_sympy(x * y) - to_sympy(x) * to_sympy(y)) == 0


@given(scalars, scalars)
def test_order_matches_real_embedding(x, y):
    if x != y:
        assert (x < y) == bool(to_sympy(x) < to_sympy(y))


@given(scalars)
def test_norm_is_product_with_conjugate(x):
    assert x * x.conjugate() == x.norm()


def test_golden_ratio_identities():
    assert PHI_PLUS * PHI_PLUS == PHI_PLUS + 1
    assert PHI_PLUS * PHI_MINUS == -1
    assert PHI_PLUS + PHI_MINUS == 1
    assert ExactScalar(0, 1) ** 2 == 5


def test_zero_division_raises():
    with pytest.raises(ZeroDivisionError):
        ExactScalar(0).inverse()


def test_as_scalar_accepts_ints_and_fractions():
    assert as_scalar(3) == ExactScalar(3)
    assert as_scalar(Fraction(1, 2)) == ExactScalar(mpq(1, 2))
    assert as_scalar(object(), strict=False) is None


def test_immutable():
    x = ExactScalar(1, 2)
    with pytest.raises(AttributeError):
        x.a = 3
