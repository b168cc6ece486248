"""Exact arithmetic in the real quadratic field Q(sqrt5).

An element is stored as a pair of rationals ``(a, b)`` standing for
``a + b*sqrt5``.  Rationals are ``gmpy2.mpq`` which are always kept in lowest
terms with a positive denominator.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from gmpy2 import mpq, mpz

__all__ = ["ExactScalar", "PHI_PLUS", "PHI_MINUS", "SQRT5", "as_scalar", "to_mpq"]


def to_mpq(value) -> mpq:
    """Coerce an int / Fraction / mpq / 'p/q' string to ``mpq``."""
    if isinstance(value, type(mpq())):
        return value
    if isinstance(value, (int, type(mpz()))):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        return mpq(value.strip())
    if isinstance(value, Rational):
        return mpq(value.numerator, value.denominator)
    raise TypeError(f"cannot convert {value!r} to an exact rational")


class ExactScalar:
    """Element ``a + b*sqrt5`` of Q(sqrt5).

    Instances are immutable and hashable; equality is exact.
    """

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        object.__setattr__(self, "a", to_mpq(a))
        object.__setattr__(self, "b", to_mpq(b))

    def __setattr__(self, name, value):
        raise AttributeError("ExactScalar is immutable")

    @classmethod
    def _raw(cls, a: mpq, b: mpq) -> ExactScalar:
        obj = object.__new__(cls)
        object.__setattr__(obj, "a", a)
        object.__setattr__(obj, "b", b)
        return obj

    # -- predicates -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_rational(self) -> bool:
        return self.b == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def sign(self) -> int:
        """Sign of the real number ``a + b*sqrt5`` (-1, 0 or 1)."""
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        if (a > 0) == (b > 0):
            return 1 if a > 0 else -1
        # opposite signs: compare a^2 with 5 b^2
        if a * a > 5 * b * b:
            return 1 if a > 0 else -1
        return 1 if b > 0 else -1

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        o = as_scalar(other, strict=False)
        if o is None:
            return NotImplemented
        return ExactScalar._raw(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = as_scalar(other, strict=False)
        if o is None:
            return NotImplemented
        return ExactScalar._raw(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = as_scalar(other, strict=False)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return ExactScalar._raw(-self.a, -self.b)

    def __pos__(self):
        return self

    def __mul__(self, other):
        o = as_scalar(other, strict=False)
        if o is None:
            return NotImplemented
        a, b, c, d = self.a, self.b, o.a, o.b
        if b == 0 and d == 0:
            return ExactScalar._raw(a * c, b)
        return ExactScalar._raw(a * c + 5 * b * d, a * d + b * c)

    __rmul__ = __mul__

    def norm(self) -> mpq:
        """Field norm ``a^2 - 5 b^2`` (product with the conjugate)."""
        return self.a * self.a - 5 * self.b * self.b

    def conjugate(self) -> ExactScalar:
        """Galois conjugate, sqrt5 -> -sqrt5."""
        return ExactScalar._raw(self.a, -self.b)

    def inverse(self) -> ExactScalar:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt5)")
        return ExactScalar._raw(self.a / n, -self.b / n)

    def __truediv__(self, other):
        o = as_scalar(other, strict=False)
        if o is None:
            return NotImplemented
        if o.b == 0:
            if o.a == 0:
                raise ZeroDivisionError("division by zero in Q(sqrt5)")
            return ExactScalar._raw(self.a / o.a, self.b / o.a)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = as_scalar(other, strict=False)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison / hashing ----------------------------------------------
    def __eq__(self, other):
        o = as_scalar(other, strict=False)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if self.b == 0:
            return hash(Fraction(int(self.a.numerator), int(self.a.denominator)))
        return hash((int(self.a.numerator), int(self.a.denominator),
                     int(self.b.numerator), int(self.b.denominator)))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    # -- text -------------------------------------------------------------
    def __str__(self):
        return format_scalar(self.a, self.b)

    def __repr__(self):
        return f"ExactScalar({self})"

    def __float__(self):
        return float(self.a) + float(self.b) * 5 ** 0.5


def _fmt_q(q: mpq) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_scalar(a: mpq, b: mpq) -> str:
    """Canonical text: ``a/b``, ``c/d*sqrt5`` or ``a/b+c/d*sqrt5``."""
    if b == 0:
        return _fmt_q(a)
    irr = f"{_fmt_q(b)}*sqrt5"
    if a == 0:
        return irr
    return f"{_fmt_q(a)}{'+' if b > 0 else ''}{irr}"


def as_scalar(value, strict: bool = True) -> ExactScalar | None:
    """Coerce ints, rationals and ExactScalar to ExactScalar."""
    if isinstance(value, ExactScalar):
        return value
    try:
        return ExactScalar._raw(to_mpq(value), mpq(0))
    except TypeError:
        if strict:
            raise
        return None


ZERO = ExactScalar(0, 0)
ONE = ExactScalar(1, 0)
SQRT5 = ExactScalar(0, 1)
PHI_PLUS = ExactScalar(mpq(1, 2), mpq(1, 2))
PHI_MINUS = ExactScalar(mpq(1, 2), mpq(-1, 2))
