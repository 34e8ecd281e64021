"""Exact arithmetic in Q(sqrt(m)).

Tree-model measures, lambda values and matrix coefficients are all of the
form ``x + y*sqrt(m)`` with ``m = 2k - 1``; keeping them exact makes every
sum independent of summation order.
"""
from __future__ import annotations

from fractions import Fraction
from functools import total_ordering
from math import isqrt

from mpmath import mp, mpf, sqrt as mp_sqrt


def _is_square(m: int) -> bool:
    r = isqrt(m)
    return r * r == m


@total_ordering
class ExactScalar:
    __slots__ = ('_x', '_y', '_m')

    def __init__(self, x=0, y=0, m: int = 1) -> None:
        if m < 1:
            raise ValueError('radicand must be a positive integer')
        x = Fraction(x)
        y = Fraction(y)
        if y and _is_square(m):
            # sqrt(m) is rational: fold it into x
            x += y * isqrt(m)
            y = Fraction(0)
        self._x = x
        self._y = y
        self._m = m

    @property
    def x(self) -> Fraction:
        return self._x

    @property
    def y(self) -> Fraction:
        return self._y

    @property
    def m(self) -> int:
        return self._m

    @classmethod
    def from_rational(cls, value, m: int) -> ExactScalar:
        return cls(value, 0, m)

    @classmethod
    def half_power(cls, m: int, n: int) -> ExactScalar:
        """Return ``m ** (n / 2)`` exactly, for any integer ``n``."""
        q, r = divmod(n, 2)
        base = Fraction(m) ** q
        if r:
            return cls(0, base, m)
        return cls(base, 0, m)

    def _coerce(self, other) -> ExactScalar | None:
        if isinstance(other, ExactScalar):
            if other._m != self._m and other._y and self._y:
                raise ValueError('cannot mix Q(sqrt(%d)) and Q(sqrt(%d))'
                                 % (self._m, other._m))
            if other._m != self._m:
                if other._y:
                    return other
                return ExactScalar(other._x, 0, self._m)
            return other
        if isinstance(other, (int, Fraction)):
            return ExactScalar(other, 0, self._m)
        return None

    def _field(self, other: ExactScalar) -> int:
        return self._m if self._y or not other._y else other._m

    def __repr__(self) -> str:
        return 'ExactScalar(%s, %s, m=%d)' % (self._x, self._y, self._m)

    def __str__(self) -> str:
        if not self._y:
            return str(self._x)
        if not self._x:
            return '%s*sqrt(%d)' % (self._y, self._m)
        return '%s%+s*sqrt(%d)' % (self._x, self._y, self._m)

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._x == o._x and self._y == o._y

    def __hash__(self) -> int:
        if not self._y:
            return hash(self._x)
        return hash((self._x, self._y, self._m))

    def sign(self) -> int:
        x, y = self._x, self._y
        sx = (x > 0) - (x < 0)
        sy = (y > 0) - (y < 0)
        if sx == sy or sy == 0:
            return sx
        if sx == 0:
            return sy
        # opposite signs: compare x^2 with m*y^2
        diff = x * x - self._m * y * y
        if diff == 0:
            return 0
        return sx if diff > 0 else sy

    def __lt__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __bool__(self) -> bool:
        return bool(self._x) or bool(self._y)

    def __neg__(self) -> ExactScalar:
        return ExactScalar(-self._x, -self._y, self._m)

    def __abs__(self) -> ExactScalar:
        return -self if self.sign() < 0 else self

    def __add__(self, other) -> ExactScalar:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExactScalar(self._x + o._x, self._y + o._y, self._field(o))

    __radd__ = __add__

    def __sub__(self, other) -> ExactScalar:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ExactScalar(self._x - o._x, self._y - o._y, self._field(o))

    def __rsub__(self, other) -> ExactScalar:
        return (-self) + other

    def __mul__(self, other) -> ExactScalar:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        m = self._field(o)
        x = self._x * o._x + m * self._y * o._y
        y = self._x * o._y + self._y * o._x
        return ExactScalar(x, y, m)

    __rmul__ = __mul__

    def conjugate(self) -> ExactScalar:
        return ExactScalar(self._x, -self._y, self._m)

    def norm(self) -> Fraction:
        return self._x * self._x - self._m * self._y * self._y

    def inverse(self) -> ExactScalar:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError('ExactScalar division by zero')
        return ExactScalar(self._x / n, -self._y / n, self._m)

    def __truediv__(self, other) -> ExactScalar:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other) -> ExactScalar:
        return self.inverse() * other

    def __pow__(self, n: int) -> ExactScalar:
        if n < 0:
            return self.inverse() ** -n
        result = ExactScalar(1, 0, self._m)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def sqrt_free(self) -> bool:
        return not self._y

    def to_fraction(self) -> Fraction:
        if self._y:
            raise ValueError('%s is irrational' % self)
        return self._x

    def __float__(self) -> float:
        # round-to-nearest at emission time; evaluate with guard digits
        if not self._y:
            return float(self._x)
        with mp.workprec(200):
            v = (mpf(self._x.numerator) / self._x.denominator
                 + mpf(self._y.numerator) / self._y.denominator
                 * mp_sqrt(self._m))
            return float(v)
