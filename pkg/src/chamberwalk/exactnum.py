"""Exact arithmetic in the quadratic extension Q(sqrt(q)).

Transition probabilities of the walks involve half-integer powers of the
regularity parameter q, so they are irrational for some ranks.  Representing
them as a + b*sqrt(q) with rational a, b keeps every kernel row and every
dynamic-programming mass exact.
"""

from __future__ import annotations

import math
from fractions import Fraction


class QSqrt:
    """An exact number a + b*sqrt(q) with a, b rational and q a fixed integer >= 1.

    If q is a perfect square the irrational part collapses and the value is an
    ordinary rational.  Mixed arithmetic with int/Fraction is supported.
    """

    __slots__ = ("a", "b", "q")

    def __init__(self, a, b=0, q=1):
        a = Fraction(a)
        b = Fraction(b)
        if q < 1:
            raise ValueError("q must be a positive integer")
        s = math.isqrt(q)
        if s * s == q:
            a, b, q = a + b * s, Fraction(0), 1
        if b == 0:
            q = 1
        self.a, self.b, self.q = a, b, q

    @classmethod
    def q_power(cls, q, half_exponent):
        """q ** (half_exponent / 2) with an integer half_exponent of either sign."""
        e = half_exponent
        if e % 2 == 0:
            return cls(Fraction(q) ** (e // 2))
        if e > 0:
            return cls(0, Fraction(q) ** ((e - 1) // 2), q)
        # q^(e/2) = q^((e-1)/2) * sqrt(q) with (e-1)/2 integral
        return cls(0, Fraction(q) ** ((e - 1) // 2), q)

    def _coerce(self, other):
        if isinstance(other, QSqrt):
            if self.b != 0 and other.b != 0 and self.q != other.q:
                raise ValueError("mixed radicands %d and %d" % (self.q, other.q))
            return other
        if isinstance(other, (int, Fraction)):
            return QSqrt(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return QSqrt(self.a + o.a, self.b + o.b, max(self.q, o.q))

    __radd__ = __add__

    def __neg__(self):
        return QSqrt(-self.a, -self.b, self.q)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        q = max(self.q, o.q)
        a = self.a * o.a + self.b * o.b * q
        b = self.a * o.b + self.b * o.a
        return QSqrt(a, b, q)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        # 1/(a + b sqrt q) = (a - b sqrt q)/(a^2 - b^2 q)
        d = o.a * o.a - o.b * o.b * o.q
        if d == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt q)")
        inv = QSqrt(o.a / d, -o.b / d, o.q)
        return self * inv

    def __rtruediv__(self, other):
        return QSqrt(other) / self

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self.a == o.a and self.b == o.b and (self.b == 0 or self.q == o.q)

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.q))

    def sign(self):
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return (b > 0) - (b < 0)
        s = a * a - b * b * self.q
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        if a > 0:  # b < 0
            return (s > 0) - (s < 0)
        return (s < 0) - (s > 0)  # a < 0, b > 0

    def __lt__(self, other):
        o = self._coerce(other)
        return (self - o).sign() < 0

    def __le__(self, other):
        o = self._coerce(other)
        return (self - o).sign() <= 0

    def __gt__(self, other):
        return not self <= other

    def __ge__(self, other):
        return not self < other

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.q)

    def __bool__(self):
        return self.a != 0 or self.b != 0

    @property
    def is_rational(self):
        return self.b == 0

    def as_fraction(self):
        if self.b != 0:
            raise ValueError("%r is irrational" % (self,))
        return self.a

    def __repr__(self):
        if self.b == 0:
            return "QSqrt(%s)" % (self.a,)
        return "QSqrt(%s + %s*sqrt(%d))" % (self.a, self.b, self.q)
