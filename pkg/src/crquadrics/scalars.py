"""Exact complex scalars: Gaussian rationals and their sqrt(2)-extension.

QQi is the workhorse coefficient type for polynomials, structure constants
and points.  Sqrt2Ext = QQi + QQi*sqrt(2) only enters through the Cayley
transform, whose formulas carry a factor sqrt(2); mixed arithmetic promotes
QQi operands automatically via the reflected dunder methods.
"""

from __future__ import annotations

import numbers

from .rationals import QQ, QQ0, QQ1, bit_size, qq, qq_str

_RAT_TYPES = (int, type(QQ0), numbers.Rational)


class QQi:
    """A Gaussian rational re + im*i with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = qq(re)
        self.im = qq(im)

    @classmethod
    def _make(cls, re, im):
        z = object.__new__(cls)
        z.re = re
        z.im = im
        return z

    # -- ring ops ----------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, QQi):
            return QQi._make(self.re + other.re, self.im + other.im)
        if isinstance(other, _RAT_TYPES):
            return QQi._make(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, QQi):
            return QQi._make(self.re - other.re, self.im - other.im)
        if isinstance(other, _RAT_TYPES):
            return QQi._make(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, _RAT_TYPES):
            return QQi._make(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, QQi):
            a, b, c, d = self.re, self.im, other.re, other.im
            return QQi._make(a * c - b * d, a * d + b * c)
        if isinstance(other, _RAT_TYPES):
            return QQi._make(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, QQi):
            return self * other.inverse()
        if isinstance(other, _RAT_TYPES):
            other = qq(other)
            return QQi._make(self.re / other, self.im / other)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, _RAT_TYPES):
            return self.inverse() * other
        return NotImplemented

    def __neg__(self):
        return QQi._make(-self.re, -self.im)

    def __pos__(self):
        return self

    # -- structure ----------------------------------------------------------

    def conj(self):
        return QQi._make(self.re, -self.im)

    def abs2(self):
        """|z|^2 as an exact rational."""
        return self.re * self.re + self.im * self.im

    def inverse(self):
        n = self.abs2()
        if not n:
            raise ZeroDivisionError("inverse of 0")
        return QQi._make(self.re / n, -self.im / n)

    def is_real(self):
        return not self.im

    def is_rational(self):
        return not self.im

    # -- protocol -----------------------------------------------------------

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, QQi):
            return self.re == other.re and self.im == other.im
        if isinstance(other, _RAT_TYPES):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        if not self.im:
            return qq_str(self.re)
        if not self.re:
            return f"{qq_str(self.im)}i"
        sign = "+" if self.im > 0 else "-"
        return f"({qq_str(self.re)}{sign}{qq_str(abs(self.im))}i)"

    def size(self):
        return bit_size(self.re) + bit_size(self.im)


def qi(re=0, im=0) -> QQi:
    if isinstance(re, QQi):
        if im:
            raise TypeError("cannot add an imaginary part to a QQi")
        return re
    return QQi(re, im)


QI0 = QQi(0)
QI1 = QQi(1)
I = QQi(0, 1)


def qi_rand(rng, num=6, den=4):
    from .rationals import rand_rational

    return QQi(rand_rational(rng, num, den), rand_rational(rng, num, den))


class Sqrt2Ext:
    """Element a + b*sqrt(2) of Q(i, sqrt(2)), with a, b Gaussian rationals."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = a if isinstance(a, QQi) else QQi(a)
        self.b = b if isinstance(b, QQi) else QQi(b)

    @classmethod
    def _make(cls, a, b):
        z = object.__new__(cls)
        z.a = a
        z.b = b
        return z

    @staticmethod
    def lift(x):
        if isinstance(x, Sqrt2Ext):
            return x
        if isinstance(x, QQi):
            return Sqrt2Ext._make(x, QI0)
        if isinstance(x, _RAT_TYPES):
            return Sqrt2Ext._make(QQi(x), QI0)
        raise TypeError(f"cannot lift {type(x).__name__} into Q(i, sqrt2)")

    def __add__(self, other):
        try:
            other = Sqrt2Ext.lift(other)
        except TypeError:
            return NotImplemented
        return Sqrt2Ext._make(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = Sqrt2Ext.lift(other)
        except TypeError:
            return NotImplemented
        return Sqrt2Ext._make(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        try:
            other = Sqrt2Ext.lift(other)
        except TypeError:
            return NotImplemented
        return Sqrt2Ext._make(other.a - self.a, other.b - self.b)

    def __mul__(self, other):
        try:
            other = Sqrt2Ext.lift(other)
        except TypeError:
            return NotImplemented
        a, b, c, d = self.a, self.b, other.a, other.b
        return Sqrt2Ext._make(a * c + (b * d) * 2, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self):
        # (a + b r)^-1 = (a - b r) / (a^2 - 2 b^2); the denominator vanishes
        # only at 0 because sqrt(2) is not a Gaussian rational.
        n = self.a * self.a - (self.b * self.b) * 2
        if not n:
            raise ZeroDivisionError("inverse of 0")
        ninv = n.inverse()
        return Sqrt2Ext._make(self.a * ninv, -self.b * ninv)

    def __truediv__(self, other):
        try:
            other = Sqrt2Ext.lift(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        try:
            other = Sqrt2Ext.lift(other)
        except TypeError:
            return NotImplemented
        return other * self.inverse()

    def __neg__(self):
        return Sqrt2Ext._make(-self.a, -self.b)

    def conj(self):
        """Complex conjugation; sqrt(2) is real, so it fixes the radical part."""
        return Sqrt2Ext._make(self.a.conj(), self.b.conj())

    def is_rational_complex(self):
        return not self.b

    def to_qqi(self) -> QQi:
        if self.b:
            raise ValueError("value has a sqrt(2) part")
        return self.a

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __eq__(self, other):
        try:
            other = Sqrt2Ext.lift(other)
        except TypeError:
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        if not self.b:
            return hash(self.a)
        return hash((self.a, self.b))

    def __repr__(self):
        if not self.b:
            return repr(self.a)
        if not self.a:
            return f"{self.b!r}*r2"
        return f"({self.a!r}+{self.b!r}*r2)"

    def size(self):
        return self.a.size() + self.b.size()


SQRT2 = Sqrt2Ext(0, 1)


def scalar_conj(x):
    """Complex conjugation across the scalar tower (rationals are fixed)."""
    if isinstance(x, (QQi, Sqrt2Ext)):
        return x.conj()
    return x


def scalar_size(x) -> int:
    if isinstance(x, (QQi, Sqrt2Ext)):
        return x.size()
    return bit_size(x)
