"""Gaussian rationals: exact complex numbers a + bi with a, b rational."""

from fractions import Fraction
from numbers import Rational


class GaussRat:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussRat):
            if im:
                raise TypeError("imaginary part given twice")
            self.re, self.im = re.re, re.im
            return
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def coerce(cls, x):
        if isinstance(x, GaussRat):
            return x
        if isinstance(x, (int, Rational)):
            return cls(x)
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        if isinstance(x, float):
            return cls(Fraction(x))
        raise TypeError(f"cannot convert {type(x).__name__} to GaussRat")

    # arithmetic -----------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, GaussRat):
            try:
                other = GaussRat.coerce(other)
            except TypeError:
                return NotImplemented
        return GaussRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussRat):
            try:
                other = GaussRat.coerce(other)
            except TypeError:
                return NotImplemented
        return GaussRat(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussRat.coerce(other) - self

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, GaussRat):
            try:
                other = GaussRat.coerce(other)
            except TypeError:
                return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GaussRat(a * c)
        return GaussRat(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, GaussRat):
            try:
                other = GaussRat.coerce(other)
            except TypeError:
                return NotImplemented
        c, d = other.re, other.im
        if not d:
            if not c:
                raise ZeroDivisionError("GaussRat division by zero")
            return GaussRat(self.re / c, self.im / c)
        n = c * c + d * d
        return GaussRat((self.re * c + self.im * d) / n, (self.im * c - self.re * d) / n)

    def __rtruediv__(self, other):
        return GaussRat.coerce(other) / self

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (GaussRat(1) / self) ** (-k)
        result, base = GaussRat(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conjugate(self):
        return GaussRat(self.re, -self.im)

    def abs2(self):
        """|z|^2 as an exact rational."""
        return self.re * self.re + self.im * self.im

    # comparisons and conversions -----------------------------------------

    def __eq__(self, other):
        if isinstance(other, GaussRat):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)):
            return not self.im and self.re == other
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    @property
    def is_real(self):
        return not self.im

    def __repr__(self):
        return f"GaussRat({self.re}, {self.im})"

    def __str__(self):
        return format_coefficient(self)


I = GaussRat(0, 1)
ZERO = GaussRat(0)
ONE = GaussRat(1)


def _rat(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_coefficient(c):
    """Canonical text for a coefficient: ``3/2``, ``-i``, ``2i``, ``(1/2 - 3i)``.

    An imaginary literal is a rational immediately followed by ``i``;
    ``3/2i`` means (3/2)*i since ``/`` only ever joins digits.
    """
    if not c.im:
        return _rat(c.re)
    if c.im == 1:
        im = "i"
    elif c.im == -1:
        im = "-i"
    else:
        im = _rat(c.im) + "i"
    if not c.re:
        return im
    sign = "-" if c.im < 0 else "+"
    return f"({_rat(c.re)} {sign} {im.lstrip('-')})"
