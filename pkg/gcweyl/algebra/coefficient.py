from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union[int, Fraction, "Coefficient"]


class Coefficient:
    """
    Exact complex rational ``re + im*i``.

    Both parts are kept as reduced ``fractions.Fraction`` so no floating
    point value can ever enter a symbol.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if not isinstance(re, Rational) or not isinstance(im, Rational):
            raise TypeError("Coefficient parts must be exact rationals")
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def of(cls, value: Number) -> "Coefficient":
        if isinstance(value, Coefficient):
            return value
        return cls(value)

    @classmethod
    def i(cls) -> "Coefficient":
        return cls(0, 1)

    # -------------------------------------------------------------------------
    # Arithmetic
    # -------------------------------------------------------------------------

    def __add__(self, other):
        other = Coefficient.of(other)
        return Coefficient(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = Coefficient.of(other)
        return Coefficient(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return Coefficient.of(other) - self

    def __neg__(self):
        return Coefficient(-self.re, -self.im)

    def __mul__(self, other):
        other = Coefficient.of(other)
        return Coefficient(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Coefficient.of(other)
        norm = other.re * other.re + other.im * other.im
        if norm == 0:
            raise ZeroDivisionError("division by a zero coefficient")
        return self * Coefficient(other.re / norm, -other.im / norm)

    def __pow__(self, exponent: int):
        if exponent < 0:
            return Coefficient(1) / (self**-exponent)
        result = Coefficient(1)
        for _ in range(exponent):
            result = result * self
        return result

    def conjugate(self) -> "Coefficient":
        return Coefficient(self.re, -self.im)

    # -------------------------------------------------------------------------
    # Comparison and conversion
    # -------------------------------------------------------------------------

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Coefficient(other)
        if not isinstance(other, Coefficient):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"Coefficient({self.re}, {self.im})"
