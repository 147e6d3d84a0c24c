"""Exact Gaussian rationals, the coefficient field Q(i).

Values are stored as ``(a + b*i) / d`` with integers ``a, b`` and ``d > 0``
in lowest terms, which keeps multiplication down to a single gcd.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd
from numbers import Rational

__all__ = ["GaussianRational", "GQ", "ZERO", "ONE", "I", "parse_gaussian"]


class GaussianRational:
    __slots__ = ("_a", "_b", "_d")

    def __new__(cls, re=0, im=0):
        if isinstance(re, GaussianRational) and im == 0:
            return re
        if isinstance(re, str):
            if im != 0:
                raise TypeError("string input takes no imaginary part")
            return parse_gaussian(re)
        re = _as_fraction(re)
        im = _as_fraction(im)
        d = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
        a = re.numerator * (d // re.denominator)
        b = im.numerator * (d // im.denominator)
        return _make(a, b, d)

    # --- accessors -------------------------------------------------------
    @property
    def re(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._b, self._d)

    @property
    def parts(self) -> tuple[int, int, int]:
        """Integer triple ``(a, b, d)`` with value ``(a + b*i)/d``."""
        return self._a, self._b, self._d

    def is_real(self) -> bool:
        return self._b == 0

    def is_zero(self) -> bool:
        return self._a == 0 and self._b == 0

    def __bool__(self):
        return not self.is_zero()

    def conj(self) -> GaussianRational:
        if self._b == 0:
            return self
        return _raw(self._a, -self._b, self._d)

    def norm(self) -> Fraction:
        """Squared modulus ``re^2 + im^2``."""
        return Fraction(self._a * self._a + self._b * self._b, self._d * self._d)

    # --- arithmetic ------------------------------------------------------
    def __neg__(self):
        return _raw(-self._a, -self._b, self._d)

    def __pos__(self):
        return self

    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if self._d == o._d:
            return _make(self._a + o._a, self._b + o._b, self._d)
        return _make(self._a * o._d + o._a * self._d,
                     self._b * o._d + o._b * self._d,
                     self._d * o._d)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if self._d == o._d:
            return _make(self._a - o._a, self._b - o._b, self._d)
        return _make(self._a * o._d - o._a * self._d,
                     self._b * o._d - o._b * self._d,
                     self._d * o._d)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        a, b, d = self._a, self._b, self._d
        c, e, f = o._a, o._b, o._d
        if b == 0 and e == 0:
            return _make(a * c, 0, d * f)
        return _make(a * c - b * e, a * e + b * c, d * f)

    __rmul__ = __mul__

    def inverse(self) -> GaussianRational:
        a, b, d = self._a, self._b, self._d
        n = a * a + b * b
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        # d / (a + bi) = d (a - bi) / (a^2 + b^2)
        return _make(d * a, -d * b, n)

    def __truediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # --- comparison / hashing -------------------------------------------
    def __eq__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self._a == o._a and self._b == o._b and self._d == o._d

    def __hash__(self):
        if self._b == 0:
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        return format_gaussian(self)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot make an exact rational from {x!r}")


def _raw(a, b, d):
    obj = object.__new__(GaussianRational)
    obj._a, obj._b, obj._d = a, b, d
    return obj


def _make(a, b, d):
    if d < 0:
        a, b, d = -a, -b, -d
    g = gcd(gcd(a, b), d)
    if g != 1:
        a //= g
        b //= g
        d //= g
    return _raw(a, b, d)


def _coerce(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, int):
        return _raw(x, 0, 1)
    if isinstance(x, Fraction):
        return _raw(x.numerator, 0, x.denominator)
    return None


def GQ(x=0, im=0) -> GaussianRational:
    """Coerce ints, Fractions, strings or GaussianRationals to the field."""
    if im == 0:
        c = _coerce(x)
        if c is not None:
            return c
    return GaussianRational(x, im)


ZERO = _raw(0, 0, 1)
ONE = _raw(1, 0, 1)
I = _raw(0, 1, 1)


def _fmt_fraction(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_gaussian(x: GaussianRational) -> str:
    re_, im_ = x.re, x.im
    if im_ == 0:
        return _fmt_fraction(re_)
    if im_ == 1:
        ims = "i"
    elif im_ == -1:
        ims = "-i"
    else:
        ims = f"{_fmt_fraction(im_)}*i"
    if re_ == 0:
        return ims
    sign = "-" if ims.startswith("-") else "+"
    return f"{_fmt_fraction(re_)}{sign}{ims.lstrip('-')}"


_RAT = r"\d+(?:/\d+)?"
_TERM = re.compile(rf"\s*([+-]?)\s*(?:({_RAT})\s*(\*\s*i)?|(i))\s*")


def parse_gaussian(text: str) -> GaussianRational:
    """Parse ``a/b+c/d*i`` style literals; either part may be omitted."""
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    if not s:
        raise ValueError("empty Gaussian rational literal")
    pos, total, nterms = 0, ZERO, 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"bad Gaussian rational literal: {text!r}")
        sign, rat, star_i, lone_i = m.groups()
        if nterms and not sign:
            raise ValueError(f"bad Gaussian rational literal: {text!r}")
        if lone_i:
            val = I
        else:
            val = GQ(Fraction(rat))
            if star_i:
                val = val * I
        total = total - val if sign == "-" else total + val
        pos = m.end()
        nterms += 1
    return total
