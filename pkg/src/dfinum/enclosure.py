"""Complex midpoint-radius balls with arbitrary-precision dyadic midpoints.

An :class:`Enclosure` stores the midpoint ``(a + b*i) * 2**e`` with integer
``a, b`` and a radius bound ``rm * 2**rexp`` whose mantissa is kept below
``2**RAD_BITS`` and rounded upward on every operation. Midpoints are
truncated to the ball's working precision and the truncation error is pushed
into the radius, so every operation returns a ball containing the exact image
of its inputs.
"""

from __future__ import annotations

import math
from fractions import Fraction
from math import isqrt
from typing import Union

from .gaussian import GQ, GaussianRational

__all__ = ["Enclosure", "NumberValue", "to_enclosure", "DEFAULT_PREC", "format_decimal"]

RAD_BITS = 30
DEFAULT_PREC = 128


# --- radius magnitudes: (mantissa, exponent), upper bounds ----------------

def _mag(m: int, e: int):
    if m <= 0:
        return (0, 0)
    bl = m.bit_length()
    if bl > RAD_BITS:
        s = bl - RAD_BITS
        m = (m >> s) + 1
        e += s
    return (m, e)


def _mag_add(x, y):
    if x[0] == 0:
        return y
    if y[0] == 0:
        return x
    (xm, xe), (ym, ye) = x, y
    if xe < ye:
        (xm, xe), (ym, ye) = (ym, ye), (xm, xe)
    d = xe - ye
    if d > 2 * RAD_BITS:
        return _mag(xm + 1, xe)
    return _mag((xm << d) + ym, ye)


def _mag_mul(x, y):
    if x[0] == 0 or y[0] == 0:
        return (0, 0)
    return _mag(x[0] * y[0], x[1] + y[1])


def _mag_from_fraction(q: Fraction):
    """Upper bound of a nonnegative rational."""
    if q <= 0:
        return (0, 0)
    n, d = q.numerator, q.denominator
    shift = RAD_BITS + 2 + d.bit_length() - n.bit_length()
    if shift >= 0:
        m = -((-(n << shift)) // d)
    else:
        m = -((-n) // (d << -shift))
    return _mag(m, -shift)


def _mag_to_fraction(x) -> Fraction:
    m, e = x
    return Fraction(m << e) if e >= 0 else Fraction(m, 1 << -e)


def _mid_abs_mag(a: int, b: int, e: int):
    """Upper bound of |a + b*i| * 2**e."""
    if a == 0 and b == 0:
        return (0, 0)
    if b == 0:
        return _mag(abs(a), e)
    if a == 0:
        return _mag(abs(b), e)
    return _mag(isqrt(a * a + b * b) + 1, e)


class Enclosure:
    """Closed disk ``{w : |w - mid| <= rad}`` in the complex plane."""

    __slots__ = ("a", "b", "e", "rad", "prec")

    def __init__(self, a: int, b: int, e: int, rad=(0, 0), prec: int = DEFAULT_PREC):
        self.a, self.b, self.e, self.rad, self.prec = a, b, e, rad, prec

    # --- construction ----------------------------------------------------
    @classmethod
    def exact(cls, x, prec: int = DEFAULT_PREC) -> Enclosure:
        """Enclose an exact Gaussian rational (radius 0 when it is dyadic)."""
        if isinstance(x, Enclosure):
            return x
        a, b, d = GQ(x).parts
        if d & (d - 1) == 0:
            return cls(a, b, -(d.bit_length() - 1), (0, 0), prec)
        k = prec + d.bit_length() + 2
        qa = (a << k) // d
        qb = (b << k) // d
        ball = cls(qa, qb, -k, _mag(2, -k), prec)
        return ball._rounded()

    @classmethod
    def from_fraction_parts(cls, re: Fraction, im: Fraction = Fraction(0), rad: Fraction = Fraction(0),
                            prec: int = DEFAULT_PREC) -> Enclosure:
        ball = cls.exact(GQ(re, im), prec)
        return ball.add_error(rad)

    @classmethod
    def zero(cls, prec: int = DEFAULT_PREC) -> Enclosure:
        return cls(0, 0, 0, (0, 0), prec)

    def _rounded(self) -> Enclosure:
        a, b = self.a, self.b
        bits = max(abs(a).bit_length(), abs(b).bit_length())
        if bits <= self.prec:
            if a == 0 and b == 0:
                self.e = 0
            return self
        s = bits - self.prec
        self.a, self.b = a >> s, b >> s
        err = _mag(2, self.e + s)  # |error| < sqrt(2) * 2**(e+s)
        self.e += s
        self.rad = _mag_add(self.rad, err)
        return self

    # --- inspection ------------------------------------------------------
    @property
    def mid(self) -> GaussianRational:
        e = self.e
        if e >= 0:
            return GQ(Fraction(self.a << e), Fraction(self.b << e))
        d = 1 << -e
        return GQ(Fraction(self.a, d), Fraction(self.b, d))

    @property
    def radius(self) -> Fraction:
        return _mag_to_fraction(self.rad)

    def radius_float(self) -> float:
        m, e = self.rad
        try:
            return math.ldexp(float(m), e)
        except OverflowError:
            return math.inf

    def radius_log2(self) -> float:
        m, e = self.rad
        return -math.inf if m == 0 else math.log2(m) + e

    def is_exact(self) -> bool:
        return self.rad[0] == 0

    def is_real(self) -> bool:
        return self.b == 0

    def abs_upper(self) -> Fraction:
        return _mag_to_fraction(_mag_add(_mid_abs_mag(self.a, self.b, self.e), self.rad))

    def abs_lower(self) -> Fraction:
        n = isqrt(self.a * self.a + self.b * self.b)
        e = self.e
        low = Fraction(n << e) if e >= 0 else Fraction(n, 1 << -e)
        return max(low - self.radius, Fraction(0))

    def log2_upper(self) -> float:
        """Approximate log2 of an upper bound on |z| (``-inf`` for the exact zero)."""
        m = _mag_add(_mid_abs_mag(self.a, self.b, self.e), self.rad)
        return -math.inf if m[0] == 0 else math.log2(m[0]) + m[1]

    def contains(self, x) -> bool:
        """Does the ball contain the exact value or ball ``x``?"""
        if isinstance(x, Enclosure):
            d = x.mid - self.mid
            slack = self.radius - x.radius
            return slack >= 0 and d.norm() <= slack * slack
        d = GQ(x) - self.mid
        r = self.radius
        return d.norm() <= r * r

    def overlaps(self, other: Enclosure) -> bool:
        other = to_enclosure(other, self.prec)
        d = other.mid - self.mid
        s = self.radius + other.radius
        return d.norm() <= s * s

    def contains_zero(self) -> bool:
        return self.contains(0)

    # --- arithmetic ------------------------------------------------------
    def add_error(self, err) -> Enclosure:
        if isinstance(err, tuple):
            m = err
        else:
            m = _mag_from_fraction(Fraction(err))
        return Enclosure(self.a, self.b, self.e, _mag_add(self.rad, m), self.prec)

    def with_prec(self, prec: int) -> Enclosure:
        return Enclosure(self.a, self.b, self.e, self.rad, prec)._rounded()

    def __neg__(self):
        return Enclosure(-self.a, -self.b, self.e, self.rad, self.prec)

    def conj(self) -> Enclosure:
        return Enclosure(self.a, -self.b, self.e, self.rad, self.prec)

    def real_part(self) -> Enclosure:
        return Enclosure(self.a, 0, self.e, self.rad, self.prec)

    def imag_part(self) -> Enclosure:
        return Enclosure(self.b, 0, self.e, self.rad, self.prec)

    def mul_2exp(self, k: int) -> Enclosure:
        m, e = self.rad
        return Enclosure(self.a, self.b, self.e + k, (m, e + k) if m else (0, 0), self.prec)

    def _top(self):
        bits = max(abs(self.a).bit_length(), abs(self.b).bit_length())
        return self.e + bits if bits else None

    def __add__(self, other):
        o = _coerce(other, self.prec)
        if o is None:
            return NotImplemented
        prec = max(self.prec, o.prec)
        t1, t2 = self._top(), o._top()
        rad = _mag_add(self.rad, o.rad)
        if t2 is None:
            return Enclosure(self.a, self.b, self.e, rad, prec)
        if t1 is None:
            return Enclosure(o.a, o.b, o.e, rad, prec)
        if t2 < t1 - prec - 4:
            return Enclosure(self.a, self.b, self.e, _mag_add(rad, _mid_abs_mag(o.a, o.b, o.e)), prec)
        if t1 < t2 - prec - 4:
            return Enclosure(o.a, o.b, o.e, _mag_add(rad, _mid_abs_mag(self.a, self.b, self.e)), prec)
        if self.e >= o.e:
            s = self.e - o.e
            a, b, e = (self.a << s) + o.a, (self.b << s) + o.b, o.e
        else:
            s = o.e - self.e
            a, b, e = self.a + (o.a << s), self.b + (o.b << s), self.e
        return Enclosure(a, b, e, rad, prec)._rounded()

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other, self.prec)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _coerce(other, self.prec)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = _coerce(other, self.prec)
        if o is None:
            return NotImplemented
        prec = max(self.prec, o.prec)
        a, b, c, d = self.a, self.b, o.a, o.b
        if b == 0 and d == 0:
            ra, rb = a * c, 0
        else:
            ra, rb = a * c - b * d, a * d + b * c
        rad = (0, 0)
        if self.rad[0] or o.rad[0]:
            m1 = _mid_abs_mag(a, b, self.e)
            m2 = _mid_abs_mag(c, d, o.e)
            rad = _mag_add(_mag_add(_mag_mul(m1, o.rad), _mag_mul(m2, self.rad)),
                           _mag_mul(self.rad, o.rad))
        return Enclosure(ra, rb, self.e + o.e, rad, prec)._rounded()

    __rmul__ = __mul__

    def inverse(self) -> Enclosure:
        a, b, e = self.a, self.b, self.e
        n = a * a + b * b
        if n == 0 or self.contains_zero():
            raise ZeroDivisionError("enclosure contains zero")
        k = self.prec + n.bit_length() // 2 + 4
        qa = (a << k) // n
        qb = (-b << k) // n
        # rounding error of the midpoint plus propagated radius r / (|m| (|m| - r))
        rad = _mag(2, -e - k)
        if self.rad[0]:
            low = self.abs_lower()
            mlow = low + self.radius
            rad = _mag_add(rad, _mag_from_fraction(self.radius / (mlow * low)))
        return Enclosure(qa, qb, -e - k, rad, self.prec)._rounded()

    def __truediv__(self, other):
        o = _coerce(other, self.prec)
        if o is None:
            return NotImplemented
        if isinstance(other, (int, GaussianRational, Fraction)) and o.is_exact() and o.b == 0 and \
                o.a != 0 and (abs(o.a) & (abs(o.a) - 1)) == 0:
            # power-of-two divisor: exact shift
            sign = 1 if o.a > 0 else -1
            r = Enclosure(sign * self.a, sign * self.b, self.e, self.rad, self.prec)
            return r.mul_2exp(-o.e - (abs(o.a).bit_length() - 1))
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _coerce(other, self.prec)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result, base = Enclosure(1, 0, 0, (0, 0), self.prec), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # --- text ------------------------------------------------------------
    def __repr__(self):
        return f"Enclosure({self.to_str(20)})"

    def to_str(self, digits: int = 20) -> str:
        return format_decimal(self, digits)


NumberValue = Union[GaussianRational, Enclosure]


def _coerce(x, prec):
    if isinstance(x, Enclosure):
        return x
    if isinstance(x, (int, Fraction, GaussianRational)):
        return Enclosure.exact(x, prec)
    return None


def to_enclosure(x: NumberValue, prec: int = DEFAULT_PREC) -> Enclosure:
    if isinstance(x, Enclosure):
        return x
    return Enclosure.exact(x, prec)


# --- decimal output --------------------------------------------------------

def _floor_log10(q: Fraction) -> int:
    """floor(log10(q)) for q > 0."""
    n, d = q.numerator, q.denominator
    e = len(str(n)) - len(str(d))
    p = Fraction(10) ** e
    if p > q:
        e -= 1
    elif p * 10 <= q:
        e += 1
    return e


def _round_sig(q: Fraction, digits: int) -> str:
    """Round a real rational to ``digits`` significant digits (half away from zero)."""
    if q == 0:
        return "0"
    sign = "-" if q < 0 else ""
    q = abs(q)
    E = _floor_log10(q)
    scaled = q * Fraction(10) ** (digits - 1 - E)
    m = int(scaled + Fraction(1, 2))
    if m >= 10 ** digits:
        m //= 10
        E += 1
    s = str(m)
    if -6 <= E < 0:
        body = "0." + "0" * (-E - 1) + s.rstrip("0")
        return sign + (body if body != "0." else "0")
    if 0 <= E < 40:
        if len(s) <= E + 1:
            return sign + s + "0" * (E + 1 - len(s))
        return sign + s[:E + 1] + "." + s[E + 1:]
    mant = s[0] + ("." + s[1:] if len(s) > 1 else "")
    return f"{sign}{mant}e{E:+d}"


def format_radius(r: Fraction) -> str:
    """Two significant digits, rounded upward, scientific notation."""
    if r == 0:
        return "0"
    E = _floor_log10(r)
    scaled = r * Fraction(10) ** (1 - E)
    m = -((-scaled.numerator) // scaled.denominator)
    if m >= 100:
        m = (m + 9) // 10
        E += 1
    return f"{m // 10}.{m % 10}e{E:+d}"


def _allowed_digits(x: Fraction, r: Fraction, digits: int) -> int:
    if r == 0 or x == 0:
        return digits
    E = _floor_log10(abs(x))
    Er = _floor_log10(r)
    return max(1, min(digits, E - Er + 1))


def format_decimal(z: NumberValue, digits: int, with_radius: bool = True) -> str:
    """Decimal text of a number; digits below the radius magnitude are never shown."""
    if isinstance(z, GaussianRational):
        z = Enclosure.exact(z, max(64, int(digits * 3.33) + 16))
    mid = z.mid
    r = z.radius
    re_, im_ = mid.re, mid.im
    show_re = re_ != 0 and (abs(re_) > r or im_ == 0 or abs(im_) <= r)
    show_im = im_ != 0 and abs(im_) > r
    parts = []
    if show_re or not show_im:
        parts.append(_round_sig(re_, _allowed_digits(re_, r, digits)) if re_ != 0 else "0")
    if show_im:
        s = _round_sig(im_, _allowed_digits(im_, r, digits))
        if parts:
            parts.append(("- " + s[1:] if s.startswith("-") else "+ " + s) + "*i")
        else:
            parts.append(s + "*i")
    text = " ".join(parts)
    if with_radius:
        text += f" ± {format_radius(r)}"
    return text
