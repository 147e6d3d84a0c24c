"""Dense univariate polynomials and rational functions over Q(i).

Also hosts the incremental echelon basis used for every "find the first
linear dependency over F(z)" ansatz in the operator code.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd

from .gaussian import GQ, ONE, ZERO, GaussianRational

__all__ = ["Polynomial", "RationalFunction", "EchelonBasis", "poly_gcd", "squarefree_factors"]


def _trim(cs):
    n = len(cs)
    while n and cs[n - 1].is_zero():
        n -= 1
    return tuple(cs[:n])


class Polynomial:
    """Polynomial with coefficients ``coeffs[k]`` of ``x^k`` (trailing zeros trimmed)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        if isinstance(coeffs, Polynomial):
            self.coeffs = coeffs.coeffs
            return
        if not isinstance(coeffs, (list, tuple)):
            coeffs = (coeffs,)
        self.coeffs = _trim([GQ(c) for c in coeffs])

    @classmethod
    def _from(cls, cs):
        p = object.__new__(cls)
        p.coeffs = _trim(cs)
        return p

    @classmethod
    def x(cls) -> Polynomial:
        return cls._from((ZERO, ONE))

    @classmethod
    def monomial(cls, k: int, c=1) -> Polynomial:
        return cls._from((ZERO,) * k + (GQ(c),))

    # --- basic properties ------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def lc(self) -> GaussianRational:
        return self.coeffs[-1] if self.coeffs else ZERO

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else ZERO

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.coeffs)

    def conj(self) -> Polynomial:
        return Polynomial._from([c.conj() for c in self.coeffs])

    # --- arithmetic ------------------------------------------------------
    def __add__(self, other):
        o = _coerce_poly(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Polynomial._from([x + y for x, y in zip(a, b)] + list(a[len(b):]))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._from([-c for c in self.coeffs])

    def __sub__(self, other):
        o = _coerce_poly(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _coerce_poly(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (GaussianRational, int, Fraction)):
            return self.scale(other)
        o = _coerce_poly(other)
        if o is None:
            return NotImplemented
        a, b = self.coeffs, o.coeffs
        if not a or not b:
            return Polynomial._from(())
        if len(a) == 1:
            return o.scale(a[0])
        if len(b) == 1:
            return self.scale(b[0])
        out = [ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x.is_zero():
                continue
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
        return Polynomial._from(out)

    __rmul__ = __mul__

    def scale(self, c) -> Polynomial:
        c = GQ(c)
        if c.is_zero():
            return Polynomial._from(())
        if c == ONE:
            return self
        return Polynomial._from([x * c for x in self.coeffs])

    def __pow__(self, k: int):
        result, base = Polynomial._from((ONE,)), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def divmod(self, other: Polynomial):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        db = other.degree
        if len(rem) - 1 < db:
            return Polynomial._from(()), self
        inv = other.lc().inverse()
        q = [ZERO] * (len(rem) - db)
        bc = other.coeffs
        for k in range(len(rem) - 1 - db, -1, -1):
            c = rem[k + db] * inv
            q[k] = c
            if c.is_zero():
                continue
            for j in range(db + 1):
                rem[k + j] = rem[k + j] - c * bc[j]
        return Polynomial._from(q), Polynomial._from(rem[:db])

    def __divmod__(self, other):
        return self.divmod(_coerce_poly(other))

    def __floordiv__(self, other):
        return self.divmod(_coerce_poly(other))[0]

    def __mod__(self, other):
        return self.divmod(_coerce_poly(other))[1]

    def exact_div(self, other: Polynomial) -> Polynomial:
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError("division is not exact")
        return q

    def monic(self) -> Polynomial:
        if self.is_zero():
            return self
        return self.scale(self.lc().inverse())

    def derivative(self) -> Polynomial:
        return Polynomial._from([c * k for k, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        """Horner evaluation; ``x`` may be any ring element accepting GaussianRationals."""
        cs = self.coeffs
        if not cs:
            return ZERO if isinstance(x, (GaussianRational, int, Fraction)) else x * 0
        acc = cs[-1]
        if isinstance(x, (int, Fraction)):
            x = GQ(x)
        for c in reversed(cs[:-1]):
            acc = acc * x + c
        return acc

    def taylor_shift(self, beta) -> Polynomial:
        """Return ``p(x + beta)``."""
        beta = GQ(beta)
        if beta.is_zero() or len(self.coeffs) <= 1:
            return self
        cs = list(self.coeffs)
        n = len(cs)
        # repeated synthetic division
        for i in range(n - 1):
            for j in range(n - 2, i - 1, -1):
                cs[j] = cs[j] + beta * cs[j + 1]
        return Polynomial._from(cs)

    def compose(self, q: Polynomial) -> Polynomial:
        acc = Polynomial._from(())
        for c in reversed(self.coeffs):
            acc = acc * q + Polynomial._from((c,))
        return acc

    def denominator_lcm(self) -> int:
        out = 1
        for c in self.coeffs:
            d = c.parts[2]
            out = out * d // gcd(out, d)
        return out

    # --- comparison ------------------------------------------------------
    def __eq__(self, other):
        o = _coerce_poly(other)
        if o is None:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial({self.to_str('x')})"

    def to_str(self, var: str = "x") -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c.is_zero():
                continue
            mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            sign, body = _coef_str(c)
            if mono:
                body = mono if body == "1" else f"{body}*{mono}"
            parts.append((sign, body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    __str__ = lambda self: self.to_str("x")  # noqa: E731


def _coef_str(c: GaussianRational):
    """Sign and magnitude text of a coefficient inside a polynomial literal."""
    re_, im_ = c.re, c.im

    def frac(q):
        return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"

    if im_ == 0:
        return ("-" if re_ < 0 else "+"), frac(abs(re_))
    if re_ == 0:
        body = "i" if abs(im_) == 1 else f"{frac(abs(im_))}*i"
        return ("-" if im_ < 0 else "+"), body
    if re_ < 0:
        re_, im_, sign = -re_, -im_, "-"
    else:
        sign = "+"
    ims = "i" if abs(im_) == 1 else f"{frac(abs(im_))}*i"
    return sign, f"({frac(re_)}{'-' if im_ < 0 else '+'}{ims})"


def _coerce_poly(x):
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, (GaussianRational, int, Fraction)):
        return Polynomial._from((GQ(x),))
    return None


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd (zero only if both inputs are zero)."""
    if a.degree < 1 or b.degree < 1:
        if a.is_zero():
            return b.monic() if not b.is_zero() else b
        if b.is_zero():
            return a.monic()
        return _ONE_POLY
    return _gcd_cached(a, b) if a.degree + b.degree > 2 else _gcd(a, b)


def _gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic()


@lru_cache(maxsize=4096)
def _gcd_cached(a: Polynomial, b: Polynomial) -> Polynomial:
    # rational-function arithmetic keeps meeting the same few denominators
    return _gcd(a, b)


def squarefree_factors(p: Polynomial) -> list[tuple[Polynomial, int]]:
    """Yun's algorithm: monic squarefree ``q_k`` with ``p = lc * prod q_k^k``."""
    if p.degree < 1:
        return []
    out = []
    dp = p.derivative()
    a = poly_gcd(p, dp)
    b = p.exact_div(a)
    c = dp.exact_div(a)
    d = c - b.derivative()
    k = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        if a.degree > 0:
            out.append((a, k))
        b = b.exact_div(a)
        c = d.exact_div(a)
        d = c - b.derivative()
        k += 1
    return out



class RationalFunction:
    """``num/den`` in lowest terms with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, _normalized=False):
        num = _coerce_poly(num) if not isinstance(num, Polynomial) else num
        if den is None:
            self.num, self.den = num, _ONE_POLY
            return
        den = _coerce_poly(den) if not isinstance(den, Polynomial) else den
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _normalized:
            if num.is_zero():
                num, den = num, _ONE_POLY
            elif den.degree == 0:
                num, den = num.scale(den.coeffs[0].inverse()), _ONE_POLY
            else:
                g = poly_gcd(num, den)
                if g.degree > 0:
                    num, den = num.exact_div(g), den.exact_div(g)
                inv = den.lc().inverse()
                num, den = num.scale(inv), den.scale(inv)
        self.num, self.den = num, den

    @classmethod
    def coerce(cls, x) -> RationalFunction:
        if isinstance(x, RationalFunction):
            return x
        return cls(_coerce_poly(x))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def __add__(self, other):
        o = RationalFunction.coerce(other)
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den) if self.den.degree > 0 \
                else RationalFunction(self.num + o.num)
        g = poly_gcd(self.den, o.den)
        if g.degree > 0:
            a, b = self.den.exact_div(g), o.den.exact_div(g)
            return RationalFunction(self.num * b + o.num * a, self.den * b)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        return self + (-RationalFunction.coerce(other))

    def __rsub__(self, other):
        return RationalFunction.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (GaussianRational, int, Fraction)):
            return RationalFunction(self.num.scale(other), self.den, _normalized=True) \
                if other != 0 else RationalFunction(Polynomial())
        o = RationalFunction.coerce(other)
        if self.num.is_zero() or o.num.is_zero():
            return RationalFunction(Polynomial())
        if self.den.degree == 0 and o.den.degree == 0:
            return RationalFunction(self.num * o.num)
        # cross-cancel before multiplying
        g1 = poly_gcd(self.num, o.den)
        g2 = poly_gcd(o.num, self.den)
        n = self.num.exact_div(g1) * o.num.exact_div(g2)
        d = self.den.exact_div(g2) * o.den.exact_div(g1)
        inv = d.lc().inverse()
        return RationalFunction(n.scale(inv), d.scale(inv), _normalized=True)

    __rmul__ = __mul__

    def inverse(self) -> RationalFunction:
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        inv = self.num.lc().inverse()
        return RationalFunction(self.den.scale(inv), self.num.scale(inv), _normalized=True)

    def __truediv__(self, other):
        return self * RationalFunction.coerce(other).inverse()

    def __rtruediv__(self, other):
        return RationalFunction.coerce(other) * self.inverse()

    def derivative(self) -> RationalFunction:
        if self.den.degree == 0:
            return RationalFunction(self.num.derivative())
        return RationalFunction(self.num.derivative() * self.den - self.num * self.den.derivative(),
                                self.den * self.den)

    def taylor_shift(self, beta) -> RationalFunction:
        if self.den.degree == 0:
            return RationalFunction(self.num.taylor_shift(beta))
        return RationalFunction(self.num.taylor_shift(beta), self.den.taylor_shift(beta),
                                _normalized=True)

    def conj(self) -> RationalFunction:
        return RationalFunction(self.num.conj(), self.den.conj(), _normalized=True)

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def __eq__(self, other):
        o = RationalFunction.coerce(other) if not isinstance(other, RationalFunction) else other
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        if self.den.degree == 0:
            return f"RationalFunction({self.num.to_str('x')})"
        return f"RationalFunction(({self.num.to_str('x')})/({self.den.to_str('x')}))"


_ONE_POLY = Polynomial._from((ONE,))
RF_ZERO = RationalFunction(Polynomial._from(()))
RF_ONE = RationalFunction(_ONE_POLY)


def clear_denominators(vec: list[RationalFunction]) -> list[Polynomial]:
    """Multiply a vector of rational functions by the lcm of its denominators."""
    lcm = _ONE_POLY
    for r in vec:
        if r.den.degree > 0:
            lcm = lcm * r.den.exact_div(poly_gcd(lcm, r.den))
    return [r.num * lcm.exact_div(r.den) for r in vec]


class EchelonBasis:
    """Incremental row echelon form over F(z) remembering how rows were built.

    ``add(v)`` returns ``None`` while the added vectors stay linearly
    independent, and otherwise the coefficients ``c`` (one per vector added
    so far, the new one included) of the first relation ``sum c_k v_k = 0``.
    """

    def __init__(self):
        self._rows = []  # (pivot, row, combo)
        self._count = 0

    def __len__(self):
        return self._count

    def add(self, vec):
        k = self._count
        self._count += 1
        v = [RationalFunction.coerce(x) for x in vec]
        combo = {k: RF_ONE}
        for piv, row, rcombo in self._rows:
            c = v[piv]
            if c.is_zero():
                continue
            for j in range(len(v)):
                if not row[j].is_zero():
                    v[j] = v[j] - c * row[j]
            for idx, val in rcombo.items():
                combo[idx] = combo.get(idx, RF_ZERO) - c * val
        piv = next((j for j, x in enumerate(v) if not x.is_zero()), None)
        if piv is None:
            return [combo.get(i, RF_ZERO) for i in range(k + 1)]
        inv = v[piv].inverse()
        row = [x * inv if not x.is_zero() else x for x in v]
        rcombo = {idx: val * inv for idx, val in combo.items() if not val.is_zero()}
        self._rows.append((piv, row, rcombo))
        return None


def rf_solve(matrix, rhs):
    """Solve ``matrix * x = rhs`` over F(z) (square, row-major); ``None`` if singular."""
    n = len(matrix)
    rows = [[RationalFunction.coerce(x) for x in row] + [RationalFunction.coerce(b)]
            for row, b in zip(matrix, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not rows[r][col].is_zero()), None)
        if piv is None:
            return None
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = rows[col][col].inverse()
        rows[col] = [x * inv if not x.is_zero() else x for x in rows[col]]
        for r in range(n):
            if r != col and not rows[r][col].is_zero():
                c = rows[r][col]
                rows[r] = [x - c * y if not y.is_zero() else x for x, y in zip(rows[r], rows[col])]
    return [rows[r][n] for r in range(n)]
