"""Algebraic functions: power-series roots, annihilating ODEs, composition.

Everything works in the quotient ring ``F(z)[y]/(P)`` (elements are vectors
of ``deg_y P`` rational functions), so no conjugate roots are ever split off
and all outputs have coefficients in F.
"""

from __future__ import annotations

from .gaussian import GQ, ZERO, GaussianRational
from .ore import DiffOperator, relation_operator
from .poly import RF_ONE, RF_ZERO, Polynomial, RationalFunction, rf_solve

__all__ = [
    "BivariatePolynomial", "SeriesRoot", "series_root", "alg_to_diffop",
    "compose_dfinite_algebraic", "NotARootError", "CriticalRootError",
    "NotSquarefreeError", "NonInvertibleError",
]


class NotARootError(ValueError):
    """y0 is not a root of P(0, y)."""


class CriticalRootError(ValueError):
    """dP/dy vanishes at (0, y0): the implicit function theorem does not apply."""


class NotSquarefreeError(ValueError):
    """P shares a factor with dP/dy; pass its squarefree part instead."""


class NonInvertibleError(ArithmeticError):
    """lc(L) composed with the generic root of P is a zero divisor modulo P."""


class BivariatePolynomial:
    """``P(z, y) = sum_j coeffs_y[j](z) * y^j``."""

    __slots__ = ("coeffs_y", "zvar", "yvar")

    def __init__(self, coeffs_y, zvar: str = "z", yvar: str = "y"):
        cs = [c if isinstance(c, Polynomial) else Polynomial(c) for c in coeffs_y]
        while cs and cs[-1].is_zero():
            cs.pop()
        if len(cs) < 2:
            raise ValueError("a bivariate polynomial needs degree >= 1 in y")
        self.coeffs_y = tuple(cs)
        self.zvar, self.yvar = zvar, yvar

    @classmethod
    def from_univariate(cls, p: Polynomial, zvar="z", yvar="y"):
        """Embed ``p(y)`` (constant in z)."""
        return cls([Polynomial([c]) for c in p.coeffs], zvar, yvar)

    @property
    def degree_y(self) -> int:
        return len(self.coeffs_y) - 1

    def fiber(self, z0) -> Polynomial:
        """``P(z0, y)`` as a polynomial in y."""
        return Polynomial([c(GQ(z0)) for c in self.coeffs_y])

    def diff_y(self) -> list[Polynomial]:
        return [c * j for j, c in enumerate(self.coeffs_y)][1:]

    def diff_z(self) -> list[Polynomial]:
        return [c.derivative() for c in self.coeffs_y]

    def __call__(self, z, y):
        acc = self.coeffs_y[-1](z)
        for c in reversed(self.coeffs_y[:-1]):
            acc = acc * y + c(z)
        return acc

    def __eq__(self, other):
        return isinstance(other, BivariatePolynomial) and self.coeffs_y == other.coeffs_y

    def __hash__(self):
        return hash(self.coeffs_y)

    def to_text(self) -> str:
        from .textio import format_bivariate
        return format_bivariate(self)

    def __repr__(self):
        return f"BivariatePolynomial({self.to_text()})"


# --- truncated power series (lists of GaussianRational) ----------------------------

def _smul(a, b, n):
    out = [ZERO] * n
    for i, x in enumerate(a[:n]):
        if x.is_zero():
            continue
        for j in range(min(len(b), n - i)):
            y = b[j]
            if not y.is_zero():
                out[i + j] = out[i + j] + x * y
    return out


def _sinv(a, n):
    """1/a mod z^n by the triangular recurrence."""
    inv0 = a[0].inverse()
    out = [inv0]
    for k in range(1, n):
        acc = ZERO
        for j in range(1, min(k, len(a) - 1) + 1):
            if not a[j].is_zero():
                acc = acc + a[j] * out[k - j]
        out.append(-acc * inv0)
    return out


def _poly_series(p: Polynomial, n):
    cs = list(p.coeffs[:n])
    return cs + [ZERO] * (n - len(cs))


def _eval_at_series(polys, y, n):
    """sum_j polys[j](z) * y^j mod z^n (Horner in y)."""
    acc = _poly_series(polys[-1], n)
    for c in reversed(polys[:-1]):
        acc = _smul(acc, y, n)
        cs = c.coeffs
        for k in range(min(len(cs), n)):
            acc[k] = acc[k] + cs[k]
    return acc


class SeriesRoot:
    """The unique power series root of P with prescribed constant term (lazily extended).

    Extension mutates an internal cache; share a SeriesRoot between threads
    only with external locking.
    """

    def __init__(self, parent: BivariatePolynomial, y0):
        y0 = GQ(y0)
        if not parent.fiber(0)(y0).is_zero():
            raise NotARootError(f"{y0} is not a root of P(0, y)")
        dy = Polynomial([c(ZERO) for c in parent.diff_y()])
        if dy(y0).is_zero():
            raise CriticalRootError(f"dP/dy vanishes at (0, {y0}); the root is not simple")
        self.parent = parent
        self.y0 = y0
        self._coeffs = [y0]

    @property
    def coeffs(self) -> tuple:
        return tuple(self._coeffs)

    def __len__(self):
        return len(self._coeffs)

    def __getitem__(self, k):
        if isinstance(k, slice):
            stop = k.stop if k.stop is not None else len(self._coeffs)
            self.extend(stop)
            return self._coeffs[k]
        self.extend(k + 1)
        return self._coeffs[k]

    def extend(self, N: int) -> SeriesRoot:
        """Newton lifting until at least N coefficients are known, then verify exactly."""
        P = self.parent
        dys = P.diff_y()
        y = list(self._coeffs)
        prec = len(y)
        if prec >= N:
            return self
        while prec < N:
            prec = min(2 * prec, N)
            y = y + [ZERO] * (prec - len(y))
            val = _eval_at_series(P.coeffs_y, y, prec)
            der = _eval_at_series(dys, y, prec)
            corr = _smul(val, _sinv(der, prec), prec)
            y = [a - b for a, b in zip(y, corr)]
        residual = _eval_at_series(P.coeffs_y, y, N)
        if any(not c.is_zero() for c in residual):
            raise ArithmeticError("Newton lifting failed exact verification")
        self._coeffs = y
        return self

    def terms(self, N: int) -> list[GaussianRational]:
        self.extend(N)
        return self._coeffs[:N]


def series_root(P: BivariatePolynomial, y0, N: int) -> SeriesRoot:
    """Root of P in F[[z]] with constant term y0, computed to order N."""
    return SeriesRoot(P, y0).extend(N)


# --- the quotient ring F(z)[y]/(P) ---------------------------------------------------

class _Quotient:
    def __init__(self, P: BivariatePolynomial):
        self.P = P
        self.d = P.degree_y
        lc = RationalFunction(P.coeffs_y[-1])
        # y^d = -sum_{j<d} red[j] y^j
        self.red = [RationalFunction(c) / lc for c in P.coeffs_y[:-1]]
        self._py_inv = None
        self._yprime = None

    def reduce(self, v):
        v = list(v)
        d = self.d
        for top in range(len(v) - 1, d - 1, -1):
            c = v[top]
            if c.is_zero():
                continue
            for j in range(d):
                if not self.red[j].is_zero():
                    v[top - d + j] = v[top - d + j] - c * self.red[j]
        v = v[:d]
        return v + [RF_ZERO] * (d - len(v))

    def mul(self, a, b):
        out = [RF_ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x.is_zero():
                continue
            for j, y in enumerate(b):
                if not y.is_zero():
                    out[i + j] = out[i + j] + x * y
        return self.reduce(out)

    def from_polys(self, polys):
        """Element given by polynomial-in-z coefficients of y^j."""
        return self.reduce([RationalFunction(p) for p in polys] or [RF_ZERO])

    def inverse(self, a):
        """Inverse of ``a`` or ``None`` when it is a zero divisor."""
        d = self.d
        cols = []
        e = [RF_ONE] + [RF_ZERO] * (d - 1)
        for _ in range(d):
            cols.append(self.mul(a, e))
            e = self.reduce([RF_ZERO] + e)
        matrix = [[cols[k][i] for k in range(d)] for i in range(d)]
        return rf_solve(matrix, [RF_ONE] + [RF_ZERO] * (d - 1))

    def yprime(self):
        """dy/dz = -P_z / P_y as an element."""
        if self._yprime is None:
            py = self.from_polys(self.P.diff_y())
            inv = self.inverse(py)
            if inv is None:
                raise NotSquarefreeError("P is not squarefree in y; take its squarefree part first")
            pz = self.from_polys(self.P.diff_z())
            self._yprime = [-c for c in self.mul(pz, inv)]
        return self._yprime

    def derive(self, a):
        """Total derivative of sum c_k(z) y^k along the algebraic function y."""
        w = self.yprime()
        out = [c.derivative() for c in a]
        dy = [a[k] * k for k in range(1, len(a))]
        if dy and any(not c.is_zero() for c in dy):
            t = self.mul(dy, w)
            out = [x + y for x, y in zip(out, t)]
        return out

    def y(self):
        return self.reduce([RF_ZERO, RF_ONE])

    def const_poly_at_y(self, p: Polynomial):
        """p(y) for p with constant coefficients."""
        return self.reduce([RationalFunction(Polynomial([c])) for c in p.coeffs] or [RF_ZERO])


def alg_to_diffop(P: BivariatePolynomial) -> DiffOperator:
    """Differential operator of order <= deg_y P annihilating every root of P."""
    Q = _Quotient(P)
    Q.yprime()
    return relation_operator(DiffOperator, P.zvar, Q.y(), Q.derive, Q.d)


def compose_dfinite_algebraic(L: DiffOperator, P: BivariatePolynomial) -> DiffOperator:
    """Annihilator of f(g(z)) for every solution f of L and every root g of P.

    Works in the module spanned by ``(f^(i) o g) * y^k`` with
    ``D(f^(i) o g) = (f^(i+1) o g) * g'``.
    """
    if L.is_zero():
        raise ValueError("compose with the zero operator")
    Q = _Quotient(P)
    w = Q.yprime()
    r, d = L.order, Q.d
    if r == 0:
        return DiffOperator([1], P.zvar)
    lc_inv = Q.inverse(Q.const_poly_at_y(L.lc()))
    if lc_inv is None:
        raise NonInvertibleError("lc(L) evaluated at the roots of P is not invertible modulo P")
    # f^(r) o g = -sum_i red[i] * (f^(i) o g)
    red = [Q.mul(Q.const_poly_at_y(c), lc_inv) for c in L.coeffs[:-1]]

    def step(v):
        parts = [v[i * d:(i + 1) * d] for i in range(r)]
        out = [[RF_ZERO] * d for _ in range(r)]
        for i, e in enumerate(parts):
            if all(c.is_zero() for c in e):
                continue
            de = Q.derive(e)
            out[i] = [x + y for x, y in zip(out[i], de)]
            ew = Q.mul(e, w)
            if i + 1 < r:
                out[i + 1] = [x + y for x, y in zip(out[i + 1], ew)]
            else:
                for k in range(r):
                    t = Q.mul(ew, red[k])
                    out[k] = [x - y for x, y in zip(out[k], t)]
        return [c for part in out for c in part]

    start = [RF_ONE] + [RF_ZERO] * (r * d - 1)
    return relation_operator(DiffOperator, P.zvar, start, step, r * d)
