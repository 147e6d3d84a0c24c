"""Ore operator algebras F[z]<D_z> and F[n]<S_n> over F = Q(i).

Closure constructions (lclm, sums, products, the algebraic ansatz in
:mod:`dfinum.algebraic`) share one engine: an element of a finite-dimensional
F(z)-module is differentiated (or shifted) repeatedly until the iterates
become linearly dependent; the dependency gives the annihilating operator.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd

from .enclosure import DEFAULT_PREC, Enclosure, NumberValue
from .gaussian import GQ, ZERO, GaussianRational
from .poly import (RF_ONE, RF_ZERO, EchelonBasis, Polynomial, RationalFunction,
                   clear_denominators, poly_gcd)
from .roots import complex_roots

__all__ = [
    "OreOperator", "DiffOperator", "ShiftOperator", "SequenceWindow",
    "LeadingCoefficientZeroError", "AlgebraMismatchError",
    "op_mul", "lclm", "conjugate_op", "realify", "annihilator_sum", "annihilator_product",
    "diffop_to_rec", "rec_to_diffop", "homogenize", "partial_sum_annihilator",
    "geometric_twist", "singularities", "shift_point", "unroll", "right_divrem",
    "relation_operator",
]


class AlgebraMismatchError(TypeError):
    """Operands live in different operator algebras."""


class LeadingCoefficientZeroError(ArithmeticError):
    """The recurrence cannot be advanced because lc(L)(n) = 0."""

    def __init__(self, n: int, index: int):
        super().__init__(f"leading coefficient vanishes at n = {n}; "
                         f"a_{index} is not determined (supply initial terms past this index)")
        self.n = n
        self.index = index


class OreOperator:
    """``sum_j coeffs[j] * gen^j`` with polynomial coefficients."""

    kind = ""
    gen = ""
    default_var = ""

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs, var: str | None = None):
        cs = [c if isinstance(c, Polynomial) else Polynomial(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)
        self.var = var or self.default_var

    def _new(self, coeffs):
        return type(self)(coeffs, self.var)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self) -> Polynomial:
        return self.coeffs[-1] if self.coeffs else Polynomial()

    def __getitem__(self, j) -> Polynomial:
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else Polynomial()

    def degree(self) -> int:
        return max((c.degree for c in self.coeffs), default=-1)

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.coeffs)

    def _check(self, other):
        if not isinstance(other, OreOperator) or other.kind != self.kind:
            raise AlgebraMismatchError(f"cannot combine {self.kind} and "
                                       f"{getattr(other, 'kind', type(other).__name__)} operators")

    def __add__(self, other):
        if isinstance(other, (Polynomial, GaussianRational, int, Fraction)):
            other = self._new([other])
        self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return self._new([self[j] + other[j] for j in range(n)])

    def __neg__(self):
        return self._new([-c for c in self.coeffs])

    def __sub__(self, other):
        if isinstance(other, (Polynomial, GaussianRational, int, Fraction)):
            other = self._new([other])
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (Polynomial, GaussianRational, int, Fraction)):
            other = self._new([other])
        return op_mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (Polynomial, GaussianRational, int, Fraction)):
            return self._new([c * other for c in self.coeffs])
        return NotImplemented

    def __pow__(self, k: int):
        result = self._new([1])
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        return isinstance(other, OreOperator) and other.kind == self.kind and \
            self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.kind, self.coeffs))

    def conj(self):
        return self._new([c.conj() for c in self.coeffs])

    def normalized(self):
        return self._new(_normalize_coeffs(self.coeffs, keep_integer_roots=self.kind == "shift"))

    def to_text(self) -> str:
        from .textio import format_operator
        return format_operator(self)

    def __repr__(self):
        return f"{type(self).__name__}({self.to_text()})"

    # subclasses: commutation of gen^i past a coefficient
    def _gen_times_poly(self, i: int, p):
        raise NotImplementedError

    def _gen_on_rf(self, c):
        raise NotImplementedError


class DiffOperator(OreOperator):
    kind = "diff"
    gen = "D"
    default_var = "z"
    __slots__ = ()

    @classmethod
    def gen_op(cls, var="z"):
        return cls([0, 1], var)

    def _gen_times_poly(self, i, p):
        # D^i * p = sum_k C(i,k) p^(k) D^(i-k)
        out = []
        d = p
        for k in range(i + 1):
            if d.is_zero():
                break
            out.append((i - k, d * comb(i, k)))
            d = d.derivative()
        return out

    def apply_series(self, f):
        """Coefficients of ``L*f`` for a truncated power series, valid part only."""
        N = len(f)
        r = self.order
        out = [ZERO] * max(0, N - r)
        for j, p in enumerate(self.coeffs):
            if p.is_zero():
                continue
            # D^j f
            g = []
            for m in range(N - j):
                fac = 1
                for t in range(1, j + 1):
                    fac *= m + t
                g.append(f[m + j] * fac)
            for m in range(len(out)):
                acc = out[m]
                for a, c in enumerate(p.coeffs):
                    if a > m:
                        break
                    if not c.is_zero():
                        acc = acc + c * g[m - a]
                out[m] = acc
        return out


class ShiftOperator(OreOperator):
    kind = "shift"
    gen = "S"
    default_var = "n"
    __slots__ = ()

    @classmethod
    def gen_op(cls, var="n"):
        return cls([0, 1], var)

    def _gen_times_poly(self, i, p):
        return [(i, p.taylor_shift(i))]

    def apply_sequence(self, a, offset: int = 0):
        """``(L*a)_n`` for every n whose window fits inside ``a`` (``a[0]`` is ``a_offset``)."""
        r = self.order
        out = []
        for k in range(len(a) - r):
            n = offset + k
            acc = ZERO
            for j, p in enumerate(self.coeffs):
                if not p.is_zero():
                    acc = acc + p(n) * a[k + j]
            out.append(acc)
        return out


def _same_kind(a: OreOperator, b: OreOperator):
    a._check(b)


def op_mul(A: OreOperator, B: OreOperator) -> OreOperator:
    """Product in the Ore algebra (D*z = z*D + 1, S*n = (n+1)*S)."""
    _same_kind(A, B)
    if A.is_zero() or B.is_zero():
        return A._new([])
    out = [Polynomial()] * (A.order + B.order + 1)
    for i, a in enumerate(A.coeffs):
        if a.is_zero():
            continue
        for j, b in enumerate(B.coeffs):
            if b.is_zero():
                continue
            for k, q in A._gen_times_poly(i, b):
                out[k + j] = out[k + j] + a * q
    return A._new(out)


# --- normalization -----------------------------------------------------------

def _gauss_int_gcd(x, y):
    """gcd in Z[i] of (re, im) integer pairs."""
    while y != (0, 0):
        a, b = x
        c, d = y
        n = c * c + d * d
        # x / y rounded to nearest Gaussian integer
        qr = a * c + b * d
        qi = b * c - a * d
        qr = (2 * qr + n) // (2 * n)
        qi = (2 * qi + n) // (2 * n)
        r = (a - (qr * c - qi * d), b - (qr * d + qi * c))
        x, y = y, r
    return x


def nonneg_integer_roots(p: Polynomial) -> list[int]:
    """Sorted nonnegative integer roots of p (p nonzero)."""
    if p.degree < 1:
        return []
    q = Polynomial([c.re for c in p.coeffs])
    if q.degree < 1:
        q = Polynomial([c.im for c in p.coeffs])
        if q.degree < 1:
            return []
    q = q.scale(q.denominator_lcm())
    cs = [int(c.re) for c in q.coeffs]
    while cs and cs[0] == 0:
        cs.pop(0)
    out = [0] if len(cs) < len(q.coeffs) else []
    lead = abs(cs[-1])
    bound = 1 + max(abs(c) for c in cs[:-1]) // lead if len(cs) > 1 else 0
    if bound <= 100000:
        cands = range(1, bound + 1)
    else:
        from .roots import _approx_roots
        cands = sorted({max(0, int(round(float(z.real)))) for z in _approx_roots(Polynomial(cs), 64)})
    for n in cands:
        if n <= 0:
            continue
        acc = 0
        for c in reversed(cs):
            acc = acc * n + c
        if acc == 0 and p(n).is_zero():
            out.append(n)
    return sorted(out)


def _integer_root_part(g: Polynomial) -> Polynomial:
    out = Polynomial([1])
    rest = g
    for k in nonneg_integer_roots(g):
        f = Polynomial([-k, 1])
        while True:
            q, r = rest.divmod(f)
            if not r.is_zero():
                break
            rest = q
            out = out * f
    return out


def _normalize_coeffs(coeffs, keep_integer_roots=False):
    """Primitive part over F[x], then Gaussian-integer content 1, unit-normalised lc.

    With ``keep_integer_roots`` the factors of the content vanishing at
    nonnegative integers stay in place, so recurrences valid for every n >= 0
    keep that property.
    """
    cs = [c for c in coeffs]
    if not cs:
        return cs
    g = Polynomial()
    for c in cs:
        g = poly_gcd(g, c)
        if g.degree == 0:
            break
    if g.degree > 0 and keep_integer_roots:
        g = g.exact_div(_integer_root_part(g))
    if g.degree > 0:
        cs = [c.exact_div(g) for c in cs]
    den = 1
    for c in cs:
        d = c.denominator_lcm()
        den = den * d // gcd(den, d)
    ints = []
    content = (0, 0)
    for c in cs:
        row = []
        for x in c.coeffs:
            a, b, d = x.parts
            row.append((a * (den // d), b * (den // d)))
            if content != (1, 0):
                content = _gauss_int_gcd(content, row[-1])
        ints.append(row)
    # unit so that the leading coefficient of lc lies in re > 0, im >= 0
    la, lb = ints[-1][-1]
    ca, cb = content
    n = ca * ca + cb * cb
    qa, qb = (la * ca + lb * cb) // n, (lb * ca - la * cb) // n  # lc / content
    unit = (1, 0)
    for u in ((1, 0), (0, -1), (-1, 0), (0, 1)):
        ra, rb = qa * u[0] - qb * u[1], qa * u[1] + qb * u[0]
        if ra > 0 and rb >= 0:
            unit = u
            break
    # divide by content, multiply by unit: factor = unit / content
    fa = unit[0] * ca + unit[1] * cb
    fb = unit[1] * ca - unit[0] * cb
    out = []
    for row in ints:
        new = []
        for a, b in row:
            ra, rb = a * fa - b * fb, a * fb + b * fa
            new.append(GQ(Fraction(ra, n), Fraction(rb, n)))
        out.append(Polynomial(new))
    return out


# --- the dependency engine ----------------------------------------------------

def relation_operator(cls, var, start, step, max_order: int, normalize: bool = True):
    """Smallest-order operator ``sum c_k gen^k`` killing ``start`` in a module.

    ``start`` is a vector over F(z); ``step`` maps the vector of an element
    to the vector of its derivative (or shift). Raises if no relation is found
    up to ``max_order``.
    """
    basis = EchelonBasis()
    v = start
    for k in range(max_order + 1):
        dep = basis.add(v)
        if dep is not None:
            polys = clear_denominators(dep)
            op = cls(polys, var)
            return op.normalized() if normalize else op
        if k < max_order:
            v = step(v)
    raise ArithmeticError(f"no relation found up to order {max_order}")


def _rf(x) -> RationalFunction:
    return RationalFunction.coerce(x)


def _quotient_step(op: OreOperator):
    """Left multiplication by the generator on F(z)[gen]/F(z)[gen]*op (coordinates < order)."""
    r = op.order
    lc = _rf(op.lc())
    reduce_by = [(_rf(c) / lc) for c in op.coeffs[:-1]]
    if op.kind == "diff":
        def step(v):
            out = [c.derivative() for c in v] + [RF_ZERO]
            for i, c in enumerate(v):
                out[i + 1] = out[i + 1] + c
            return _reduce_top(out, reduce_by, r)
    else:
        def step(v):
            out = [RF_ZERO] + [c.taylor_shift(1) for c in v]
            return _reduce_top(out, reduce_by, r)
    return step


def _reduce_top(out, reduce_by, r):
    top = out[r]
    out = out[:r]
    if not top.is_zero():
        for i in range(r):
            if not reduce_by[i].is_zero():
                out[i] = out[i] - top * reduce_by[i]
    return out


def lclm(A: OreOperator, B: OreOperator) -> OreOperator:
    """Least common left multiple via the order ansatz on remainders modulo A and B."""
    _same_kind(A, B)
    if A.is_zero() or B.is_zero():
        raise ValueError("lclm of a zero operator")
    if A.order == 0:
        return B.normalized()
    if B.order == 0:
        return A.normalized()
    sa, sb = _quotient_step(A), _quotient_step(B)
    ra = A.order

    def step(v):
        return sa(v[:ra]) + sb(v[ra:])

    start = [RF_ONE] + [RF_ZERO] * (A.order - 1) + [RF_ONE] + [RF_ZERO] * (B.order - 1)
    return relation_operator(type(A), A.var, start, step, A.order + B.order)


annihilator_sum = lclm


def conjugate_op(L: OreOperator) -> OreOperator:
    """Conjugate every coefficient."""
    return L.conj()


def realify(L: OreOperator) -> OreOperator:
    """Operator with real coefficients annihilating every solution of L (lclm with its conjugate)."""
    if L.is_zero():
        raise ValueError("realify of the zero operator")
    if L.is_real():
        return L.normalized()
    return lclm(L, L.conj())


def annihilator_product(A: OreOperator, B: OreOperator) -> OreOperator:
    """Annihilator of f*g (termwise for sequences) from annihilators of f and g."""
    _same_kind(A, B)
    if A.is_zero() or B.is_zero():
        raise ValueError("annihilator_product of a zero operator")
    ra, rb = A.order, B.order
    if ra == 0 or rb == 0:
        # a solution of an order-0 operator vanishes wherever its coefficient does not
        return A._new([1]) if ra == 0 else B._new([1])
    red_a = [_rf(c) / _rf(A.lc()) for c in A.coeffs[:-1]]
    red_b = [_rf(c) / _rf(B.lc()) for c in B.coeffs[:-1]]
    dim = ra * rb

    def idx(i, j):
        return i * rb + j

    def add_term(out, i, j, c):
        # c * f^(i) g^(j) with i <= ra, j <= rb, reducing the top index
        if c.is_zero():
            return
        if i == ra:
            for k in range(ra):
                if not red_a[k].is_zero():
                    add_term(out, k, j, -(c * red_a[k]))
            return
        if j == rb:
            for k in range(rb):
                if not red_b[k].is_zero():
                    add_term(out, i, k, -(c * red_b[k]))
            return
        out[idx(i, j)] = out[idx(i, j)] + c

    if A.kind == "diff":
        def step(v):
            out = [RF_ZERO] * dim
            for i in range(ra):
                for j in range(rb):
                    c = v[idx(i, j)]
                    if c.is_zero():
                        continue
                    add_term(out, i, j, c.derivative())
                    add_term(out, i + 1, j, c)
                    add_term(out, i, j + 1, c)
            return out
    else:
        def step(v):
            out = [RF_ZERO] * dim
            for i in range(ra):
                for j in range(rb):
                    c = v[idx(i, j)]
                    if c.is_zero():
                        continue
                    # S(a_{n+i} b_{n+j}) = a_{n+i+1} b_{n+j+1}
                    add_term(out, i + 1, j + 1, c.taylor_shift(1))
            return out

    start = [RF_ZERO] * dim
    start[0] = RF_ONE
    return relation_operator(type(A), A.var, start, step, dim)


# --- conversions ----------------------------------------------------------------

def _rising(x: Polynomial, k: int) -> Polynomial:
    """(x+1)(x+2)...(x+k) as a polynomial in the variable x."""
    out = Polynomial([1])
    for t in range(1, k + 1):
        out = out * Polynomial([t, 1])
    return out


def diffop_to_rec(L: DiffOperator, var: str = "n") -> ShiftOperator:
    """Recurrence satisfied by the coefficients of every power-series solution of L.

    The relation holds for all n >= 0 with a_n = 0 for n < 0.
    """
    if L.is_zero():
        raise ValueError("diffop_to_rec of the zero operator")
    x = Polynomial.x()
    # coefficient of z^m in z^a D^b f is (m-a+1)...(m-a+b) f_{m-a+b}
    terms = {}
    for b, p in enumerate(L.coeffs):
        for a, c in enumerate(p.coeffs):
            if c.is_zero():
                continue
            s = b - a
            q = _rising(x, b).taylor_shift(-a) * c
            terms[s] = terms.get(s, Polynomial()) + q
    terms = {s: q for s, q in terms.items() if not q.is_zero()}
    smin = min(terms)
    smax = max(terms)
    coeffs = [Polynomial()] * (smax - smin + 1)
    for s, q in terms.items():
        # relation at m, re-indexed by n = m + smin
        coeffs[s - smin] = q.taylor_shift(-smin)
    return ShiftOperator(coeffs, var).normalized()


def _stirling2_rows(k: int):
    rows = [[1]]
    for n in range(1, k + 1):
        prev = rows[-1]
        row = [0] * (n + 1)
        for j in range(1, n + 1):
            row[j] = j * (prev[j] if j < len(prev) else 0) + prev[j - 1]
        rows.append(row)
    return rows


def rec_to_diffop(L: ShiftOperator, var: str = "z"):
    """Differential operator M with M*f a polynomial for the generating function f of a solution.

    Returns ``(M, bound)`` with ``deg(M*f) <= bound``.
    """
    if L.is_zero():
        raise ValueError("rec_to_diffop of the zero operator")
    r = L.order
    dmax = max(p.degree for p in L.coeffs)
    st = _stirling2_rows(max(dmax, 0))
    out = {}
    for j, p in enumerate(L.coeffs):
        if p.is_zero():
            continue
        # z^(r-j) p_j(theta - j), theta^k = sum_b S2(k,b) z^b D^b
        q = p.taylor_shift(-j)
        for k, c in enumerate(q.coeffs):
            if c.is_zero():
                continue
            for b in range(k + 1):
                s = st[k][b]
                if s:
                    mono = Polynomial.monomial(r - j + b, c * s)
                    out[b] = out.get(b, Polynomial()) + mono
    order = max(out) if out else 0
    coeffs = [out.get(b, Polynomial()) for b in range(order + 1)]
    M = DiffOperator(coeffs, var)
    # scale by a constant only: dividing out polynomial content would break M*f = poly
    lcc = M.lc().lc()
    den = 1
    for c in M.coeffs:
        d = c.denominator_lcm()
        den = den * d // gcd(den, d)
    M = DiffOperator([c * GQ(den) for c in M.coeffs], var)
    if lcc.is_real() and lcc.re < 0:
        M = -M
    return M, max(r - 1, 0)


def homogenize(M: DiffOperator, d: int) -> DiffOperator:
    """D^(d+1) * M, which annihilates f whenever M*f is a polynomial of degree <= d."""
    D = DiffOperator.gen_op(M.var)
    return op_mul(D ** (d + 1), M).normalized()


def partial_sum_annihilator(L: ShiftOperator) -> ShiftOperator:
    """Annihilator of s_n = a_0 + ... + a_n: (L with n -> n+1) * (S - 1)."""
    if L.is_zero():
        raise ValueError("partial_sum_annihilator of the zero operator")
    shifted = ShiftOperator([p.taylor_shift(1) for p in L.coeffs], L.var)
    return op_mul(shifted, ShiftOperator([-1, 1], L.var)).normalized()


def geometric_twist(L: ShiftOperator, zeta) -> ShiftOperator:
    """Annihilator of a_n * zeta^n."""
    zeta = GQ(zeta)
    if zeta.is_zero():
        raise ValueError("geometric_twist by zero: the twisted sequence degenerates")
    inv = zeta.inverse()
    return ShiftOperator([p * inv ** j for j, p in enumerate(L.coeffs)], L.var).normalized()


def singularities(L: DiffOperator, prec: int = DEFAULT_PREC):
    """Certified disks around the roots of lc(L), with multiplicities."""
    if L.is_zero():
        raise ValueError("singularities of the zero operator")
    return complex_roots(L.lc(), prec)


def shift_point(L: DiffOperator, beta) -> DiffOperator:
    """Replace z by z + beta in every coefficient."""
    beta = GQ(beta)
    if beta.is_zero():
        return L
    return L._new([p.taylor_shift(beta) for p in L.coeffs]).normalized()


def right_divrem(A: OreOperator, B: OreOperator):
    """Right division ``A = Q*B + R`` over F(z); returns coefficient lists of Q and R."""
    _same_kind(A, B)
    if B.is_zero():
        raise ZeroDivisionError("right division by the zero operator")
    rem = [_rf(c) for c in A.coeffs]
    rb = B.order
    q = [RF_ZERO] * max(len(rem) - rb, 0)
    lcb = _rf(B.lc())
    while len(rem) - 1 >= rb and rem:
        k = len(rem) - 1 - rb
        c = rem[-1] / lcb
        q[k] = c
        # subtract c * gen^k * B
        for pw, poly in ((pw, poly) for j, b in enumerate(B.coeffs) if not b.is_zero()
                         for pw, poly in _shift_terms(A, k, b, j)):
            rem[pw] = rem[pw] - c * _rf(poly)
        while rem and rem[-1].is_zero():
            rem.pop()
    return q, rem


def _shift_terms(A, k, b, j):
    for pw, poly in A._gen_times_poly(k, b):
        yield pw + j, poly


# --- sequences -------------------------------------------------------------------

@dataclass(frozen=True)
class SequenceWindow:
    """Consecutive terms a_offset, ..., a_(offset+len-1)."""

    offset: int
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(
            v if isinstance(v, Enclosure) else GQ(v) for v in self.values))
        if self.offset < 0:
            raise ValueError("window offset must be a natural number")

    def __len__(self):
        return len(self.values)

    def __getitem__(self, n: int) -> NumberValue:
        return self.values[n - self.offset]

    def is_exact(self) -> bool:
        return all(isinstance(v, GaussianRational) for v in self.values)


def unroll(L: ShiftOperator, initial: SequenceWindow, N: int, budget: int | None = None,
           prec: int = DEFAULT_PREC) -> SequenceWindow:
    """Extend ``initial`` to ``N`` terms with the recurrence ``L``.

    Exact inputs give exact outputs; otherwise enclosure arithmetic at ``prec`` bits.
    ``budget`` caps the number of recurrence steps.
    """
    r = L.order
    if r < 1:
        raise ValueError("unroll needs a recurrence of order >= 1")
    vals = list(initial.values)
    if len(vals) < r:
        raise ValueError(f"need {r} initial terms, got {len(vals)}")
    exact = initial.is_exact()
    if not exact:
        vals = [v if isinstance(v, Enclosure) else Enclosure.exact(v, prec) for v in vals]
    coeffs = L.coeffs
    steps = 0
    while len(vals) < N:
        if budget is not None and steps >= budget:
            break
        k = len(vals) - r
        n = initial.offset + k
        lcv = coeffs[r](n)
        if lcv.is_zero():
            raise LeadingCoefficientZeroError(n, n + r)
        if exact:
            acc = ZERO
            for j in range(r):
                p = coeffs[j]
                if p.coeffs:
                    acc = acc + p(n) * vals[k + j]
            vals.append(-acc / lcv)
        else:
            acc = None
            for j in range(r):
                p = coeffs[j]
                if p.coeffs:
                    t = vals[k + j] * Enclosure.exact(p(n), prec)
                    acc = t if acc is None else acc + t
            if acc is None:
                vals.append(Enclosure.zero(prec))
            else:
                vals.append(-acc * Enclosure.exact(lcv.inverse(), prec))
        steps += 1
    return SequenceWindow(initial.offset, tuple(vals))
