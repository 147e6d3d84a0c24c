"""D-finite numbers as limits of P-recursive sequences.

Three pieces:

* the algebraic-sequence constructor: from a polynomial p and a rough root
  approximation eta, a P-recursive sequence converging to the root of p near eta;
* numeric limit detection with a heuristic tail estimate;
* the transform from a sequence limit to the value at one of
  ``g(z) = (1 - z) * sum a_n z^n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .algebraic import BivariatePolynomial, CriticalRootError, alg_to_diffop, series_root
from .enclosure import Enclosure
from .gaussian import GQ, GaussianRational
from .ore import (DiffOperator, LeadingCoefficientZeroError, SequenceWindow, ShiftOperator,
                  annihilator_product, diffop_to_rec, homogenize, nonneg_integer_roots,
                  rec_to_diffop)
from .poly import Polynomial
from .roots import complex_roots

__all__ = [
    "ConvergentRecurrence", "LimitResult", "RootMatch", "NoConvergenceError", "RootIdentificationError",
    "build_lemma_polynomial", "root_sequence", "limit_of_recurrence", "to_function_limit",
    "identify_root", "root_limit", "RIGOR_FLAG",
]

RIGOR_FLAG = "heuristic-tail"
WINDOW = 8
RATIO_CAP = 7 / 8
INFLATION = 4
MIN_POWER = 1.5
EXACT_BITS_LIMIT = 4000


class NoConvergenceError(ArithmeticError):
    """No evidence of convergence (contraction of differences) within the budget."""


class RootIdentificationError(ValueError):
    """The limit enclosure meets no certified root disk, or more than one."""

    def __init__(self, message, kind: str, disks=()):
        super().__init__(message)
        self.kind = kind
        self.disks = tuple(disks)


@dataclass(frozen=True)
class ConvergentRecurrence:
    """A recurrence plus enough initial terms to unroll it indefinitely."""

    op: ShiftOperator
    initial: SequenceWindow
    target_hint: Enclosure | None = None

    def __post_init__(self):
        r = self.op.order
        if r < 1:
            raise ValueError("recurrence must have order >= 1")
        if len(self.initial) < r:
            raise ValueError(f"need at least {r} initial terms, got {len(self.initial)}")
        first_free = self.initial.offset + len(self.initial) - r
        bad = [m for m in nonneg_integer_roots(self.op.lc()) if m >= first_free]
        if bad:
            raise LeadingCoefficientZeroError(bad[0], bad[0] + r)

    def terms(self, N: int) -> list:
        """a_offset, ..., a_(offset+N-1) (exact when the window is exact)."""
        return list(_TermStream(self, None).take(N))


@dataclass
class LimitResult:
    value: Enclosure
    regime: str
    terms: int
    ratio: float | None = None
    tol_met: bool = True
    diagnostics: dict = field(default_factory=dict)

    @property
    def rigor(self) -> str:
        return RIGOR_FLAG


@dataclass(frozen=True)
class RootMatch:
    disk: Enclosure
    multiplicity: int
    index: int


def build_lemma_polynomial(p: Polynomial, eta) -> BivariatePolynomial:
    """``P(z, y) = p((1 - z) y) - p(eta) (1 - z)``; y = eta solves P(0, y) = 0."""
    if p.degree < 1:
        raise ValueError("p must be nonconstant")
    eta = GQ(eta)
    one_minus_z = Polynomial([1, -1])
    rows = []
    power = Polynomial([1])
    for c in p.coeffs:
        rows.append(power * c)
        power = power * one_minus_z
    rows[0] = rows[0] - one_minus_z * p(eta)
    return BivariatePolynomial(rows, "z", "y")


def root_sequence(p: Polynomial, eta) -> ConvergentRecurrence:
    """Coefficient sequence of the root series of the lemma polynomial with constant term eta."""
    eta = GQ(eta)
    P = build_lemma_polynomial(p, eta)
    try:
        root = series_root(P, eta, 1)
    except CriticalRootError as exc:
        raise CriticalRootError(f"{exc}; p'({eta}) = 0, try a slightly perturbed eta") from None
    rec = diffop_to_rec(alg_to_diffop(P))
    r = rec.order
    roots = nonneg_integer_roots(rec.lc())
    n0 = max(r, roots[-1] + r + 1 if roots else 0)
    window = SequenceWindow(0, tuple(root.terms(n0)))
    return ConvergentRecurrence(rec, window)


SHADOW_BITS = 32


class _TermStream:
    """Unroll exactly while the numbers stay small, then numerically.

    Balls pushed through a recurrence suffer from the wrapping effect (the
    radius of s_(n+2) = 2 s_(n+1) - s_n grows like (1 + sqrt 2)^n), so the
    numeric phase iterates midpoints at ``bits`` and ``bits + SHADOW_BITS`` and
    encloses the result by four times their difference. Initial terms with a
    nonzero radius switch to plain ball arithmetic, which stays rigorous.
    """

    def __init__(self, c: ConvergentRecurrence, bits: int | None):
        self.c = c
        self.bits = bits
        self.r = c.op.order
        self.vals = list(c.initial.values)
        self.exact = c.initial.is_exact()
        self.balls = any(isinstance(v, Enclosure) and not v.is_exact() for v in self.vals)
        if not self.exact and bits is not None:
            self._to_numeric()

    def _to_numeric(self):
        tail = self.vals[-self.r:]
        if self.balls:
            self.hi = [v if isinstance(v, Enclosure) else Enclosure.exact(v, self.bits) for v in tail]
            self.lo = None
        else:
            self.hi = [_mid_ball(v, self.bits + SHADOW_BITS) for v in tail]
            self.lo = [_mid_ball(v, self.bits) for v in tail]
        self.exact = False

    @staticmethod
    def _size(v: GaussianRational) -> int:
        a, b, d = v.parts
        return max(abs(a).bit_length(), abs(b).bit_length(), d.bit_length())

    def take(self, N: int):
        for v in self.c.initial.values[:N]:
            yield v
        n = self.c.initial.offset + len(self.c.initial) - self.r
        for _ in range(N - len(self.c.initial)):
            yield self._step(n)
            n += 1

    def _step(self, n: int):
        coeffs = self.c.op.coeffs
        r = self.r
        lead = coeffs[r](n)
        if lead.is_zero():
            raise LeadingCoefficientZeroError(n, n + r)
        if self.exact:
            window = self.vals[-r:]
            acc = GQ(0)
            for j in range(r):
                if coeffs[j].coeffs:
                    acc = acc + coeffs[j](n) * window[j]
            v = -acc / lead
            self.vals = window[1:] + [v]
            if self.bits is not None and self._size(v) > EXACT_BITS_LIMIT:
                self._to_numeric()
            return v
        cs = [coeffs[j](n) if coeffs[j].coeffs else None for j in range(r)]
        inv = lead.inverse()
        if self.lo is None:
            v = _ball_step(self.hi, cs, inv, self.bits)
            self.hi = self.hi[1:] + [v]
            return v
        hi = _mid_ball(_ball_step(self.hi, cs, inv, self.bits + SHADOW_BITS), self.bits + SHADOW_BITS)
        lo = _mid_ball(_ball_step(self.lo, cs, inv, self.bits), self.bits)
        self.hi = self.hi[1:] + [hi]
        self.lo = self.lo[1:] + [lo]
        diff = (hi - lo).abs_upper()
        return Enclosure(hi.a, hi.b, hi.e, (0, 0), self.bits).add_error(4 * diff)


def _mid_ball(v, bits):
    if isinstance(v, Enclosure):
        return Enclosure(v.a, v.b, v.e, (0, 0), bits)
    return _mid_ball(Enclosure.exact(v, bits), bits)


def _ball_step(window, cs, inv, bits):
    acc = Enclosure.zero(bits)
    for w, c in zip(window, cs):
        if c is not None:
            acc = acc + w * Enclosure.exact(c, bits)
    return -acc * Enclosure.exact(inv, bits)


def _log2_abs(x) -> float:
    if isinstance(x, Enclosure):
        return x.log2_upper()
    if x.is_zero():
        return -math.inf
    q = x.norm()
    return 0.5 * (math.log2(q.numerator) - math.log2(q.denominator))


def _is_zero_diff(d) -> bool:
    if isinstance(d, Enclosure):
        return d.is_exact() and d.a == 0 and d.b == 0
    return d.is_zero()


def _radius_log2(x) -> float:
    return x.radius_log2() if isinstance(x, Enclosure) else -math.inf


def _attempt(c: ConvergentRecurrence, tol: Fraction, budget: int, bits: int):
    stream = _TermStream(c, bits)
    tol_log2 = math.log2(tol) if tol > 0 else -math.inf
    hist = []  # (n, log2 |a_n - a_(n-1)|) for nonzero differences
    lookup = {}
    zero_run = 0
    prev = None
    best = None
    n = c.initial.offset - 1
    for a in stream.take(budget):
        n += 1
        if prev is None:
            prev = a
            continue
        d = a - prev
        prev = a
        if _is_zero_diff(d):
            zero_run += 1
        else:
            zero_run = 0
            hist.append((n, _log2_abs(d)))
            lookup[n] = hist[-1][1]
        if _radius_log2(a) > tol_log2 - 3:
            return None  # rounding noise would swamp the tolerance; caller raises precision
        if zero_run >= max(WINDOW, c.op.order + 1) and n >= len(c.initial):
            return LimitResult(_ball(a, bits), "stationary", n + 1, 0.0)
        if len(hist) <= WINDOW:
            continue
        est = _geometric_tail(hist) or _power_tail(hist, lookup)
        if est is None:
            continue
        regime, ratio, tail_log2 = est
        best = (regime, ratio, tail_log2, a, n + 1)
        res = _finish(best, bits, True)
        if res.value.radius <= tol:
            return res
    if best is None:
        raise NoConvergenceError(f"no convergence evidence within {budget} terms")
    return _finish(best, bits, False)


def _ball(a, bits):
    return a if isinstance(a, Enclosure) else Enclosure.exact(a, bits)


def _finish(cand, bits, met):
    regime, ratio, tail_log2, a, n = cand
    val = _ball(a, bits).add_error(Fraction(2) ** math.ceil(tail_log2))
    return LimitResult(val, regime, n, ratio, met, {"tail_log2": tail_log2})


def _geometric_tail(hist):
    recent = hist[-(WINDOW + 1):]
    rates = [(m2 - m1) / (n2 - n1) for (n1, m1), (n2, m2) in zip(recent, recent[1:])]
    worst = max(rates)
    if worst > math.log2(RATIO_CAP):
        return None
    rho = 2.0 ** worst
    return "geometric", rho, recent[-1][1] + math.log2(INFLATION * rho / (1 - rho))


def _power_tail(hist, lookup):
    n, m = hist[-1]
    if n < 32:
        return None
    half, quarter = n // 2, n // 4
    if half not in lookup or quarter not in lookup:
        return None
    s1 = -(m - lookup[half]) / math.log2(n / half)
    s2 = -(lookup[half] - lookup[quarter]) / math.log2(half / quarter)
    recent = hist[-(WINDOW + 1):]
    if any(m2 > m1 for (_, m1), (_, m2) in zip(recent, recent[1:])):
        return None
    s = min(s1, s2)
    if s < MIN_POWER or abs(s1 - s2) > 0.2 * s1:
        return None
    return "power-law", s, m + math.log2(INFLATION * n / (s - 1))


def limit_of_recurrence(c: ConvergentRecurrence, tol=Fraction(1, 10 ** 30), budget: int = 10_000,
                        max_bits: int = 8192) -> LimitResult:
    """Heuristic enclosure of lim a_n.

    The midpoint is the last iterate; the radius is the tail extrapolated from
    the successive differences (geometric decay over the last ``WINDOW`` steps,
    or else a power law fitted on [n/4, n]), inflated by ``INFLATION``.
    Stops as soon as the radius is at most ``tol``; otherwise returns the
    last estimate at the budget with ``tol_met`` False.
    """
    tol = Fraction(tol)
    bits = max(64, int(-math.log2(tol)) + 64 if tol > 0 else 256)
    while True:
        res = _attempt(c, tol, budget, bits)
        if res is not None:
            res.diagnostics.update(working_bits=bits, rigor=RIGOR_FLAG)
            return res
        if bits >= max_bits:
            raise NoConvergenceError(f"rounding error exceeds the tolerance even at {bits} bits")
        bits *= 2


def to_function_limit(c: ConvergentRecurrence):
    """Annihilator of ``g(z) = (1 - z) * sum a_n z^n``; the limit equals g(1-)."""
    M, bound = rec_to_diffop(c.op)
    # terms before the window are taken as 0; the relation may fail there, which
    # only changes M*f by a polynomial of degree < offset + order
    bound += c.initial.offset
    H = homogenize(M, bound)
    one_minus_z = DiffOperator([Polynomial([1]), Polynomial([1, -1])], M.var)
    G = annihilator_product(H, one_minus_z)
    note = "lim a_n = lim_{z->1-} g(z) with g(z) = (1-z)*sum a_n z^n"
    return G, note


def identify_root(p: Polynomial, value: Enclosure, prec: int = 128):
    """Certified root disks of p that meet the enclosure."""
    out = []
    for i, (disk, mult) in enumerate(complex_roots(p, prec)):
        if disk.overlaps(value):
            out.append(RootMatch(disk, mult, i))
    return out


def root_limit(p: Polynomial, eta, tol=Fraction(1, 10 ** 12), budget: int = 200):
    """Run the root-sequence pipeline and match its limit to one certified root disk.

    On zero or several matches the budget is doubled and the tolerance squared
    once before giving up with :class:`RootIdentificationError`.
    """
    c = root_sequence(p, eta)
    tol = Fraction(tol)
    for attempt in range(2):
        res = limit_of_recurrence(c, tol, budget)
        matches = identify_root(p, res.value, 128 if attempt == 0 else 512)
        if len(matches) == 1:
            return c, res, matches[0]
        budget *= 2
        tol = tol * tol
    kind = "ambiguous" if matches else "none"
    msg = ("limit enclosure meets several root disks" if matches else
           "limit enclosure meets no root disk (divergence or a spurious limit)")
    raise RootIdentificationError(f"{kind} root: {msg}", kind, [m.disk for m in matches])
