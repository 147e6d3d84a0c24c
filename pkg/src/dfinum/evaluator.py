"""Enclosures of D-finite function values by Taylor summation and analytic continuation.

A :class:`DFiniteInstance` pins one solution of a differential operator by
its derivatives at an ordinary base point. Values elsewhere are obtained by
summing the local Taylor expansion (coefficients from the operator's
recurrence) and, beyond the first disk of convergence, by transporting the
derivative vector along a path of ordinary points.

Tail bounds are heuristic: once ``TAIL_WINDOW`` consecutive term ratios stay
below ``TAIL_RATIO`` the remaining sum is bounded by the geometric series of
the worst observed ratio, inflated by ``TAIL_INFLATION``. Every result is
flagged ``rigor = "heuristic-tail"``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, isqrt

from .enclosure import Enclosure, NumberValue
from .gaussian import GQ, ZERO, GaussianRational
from .ore import DiffOperator, shift_point, singularities
from .poly import Polynomial

__all__ = [
    "DFiniteInstance", "EvalPath", "EvalResult", "SingularPointError", "PathError", "BudgetError",
    "local_taylor", "evaluate_local", "continue_to", "auto_path", "evaluate", "safe_radius",
    "SAFETY", "RIGOR_FLAG",
]

SAFETY = Fraction(3, 4)
TAIL_WINDOW = 8
TAIL_RATIO = 7 / 8
TAIL_INFLATION = 4
RIGOR_FLAG = "heuristic-tail"
MAX_TERMS = 200_000


class SingularPointError(ValueError):
    """A base or evaluation point is (or may be) a singularity of the operator."""

    def __init__(self, message, enclosure=None):
        super().__init__(message)
        self.enclosure = enclosure


class PathError(ValueError):
    """No admissible path, or a supplied path violates the step invariant."""

    def __init__(self, message, blocking=()):
        super().__init__(message)
        self.blocking = tuple(blocking)


class BudgetError(ArithmeticError):
    """The Taylor series showed no usable decay within the term budget."""


# --- geometry helpers -------------------------------------------------------------

def _sqrt_lower(q: Fraction, bits: int = 64) -> Fraction:
    if q <= 0:
        return Fraction(0)
    s = 1 << (2 * bits)
    return Fraction(isqrt(q.numerator * s // q.denominator), 1 << bits)


def _sqrt_upper(q: Fraction, bits: int = 64) -> Fraction:
    if q <= 0:
        return Fraction(0)
    s = 1 << (2 * bits)
    n = -((-q.numerator * s) // q.denominator)
    r = isqrt(n)
    if r * r < n:
        r += 1
    return Fraction(r, 1 << bits)


@lru_cache(maxsize=256)
def _singular_disks(op: DiffOperator):
    """(mid, radius) pairs of certified disks around the roots of lc(op)."""
    return tuple((d.mid, d.radius, d) for d, _ in singularities(op, 128))


def safe_radius(op: DiffOperator, beta) -> Fraction | None:
    """Certified lower bound on the distance from beta to every singularity (None: no singularities)."""
    beta = GQ(beta)
    best = None
    for mid, rad, _ in _singular_disks(op):
        d = _sqrt_lower((beta - mid).norm()) - rad
        d = max(d, Fraction(0))
        if best is None or d < best:
            best = d
    return best


def _check_regular(op: DiffOperator, zeta: GaussianRational, what: str):
    if op.lc()(zeta).is_zero():
        raise SingularPointError(f"{what} {zeta} is a singular point of the operator "
                                 f"(leading coefficient vanishes there)")
    for mid, rad, disk in _singular_disks(op):
        if (zeta - mid).norm() <= rad * rad:
            raise SingularPointError(f"{what} {zeta} lies in the singularity enclosure "
                                     f"{disk.to_str(20)}", disk)


# --- data types ---------------------------------------------------------------------

@dataclass(frozen=True)
class DFiniteInstance:
    """One solution of ``op`` given by f(base), f'(base), ..., f^(r-1)(base)."""

    op: DiffOperator
    base: GaussianRational
    ics: tuple

    def __post_init__(self):
        object.__setattr__(self, "base", GQ(self.base))
        object.__setattr__(self, "ics", tuple(
            v if isinstance(v, Enclosure) else GQ(v) for v in self.ics))
        if self.op.is_zero() or self.op.order < 1:
            raise ValueError("instance operator must have order >= 1")
        if self.op.lc()(self.base).is_zero():
            raise SingularPointError(f"base {self.base} is a singular point of the operator "
                                     f"(leading coefficient vanishes there)")
        if len(self.ics) != self.op.order:
            raise ValueError(f"need {self.op.order} initial values, got {len(self.ics)}")

    @property
    def order(self) -> int:
        return self.op.order

    def is_exact(self) -> bool:
        return all(isinstance(v, GaussianRational) for v in self.ics)


@dataclass(frozen=True)
class EvalPath:
    waypoints: tuple

    def __post_init__(self):
        object.__setattr__(self, "waypoints", tuple(GQ(w) for w in self.waypoints))
        if len(self.waypoints) < 1:
            raise ValueError("a path needs at least one waypoint")

    def __len__(self):
        return len(self.waypoints)

    def __iter__(self):
        return iter(self.waypoints)


@dataclass
class EvalResult:
    value: NumberValue
    diagnostics: dict = field(default_factory=dict)

    @property
    def rigor(self) -> str:
        return self.diagnostics.get("rigor", RIGOR_FLAG)


# --- local expansion -----------------------------------------------------------------

def _raw_recurrence(L: DiffOperator):
    """Index-shift form of L: ``{s: q_s}`` with sum_s q_s(m) a_{m+s} = 0 for every integer m."""
    x = Polynomial.x()
    terms = {}
    for b, p in enumerate(L.coeffs):
        rising = Polynomial([1])
        for t in range(1, b + 1):
            rising = rising * Polynomial([t, 1])
        for a, c in enumerate(p.coeffs):
            if c.is_zero():
                continue
            q = rising.taylor_shift(-a) * c
            terms[b - a] = terms.get(b - a, Polynomial()) + q
    del x
    return {s: q for s, q in terms.items() if not q.is_zero()}


class _CoefficientStream:
    """Exact Taylor coefficients at the origin of the solution with given derivatives there."""

    def __init__(self, L: DiffOperator, ics):
        self.terms = _raw_recurrence(L)
        self.smax = max(self.terms)
        if self.smax != L.order:
            raise SingularPointError("origin is not an ordinary point of the shifted operator")
        self.vals = [GQ(v) / factorial(k) for k, v in enumerate(ics)]

    def coeff(self, K: int) -> GaussianRational:
        while len(self.vals) <= K:
            self._advance()
        return self.vals[K]

    def _advance(self):
        K = len(self.vals)
        # relation at m = K - smax expresses a_K through lower indices
        m = K - self.smax
        acc = ZERO
        lead = None
        for s, q in self.terms.items():
            if s == self.smax:
                lead = q(m)
                continue
            idx = m + s
            if idx < 0:
                continue
            v = self.vals[idx]
            if v.is_zero():
                continue
            acc = acc + v * q(m)
        if lead is None or lead.is_zero():
            raise SingularPointError(f"recurrence leading coefficient vanishes at index {K}")
        self.vals.append(-acc / lead)


class _SolutionStream:
    """Coefficients as exact part plus enclosure-weighted fundamental columns.

    Every column is computed exactly, so rounding never passes through the
    recurrence (ball recurrences suffer from the wrapping effect once the
    recurrence has several comparable characteristic roots).
    """

    def __init__(self, L: DiffOperator, ics, prec: int):
        self.prec = prec
        exact_ics = [v if isinstance(v, GaussianRational) else ZERO for v in ics]
        self.base = _CoefficientStream(L, exact_ics)
        self.terms = self.base.terms
        self.columns = []
        for j, v in enumerate(ics):
            if isinstance(v, Enclosure):
                delta = [ZERO] * len(ics)
                delta[j] = GQ(1)
                self.columns.append((v, _CoefficientStream(L, delta)))

    def is_zero(self, n: int) -> bool:
        return self.base.coeff(n).is_zero() and all(col.coeff(n).is_zero() for _, col in self.columns)

    def exact(self, n: int) -> GaussianRational:
        return self.base.coeff(n)

    def coeff(self, n: int) -> Enclosure:
        acc = Enclosure.exact(self.base.coeff(n), self.prec)
        for v, col in self.columns:
            c = col.coeff(n)
            if not c.is_zero():
                acc = acc + v * Enclosure.exact(c, self.prec)
        return acc


def local_taylor(inst: DFiniteInstance, prec: int | None = None):
    """Stream of Taylor coefficients of the instance's solution at its base point.

    Exact (Gaussian rationals) when the ics are exact and ``prec`` is None;
    otherwise enclosures at ``prec`` bits.
    """
    L = shift_point(inst.op, inst.base)
    if prec is None and not inst.is_exact():
        prec = max(v.prec for v in inst.ics if isinstance(v, Enclosure))
    if prec is None:
        stream = _CoefficientStream(L, inst.ics)
    else:
        stream = _SolutionStream(L, inst.ics, prec)
    k = 0
    while True:
        yield stream.coeff(k)
        k += 1


def _digits_to_bits(digits: int) -> int:
    return int(math.ceil(digits * 3.3219280948873626)) + 16


def _taylor_sum(inst: DFiniteInstance, delta: GaussianRational, kmax: int, bits: int,
                budget: int = MAX_TERMS, kmin: int = 0):
    """Enclosures of f^(k)(base + delta) for kmin <= k <= kmax, plus diagnostics."""
    L = shift_point(inst.op, inst.base)
    stream = _SolutionStream(L, inst.ics, bits)
    dball = Enclosure.exact(delta, bits)
    ks = range(kmin, kmax + 1)
    sums = {k: Enclosure.zero(bits) for k in ks}
    powers = [Enclosure.exact(1, bits)]
    history = []  # (n, log2 magnitude) of nonzero aggregate terms
    eps_log2 = -bits
    zero_run = 0
    R = max(stream.terms) - min(stream.terms)
    n = 0
    ratio = None
    tail = None
    while True:
        if n >= budget:
            raise BudgetError(f"no convergence of the local Taylor series within {budget} terms")
        if stream.is_zero(n):
            zero_run += 1
            c = None
        else:
            zero_run = 0
            c = stream.coeff(n)
        mag = -math.inf
        if n >= kmin:
            while len(powers) <= n - kmin:
                powers.append(powers[-1] * dball)
            for k in ks:
                if n < k or c is None:
                    continue
                t = c * powers[n - k] * comb(n, k)
                sums[k] = sums[k] + t
                mag = max(mag, t.log2_upper())
        if mag > -math.inf:
            history.append((n, mag))
        n += 1
        if n > kmax and zero_run >= R and R > 0 and n > len(inst.ics):
            tail = 0.0
            ratio = 0.0
            break
        if len(history) > TAIL_WINDOW and n > kmax + 1:
            recent = history[-(TAIL_WINDOW + 1):]
            ratios = []
            for (n1, m1), (n2, m2) in zip(recent, recent[1:]):
                ratios.append((m2 - m1) / (n2 - n1))
            worst = max(ratios)
            if worst <= math.log2(TAIL_RATIO):
                rho = 2.0 ** worst
                tail_log2 = recent[-1][1] + math.log2(TAIL_INFLATION * rho / (1 - rho))
                scale = max(0.0, max(s.log2_upper() for s in sums.values()))
                if tail_log2 <= eps_log2 + scale:
                    ratio = rho
                    tail = tail_log2
                    break
    out = {}
    for k in ks:
        s = sums[k]
        if tail is not None and tail != 0.0:
            s = s.add_error(_pow2_fraction(tail))
        out[k] = s * factorial(k)
    diag = {"terms": n, "ratio": ratio, "tail_log2": tail}
    return out, diag


def _pow2_fraction(log2v: float) -> Fraction:
    e = math.ceil(log2v) + 1
    return Fraction(2) ** e


def _check_step(op, a: GaussianRational, b: GaussianRational, safety=SAFETY):
    r = safe_radius(op, a)
    if r is None:
        return
    lim = safety * r
    if (b - a).norm() > lim * lim:
        raise PathError(f"step {a} -> {b} exceeds {safety} of the certified singularity "
                        f"distance {float(r):.6g} at {a}",
                        blocking=[d for _, _, d in _singular_disks(op)])


def evaluate_local(inst: DFiniteInstance, zeta, prec: int = 30, k: int = 0) -> EvalResult:
    """Sum the Taylor series at zeta inside the safe disk around the base point."""
    zeta = GQ(zeta)
    delta = zeta - inst.base
    if delta.is_zero():
        return _at_base(inst, k)
    _check_regular(inst.op, zeta, "point")
    try:
        _check_step(inst.op, inst.base, zeta)
    except PathError as exc:
        raise PathError(f"{zeta} is outside the safe disk around {inst.base}; "
                        f"use analytic continuation", exc.blocking) from None
    bits = _digits_to_bits(prec)
    vals, diag = _taylor_sum(inst, delta, k, bits, kmin=k)
    diag.update(rigor=RIGOR_FLAG, path=[inst.base, zeta])
    return EvalResult(vals[k], diag)


def _at_base(inst: DFiniteInstance, k: int) -> EvalResult:
    if k < inst.order:
        v = inst.ics[k]
    else:
        stream = local_taylor(inst)
        for _ in range(k):
            next(stream)
        v = next(stream) * factorial(k)
    return EvalResult(v, {"terms": 0, "rigor": RIGOR_FLAG, "path": [inst.base]})


def continue_to(inst: DFiniteInstance, beta, prec: int = 30, *, budget: int = MAX_TERMS,
                _bits: int | None = None, _diag: list | None = None) -> DFiniteInstance:
    """Transport the derivative vector from the base point to beta (one safe step)."""
    beta = GQ(beta)
    delta = beta - inst.base
    if delta.is_zero():
        return inst
    _check_regular(inst.op, beta, "point")
    _check_step(inst.op, inst.base, beta)
    bits = _bits or _digits_to_bits(prec)
    vals, diag = _taylor_sum(inst, delta, inst.order - 1, bits, budget)
    if _diag is not None:
        diag.update(start=inst.base, end=beta)
        _diag.append(diag)
    return DFiniteInstance(inst.op, beta, tuple(vals[k] for k in range(inst.order)))


# --- paths ------------------------------------------------------------------------

def _round_point(x: GaussianRational, den: int = 1024) -> GaussianRational:
    return GQ(x.re.limit_denominator(den), x.im.limit_denominator(den))


def _segment_blockers(disks, a, b, margin):
    ab = b - a
    L2 = ab.norm()
    out = []
    for mid, rad, disk in disks:
        am = mid - a
        t = (am * ab.conj()).re / L2
        if not (0 < t < 1):
            continue
        foot = a + ab * t
        dist = _sqrt_lower((mid - foot).norm()) - rad
        near_end = min(_sqrt_lower(am.norm()), _sqrt_lower((mid - b).norm())) - rad
        if dist < margin and near_end > margin:
            out.append((t, mid, rad, disk))
    out.sort(key=lambda x: x[0])
    return out


def _normal(ab: GaussianRational, L: Fraction, hint):
    """Unit-ish normal to ab; side picked by hint ('upper'/'lower') or to the left of travel."""
    n = ab * GQ(0, 1) / L  # left normal
    if hint in ("upper", "lower"):
        up = n.im > 0 or (n.im == 0 and n.re > 0)
        if (hint == "upper") != up:
            n = -n
    return n


def _plan(disks, a, b, hint, depth, blocked_log):
    if a == b:
        return [a]
    L = _sqrt_upper((b - a).norm())
    margin = L / 8
    blockers = _segment_blockers(disks, a, b, margin)
    if not blockers:
        return [a, b]
    if depth > 6:
        blocked_log.extend(x[3] for x in blockers)
        raise PathError("no path found: singularities block every detour",
                        blocking=[x[3] for x in blockers])
    t, mid, rad, disk = blockers[0]
    foot = a + (b - a) * t
    n = _normal(b - a, L, hint)
    h = max(L / 2, 2 * (rad + margin))
    for attempt in range(4):
        d = _round_point(foot + n * h)
        r = min((_sqrt_lower((d - m).norm()) - rr for m, rr, _ in disks), default=None)
        if r is not None and r > margin / 2:
            left = _plan(disks, a, d, hint, depth + 1, blocked_log)
            right = _plan(disks, d, b, hint, depth + 1, blocked_log)
            return left[:-1] + right
        h *= 2
    raise PathError("no path found around the singularity enclosure " + disk.to_str(15),
                    blocking=[disk])


def _subdivide(op, a, b, safety, max_steps):
    disks = _singular_disks(op)
    if not disks:
        return [a, b]
    ab = b - a
    L = _sqrt_upper(ab.norm())
    pts = [a]
    t = Fraction(0)
    while t < 1:
        p = a + ab * t
        r = safe_radius(op, p)
        if r is None or r <= 0:
            raise PathError(f"path point {p} touches a singularity enclosure",
                            blocking=[d for _, _, d in disks])
        dt = safety * r / L
        if t + dt >= 1:
            t = Fraction(1)
        else:
            k = max(0, math.ceil(-math.log2(dt))) + 4
            step = Fraction(math.floor(dt * 2 ** k), 2 ** k)
            if step <= 0:
                raise PathError("path step underflow near a singularity",
                                blocking=[d for _, _, d in disks])
            t = t + step
        pts.append(a + ab * t if t < 1 else b)
        if len(pts) > max_steps:
            raise PathError(f"more than {max_steps} steps needed", blocking=[d for _, _, d in disks])
    return pts


def auto_path(op: DiffOperator, start, end, prec: int = 30, hint: str | None = None,
              safety: Fraction = SAFETY, corners=None, max_steps: int = 5000) -> EvalPath:
    """Deterministic path of ordinary Gaussian-rational points obeying the step invariant.

    Straight legs are subdivided so each step is at most ``safety`` times the
    certified singularity distance; legs passing within an eighth of their
    length of a singularity get a perpendicular detour on the ``hint`` side
    ('upper' or 'lower' half-plane; default: left of the direction of travel).
    ``corners`` replaces detour planning with a fixed list of intermediate points.
    """
    start, end = GQ(start), GQ(end)
    _check_regular(op, start, "path start")
    _check_regular(op, end, "path end")
    disks = _singular_disks(op)
    if corners is not None:
        plan = [start] + [GQ(c) for c in corners] + [end]
    else:
        plan = _plan(disks, start, end, hint, 0, [])
    pts = [start]
    for a, b in zip(plan, plan[1:]):
        _check_regular(op, b, "waypoint")
        pts.extend(_subdivide(op, a, b, safety, max_steps)[1:])
    return EvalPath(tuple(pts))


def _validate_path(op, path: EvalPath, start, end, safety=SAFETY):
    wps = path.waypoints
    if wps[0] != start or wps[-1] != end:
        raise PathError(f"path must run from {start} to {end}")
    for w in wps:
        _check_regular(op, w, "waypoint")
    for a, b in zip(wps, wps[1:]):
        _check_step(op, a, b, safety)


def evaluate(inst: DFiniteInstance, zeta, k: int = 0, prec: int = 30,
             path: EvalPath | None = None, hint: str | None = None, budget: int = MAX_TERMS) -> EvalResult:
    """Enclosure of f^(k)(zeta), continuing along ``path`` (or an automatic one).

    ``budget`` caps the number of Taylor terms of each segment.
    """
    zeta = GQ(zeta)
    _check_regular(inst.op, zeta, "evaluation point")
    if zeta == inst.base and path is None:
        return _at_base(inst, k)
    if path is None:
        path = auto_path(inst.op, inst.base, zeta, prec, hint=hint)
    else:
        _validate_path(inst.op, path, inst.base, zeta)
    wps = path.waypoints
    steps = len(wps) - 1
    bits = _digits_to_bits(prec) + 4 * steps + 8
    segs = []
    cur = inst
    for w in wps[1:-1]:
        cur = continue_to(cur, w, budget=budget, _bits=bits, _diag=segs)
    if len(wps) >= 2:
        delta = zeta - cur.base
        if delta.is_zero():
            res = _at_base(cur, k)
            value = res.value
        else:
            vals, diag = _taylor_sum(cur, delta, k, bits, budget, kmin=k)
            diag.update(start=cur.base, end=zeta)
            segs.append(diag)
            value = vals[k]
    else:
        value = _at_base(cur, k).value
    diagnostics = {
        "rigor": RIGOR_FLAG,
        "path": list(wps),
        "segments": segs,
        "terms": sum(s["terms"] for s in segs),
        "working_bits": bits,
    }
    return EvalResult(value, diagnostics)
