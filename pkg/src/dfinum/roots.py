"""Certified isolation of the complex roots of a polynomial over Q(i).

Approximations come from simultaneous iteration (mpmath's Durand-Kerner
``polyroots`` in a private context) on each squarefree factor; every
approximation is then certified with Smith's Gerschgorin-type inclusion:
the disks ``|z - z_k| <= m |W_k|`` built from the Weierstrass corrections
``W_k = q(z_k) / (lc(q) prod_{j != k} (z_k - z_j))`` contain all roots of
``q`` and each isolated disk contains exactly one.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath

from .enclosure import Enclosure, _mag_from_fraction
from .gaussian import GQ
from .poly import Polynomial, squarefree_factors

__all__ = ["complex_roots", "RootSeparationError"]


class RootSeparationError(ArithmeticError):
    """Root disks could not be separated at the allowed precision."""

    def __init__(self, message, separation=None):
        super().__init__(message)
        self.separation = separation


def _approx_roots(q: Polynomial, prec: int):
    ctx = mpmath.MPContext()
    ctx.prec = prec + 20
    coeffs = []
    for c in reversed(q.coeffs):
        a, b, d = c.parts
        coeffs.append(ctx.mpc(ctx.mpf(a) / d, ctx.mpf(b) / d))
    if q.degree == 1:
        return [-coeffs[1] / coeffs[0]]
    for steps in (100, 400, 2000):
        try:
            return list(ctx.polyroots(coeffs, maxsteps=steps, extraprec=prec + 20))
        except ctx.NoConvergence:
            continue
    return list(ctx.polyroots(coeffs, maxsteps=4000, extraprec=2 * prec, error=True)[0])


def _man_exp(x):
    sign, man, exp, _ = x._mpf_
    man = int(man)
    return (-man if sign else man), exp


def _to_ball(z, prec: int) -> Enclosure:
    """Exact dyadic point at (about) ``prec`` bits; approximations carry no radius."""
    ar, er = _man_exp(mpmath.mpmathify(z).real)
    ai, ei = _man_exp(mpmath.mpmathify(z).imag)
    if ar == 0:
        er = ei
    if ai == 0:
        ei = er
    e = min(er, ei)
    ball = Enclosure(ar << (er - e), ai << (ei - e), e, (0, 0), prec)._rounded()
    ball.rad = (0, 0)
    return ball


def _snap(ball: Enclosure, q: Polynomial):
    """Try to recognise a small-height exact Gaussian rational root."""
    mid = ball.mid
    cand = GQ(mid.re.limit_denominator(10 ** 6), mid.im.limit_denominator(10 ** 6))
    if q(cand).is_zero():
        return cand
    return None


def _isolate(q: Polynomial, prec: int):
    approx = [_to_ball(z, prec) for z in _approx_roots(q, prec)]
    exact = [_snap(z, q) for z in approx]
    n = q.degree
    lc = Enclosure.exact(q.lc(), prec)
    out = []
    for k, zk in enumerate(approx):
        if exact[k] is not None:
            out.append(Enclosure.exact(exact[k], prec))
            continue
        val = q(zk)
        den = lc
        for j, zj in enumerate(approx):
            if j != k:
                den = den * (zk - zj)
        dlow = den.abs_lower()
        if dlow == 0:
            return None
        w = val.abs_upper() / dlow
        rad = _mag_from_fraction(n * w)
        out.append(Enclosure(zk.a, zk.b, zk.e, rad, prec))
    return out


def _separation(disks):
    worst = None
    for i in range(len(disks)):
        for j in range(i + 1, len(disks)):
            gap = (disks[i].mid - disks[j].mid).norm()
            s = disks[i].radius + disks[j].radius
            margin = Fraction(gap) - s * s
            if worst is None or margin < worst:
                worst = margin
    return worst


def complex_roots(p: Polynomial, prec: int = 128, max_prec: int = 4096):
    """Disjoint certified disks around the distinct roots of ``p`` with multiplicities.

    ``prec`` is the working precision in bits; it is doubled up to
    ``max_prec`` until all disks are pairwise disjoint.
    """
    if p.is_zero():
        raise ValueError("complex_roots of the zero polynomial")
    if p.degree < 1:
        return []
    factors = squarefree_factors(p)
    work = prec
    while True:
        result = []
        ok = True
        for q, mult in factors:
            disks = _isolate(q, work)
            if disks is None:
                ok = False
                break
            result.extend((d, mult) for d in disks)
        if ok:
            sep = _separation([d for d, _ in result])
            if sep is None or sep > 0:
                return result
        if work >= max_prec:
            raise RootSeparationError(
                f"could not separate the roots of degree-{p.degree} polynomial at {work} bits",
                separation=sep if ok else None)
        work *= 2
