"""Small random operators, sequences and algebraic functions for the closure checks."""

import random
from fractions import Fraction

from dfinum.algebraic import BivariatePolynomial
from dfinum.gaussian import GQ
from dfinum.ore import DiffOperator, ShiftOperator
from dfinum.poly import Polynomial


def small(rng: random.Random, lo=-3, hi=3, complex_prob=0.0):
    re = rng.randint(lo, hi)
    im = rng.randint(lo, hi) if rng.random() < complex_prob else 0
    return GQ(re, im)


def nonzero(rng, lo=-3, hi=3, complex_prob=0.0):
    while True:
        x = small(rng, lo, hi, complex_prob)
        if not x.is_zero():
            return x


def poly(rng, deg, complex_prob=0.0):
    return Polynomial([small(rng, complex_prob=complex_prob) for _ in range(deg + 1)])


def diffop(rng, max_order=2, deg=1, complex_prob=0.0):
    """Random operator with lc(0) != 0, so 0 is an ordinary point."""
    r = rng.randint(1, max_order)
    coeffs = [poly(rng, deg, complex_prob) for _ in range(r)]
    lead = poly(rng, deg, complex_prob)
    lead = Polynomial([nonzero(rng)] + list(lead.coeffs[1:]))
    return DiffOperator(coeffs + [lead])


def ics(rng, r):
    return [small(rng) for _ in range(r)]


def shiftop(rng, max_order=2, deg=1, complex_prob=0.0):
    """Random recurrence whose leading coefficient never vanishes at n >= 0."""
    r = rng.randint(1, max_order)
    coeffs = [poly(rng, deg, complex_prob) for _ in range(r)]
    k = rng.randint(1, 3)
    lead = Polynomial([k, 1]) * nonzero(rng) if rng.random() < 0.7 else Polynomial([nonzero(rng)])
    return ShiftOperator(coeffs + [lead])


def algebraic(rng, max_deg=2):
    """(P, y0) with P(0, y0) = 0 and dP/dy(0, y0) != 0."""
    while True:
        d = rng.randint(2, max_deg)
        y0 = small(rng, -2, 2)
        rows = [poly(rng, 1) for _ in range(d + 1)]
        if rows[-1].is_zero():
            continue
        at0 = [r(GQ(0)) for r in rows]
        c0 = sum((at0[j] * y0 ** j for j in range(1, d + 1)), GQ(0))
        rows[0] = rows[0] - Polynomial([c0 + at0[0]])
        dy = sum((at0[j] * j * y0 ** (j - 1) for j in range(1, d + 1)), GQ(0))
        if dy.is_zero() or all(r.degree < 1 for r in rows):
            continue
        return BivariatePolynomial(rows), y0


def inner_function(rng):
    """(P, series of g) with g(0) = 0: a quadratic polynomial or sqrt(1 + c z) - 1."""
    from oracles import binomial_series
    if rng.random() < 0.5:
        a, b = nonzero(rng), small(rng)
        P = BivariatePolynomial([Polynomial([0, -a, -b]), Polynomial([1])])
        return P, lambda N: ([GQ(0), a, b] + [GQ(0)] * N)[:N]
    c = rng.choice([Fraction(1), Fraction(2), Fraction(-1), Fraction(1, 2), Fraction(3)])
    # (y + 1)^2 - (1 + c z)
    P = BivariatePolynomial([Polynomial([0, -c]), Polynomial([2]), Polynomial([1])])

    def series(N):
        s = binomial_series(Fraction(1, 2), c, N)
        return [s[0] - 1] + s[1:]
    return P, series
