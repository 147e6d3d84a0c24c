from fractions import Fraction
from math import factorial

import mpmath
import oracles
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dfinum import ore
from dfinum.gaussian import GQ, I
from dfinum.ore import (AlgebraMismatchError, DiffOperator, LeadingCoefficientZeroError, SequenceWindow,
                        ShiftOperator)
from dfinum.poly import Polynomial
from dfinum.textio import parse_operator

ints = st.integers(-3, 3)
gq = st.builds(GQ, ints, ints)
poly3 = st.lists(gq, max_size=4).map(Polynomial)


def nonzero_op(cls):
    return st.lists(poly3, min_size=1, max_size=4).map(lambda cs: cls(cs)).filter(lambda L: not L.is_zero())


def small_op(cls):
    polys = st.lists(gq, max_size=3).map(Polynomial)
    return st.lists(polys, min_size=2, max_size=3).map(lambda cs: cls(cs)).filter(lambda L: L.order >= 1)


def P(text):
    return parse_operator(text)


def zero(xs):
    return all(x.is_zero() for x in xs)


def seq(values):
    return [GQ(v) for v in values]


# --- multiplication --------------------------------------------------------------

def test_commutation_rules():
    z = DiffOperator([Polynomial([0, 1])])
    D = DiffOperator.gen_op()
    assert D * z == P("diff z: [1; z]")
    n = ShiftOperator([Polynomial([0, 1])])
    S = ShiftOperator.gen_op()
    assert S * n == P("shift n: [0; n+1]")
    assert (D - 1) * (D + 1) == P("diff z: [-1; 0; 1]")


@given(nonzero_op(DiffOperator), nonzero_op(DiffOperator), nonzero_op(DiffOperator))
def test_associativity_diff(A, B, C):
    assert (A * B) * C == A * (B * C)


@given(nonzero_op(ShiftOperator), nonzero_op(ShiftOperator), nonzero_op(ShiftOperator))
def test_associativity_shift(A, B, C):
    assert (A * B) * C == A * (B * C)


def test_mixed_algebras_rejected():
    with pytest.raises(AlgebraMismatchError):
        P("diff z: [1; 1]") * P("shift n: [1; 1]")
    with pytest.raises(AlgebraMismatchError):
        ore.lclm(P("diff z: [1; 1]"), P("shift n: [1; 1]"))


# --- lclm and the sum closure ------------------------------------------------------

def test_lclm_examples():
    assert ore.lclm(P("diff z: [0; 1]"), P("diff z: [-1; 1]")) == P("diff z: [0; -1; 1]")
    assert ore.lclm(P("diff z: [-1; 1]"), P("diff z: [-1; 1]")) == P("diff z: [-1; 1]")
    assert ore.annihilator_sum(P("diff z: [-1; 1]"), P("diff z: [1; 1]")) == P("diff z: [-1; 0; 1]")
    L = ore.lclm(P("shift n: [-1; n+1]"), P("shift n: [-1; 1]"))
    inv_fact = [GQ(Fraction(1, factorial(k))) for k in range(80)]
    assert zero(oracles.apply_shiftop(L, inv_fact))
    assert zero(oracles.apply_shiftop(L, seq([1] * 80)))


@given(small_op(DiffOperator), small_op(DiffOperator))
def test_lclm_is_left_multiple(A, B):
    L = ore.lclm(A, B)
    for X in (A, B):
        _, rem = ore.right_divrem(L, X)
        assert rem == []
    assert L.order <= A.order + B.order


def test_sum_of_sequences():
    L = ore.annihilator_sum(P("shift n: [-1; n+1]"), P("shift n: [-2; 1]"))
    s = [GQ(Fraction(1, factorial(k)) + 2 ** k) for k in range(60)]
    assert zero(oracles.apply_shiftop(L, s))
    A = P("shift n: [n^2+1; 2*n+3]")
    assert ore.annihilator_sum(A, A) == A.normalized()


# --- conjugation and realification --------------------------------------------------

def test_conjugation():
    assert ore.conjugate_op(P("diff z: [-i; 1]")) == P("diff z: [i; 1]")
    R = P("diff z: [z; 1+z^2]")
    assert ore.conjugate_op(R) == R
    L = P("shift n: [-n; i*n+1]")
    a = oracles.unroll_direct(L, [GQ(2, 1)], 30)
    assert zero(oracles.apply_shiftop(ore.conjugate_op(L), [x.conj() for x in a]))


@given(nonzero_op(ShiftOperator))
def test_conjugation_involution(L):
    assert ore.conjugate_op(ore.conjugate_op(L)) == L


def test_realify():
    L = ore.realify(P("diff z: [-i; 1]"))
    assert L == P("diff z: [1; 0; 1]")
    assert all(_ == [] for _ in (ore.right_divrem(L, P("diff z: [-i; 1]"))[1],
                                 ore.right_divrem(L, P("diff z: [i; 1]"))[1]))
    R = P("diff z: [z; 1+z^2]")
    assert ore.realify(R).order == R.order
    Ls = ore.realify(P("shift n: [-i; 1]"))
    assert Ls.is_real()
    assert zero(oracles.apply_shiftop(Ls, [I ** k for k in range(40)]))
    assert zero(oracles.apply_shiftop(Ls, [(-I) ** k for k in range(40)]))


@given(small_op(DiffOperator))
def test_realify_is_real(L):
    out = ore.realify(L)
    assert all(c.im == 0 for p in out.coeffs for c in p.coeffs)


# --- products ------------------------------------------------------------------

def test_product_examples():
    L = ore.annihilator_product(P("shift n: [-1; 1]"), P("shift n: [-2; 1]"))
    assert L.order == 1 and zero(oracles.apply_shiftop(L, [GQ(2 ** k) for k in range(30)]))
    sq = ore.annihilator_product(P("diff z: [-1; 1]"), P("diff z: [-1; 1]"))
    assert sq == P("diff z: [-2; 1]")
    e2 = [GQ(Fraction(2 ** k, factorial(k))) for k in range(60)]
    assert zero(oracles.apply_diffop(sq, e2))
    one = ore.annihilator_product(P("diff z: [-1; 1]"), P("diff z: [1; 1]"))
    assert zero(oracles.apply_diffop(one, [GQ(1)] + [GQ(0)] * 40))


# --- operator / recurrence conversion -------------------------------------------------

def test_diffop_to_rec_exponential():
    assert ore.diffop_to_rec(P("diff z: [-1; 1]")) == P("shift n: [-1; n+1]")


def test_diffop_to_rec_irrational_power():
    # (1+z)^sqrt(2): binomial coefficients computed in high precision
    L = P("diff z: [-2; z+1; z^2+2*z+1]")
    R = ore.diffop_to_rec(L)
    with mpmath.workdps(80):
        s = mpmath.sqrt(2)
        f = [mpmath.binomial(s, k) for k in range(50)]
        cols = oracles.coeff_lists(R)
        for n in range(50 - R.order):
            acc = sum(complex(oracles.peval(c, GQ(n))).real * f[n + j] for j, c in enumerate(cols))
            assert abs(acc) < mpmath.mpf(10) ** -60


def test_diffop_to_rec_bessel():
    R = ore.diffop_to_rec(P("diff z: [z^2-1; z; z^2]"))
    # J_1 coefficients: (-1)^m / (m! (m+1)! 2^(2m+1)) at z^(2m+1)
    f = [GQ(0)] * 30
    for m in range(15):
        f[2 * m + 1] = GQ(Fraction((-1) ** m, factorial(m) * factorial(m + 1) * 2 ** (2 * m + 1)))
    assert zero(oracles.apply_shiftop(R, f))


def test_rec_to_diffop_examples():
    for rec, values in (("shift n: [-1; 1]", [1] * 60),
                        ("shift n: [-1; n+1]", [Fraction(1, factorial(k)) for k in range(60)]),
                        ("shift n: [-n^4; n*(n+1)^3]", [0] + [Fraction(1, k ** 3) for k in range(1, 80)])):
        M, bound = ore.rec_to_diffop(P(rec))
        residual = oracles.apply_diffop(M, seq(values))
        assert zero(residual[bound + 1:])
        H = ore.homogenize(M, bound)
        assert zero(oracles.apply_diffop(H, seq(values)))
    M, _ = ore.rec_to_diffop(P("shift n: [-1; n+1]"))
    assert ore.right_divrem(M, P("diff z: [-1; 1]"))[1] == []


def test_homogenize():
    assert ore.homogenize(P("diff z: [0; 1]"), 0) == P("diff z: [0; 0; 1]")
    # (z D - 1)(z^2 + 5 z) = z^2
    M = P("diff z: [-1; z]")
    f = seq([0, 5, 1] + [0] * 10)
    assert oracles.apply_diffop(M, f)[:3] == seq([0, 0, 1])
    assert zero(oracles.apply_diffop(ore.homogenize(M, 2), f))


# --- partial sums and twists ------------------------------------------------------

def test_partial_sums():
    L = ore.partial_sum_annihilator(P("shift n: [-2; 1]"))
    assert zero(oracles.apply_shiftop(L, [GQ(2 ** (k + 1) - 1) for k in range(40)]))
    L = ore.partial_sum_annihilator(P("shift n: [-1; 1]"))
    assert zero(oracles.apply_shiftop(L, [GQ(5 * (k + 1)) for k in range(40)]))
    L = ore.partial_sum_annihilator(P("shift n: [-n^4; n*(n+1)^3]"))
    s, acc = [], Fraction(0)
    for k in range(60):
        acc += Fraction(1, k ** 3) if k else 0
        s.append(GQ(acc))
    assert zero(oracles.apply_shiftop(L, s))


def test_twist():
    assert ore.geometric_twist(P("shift n: [-1; 1]"), Fraction(1, 2)) == P("shift n: [-1; 2]")
    L = ore.geometric_twist(P("shift n: [-1; n+1]"), 3)
    assert L == P("shift n: [-3; n+1]")
    assert zero(oracles.apply_shiftop(L, [GQ(Fraction(3 ** k, factorial(k))) for k in range(40)]))
    A = P("shift n: [n^2-1; 3*n+1; 2]")
    zeta = GQ(Fraction(2, 3), 1)
    assert ore.geometric_twist(ore.geometric_twist(A, zeta), 1 / zeta) == A.normalized()
    with pytest.raises(ValueError):
        ore.geometric_twist(A, 0)


# --- singularities and base shifts ---------------------------------------------------

def test_singularities():
    hyp = P("diff z: [2; 22*z-1; 12*z^2-3]")
    sing = ore.singularities(hyp)
    assert len(sing) == 2
    assert any(d.contains(GQ(Fraction(1, 2))) for d, _ in sing)
    assert any(d.contains(GQ(Fraction(-1, 2))) for d, _ in sing)
    (d, m), = ore.singularities(P("diff z: [z^2-1; z; z^2]"))
    assert m == 2 and d.contains(0)
    assert ore.singularities(P("diff z: [-1; 1]")) == []
    shifted = ore.singularities(ore.shift_point(hyp, Fraction(1, 4)))
    assert sorted(float(d.mid.re) for d, _ in shifted) == [-0.75, 0.25]


def test_shift_point():
    assert ore.shift_point(P("diff z: [-z; 1]"), 1) == P("diff z: [-z-1; 1]")
    L = P("diff z: [z; 1+z^2]")
    assert ore.shift_point(L, 0) == L


# --- unrolling ---------------------------------------------------------------------

def test_unroll():
    w = ore.unroll(P("shift n: [-1; n+1]"), SequenceWindow(0, (1,)), 6)
    assert list(w.values) == seq([1, 1, Fraction(1, 2), Fraction(1, 6), Fraction(1, 24), Fraction(1, 120)])
    with pytest.raises(LeadingCoefficientZeroError) as exc:
        ore.unroll(P("shift n: [1; n-3]"), SequenceWindow(0, (1,)), 10)
    assert exc.value.n == 3
    short = ore.unroll(P("shift n: [-1; 1]"), SequenceWindow(0, (1,)), 100, budget=5)
    assert len(short) == 6


@given(st.lists(gq, min_size=2, max_size=2), st.lists(gq, min_size=1, max_size=2))
def test_unroll_matches_direct(init, extra):
    L = ShiftOperator([Polynomial(extra), Polynomial([1, 2]), Polynomial([3, 1])])
    w = ore.unroll(L, SequenceWindow(0, tuple(init)), 25)
    assert list(w.values) == oracles.unroll_direct(L, init, 25)


def test_unroll_with_enclosures():
    from dfinum.enclosure import Enclosure
    start = Enclosure.from_fraction_parts(Fraction(1), rad=Fraction(1, 10 ** 20))
    w = ore.unroll(P("shift n: [-1; n+1]"), SequenceWindow(0, (start,)), 20)
    assert w.values[19].contains(GQ(Fraction(1, factorial(19))))
