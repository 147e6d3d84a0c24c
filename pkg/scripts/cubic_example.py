"""Algebraic sequence converging to the root near 4 of y^3 - 5y^2 + 3y + 2.

Prints the first exact terms, the distance of each to the root, the limit
enclosure and the certified root disks of the cubic.
"""

import argparse
from fractions import Fraction

import mpmath

from dfinum.limits import root_limit, root_sequence
from dfinum.poly import Polynomial
from dfinum.roots import complex_roots

CUBIC = Polynomial([2, 3, -5, 1])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eta", default="4")
    ap.add_argument("--terms", type=int, default=8)
    ap.add_argument("--digits", type=int, default=20)
    args = ap.parse_args()
    eta = Fraction(args.eta)

    seq = root_sequence(CUBIC, eta)
    _, res, match = root_limit(CUBIC, eta, tol=Fraction(1, 10 ** args.digits))
    with mpmath.workdps(args.digits + 10):
        root = mpmath.mpf(res.value.mid.re.numerator) / res.value.mid.re.denominator
        for n, a in enumerate(seq.terms(args.terms)):
            x = a.re
            dist = abs(mpmath.mpf(x.numerator) / x.denominator - root)
            print(f"a_{n} = {x}  |a_n - root| = {mpmath.nstr(dist, 3)}")
    print(f"limit = {res.value.to_str(args.digits)}  ({res.regime}, {res.terms} terms)")
    print(f"matched root disk = {match.disk.to_str(args.digits)}")
    for disk, mult in complex_roots(CUBIC):
        print(f"root disk: {disk.to_str(args.digits)}  multiplicity {mult}")


if __name__ == "__main__":
    main()
