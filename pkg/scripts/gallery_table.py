"""Table of the gallery constants with timings and an mpmath cross-check."""

import argparse
import io
import time
from decimal import Decimal

import mpmath

from dfinum.cli import GALLERY, run

REFERENCE = {
    "e": lambda: mpmath.e, "log2": lambda: mpmath.log(2), "pi4": lambda: mpmath.pi / 4,
    "zeta3": lambda: mpmath.zeta(3), "epi": lambda: mpmath.exp(mpmath.pi), "sqrt2": lambda: mpmath.sqrt(2),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--prec", type=int, default=30)
    ap.add_argument("names", nargs="*", default=list(GALLERY))
    args = ap.parse_args()
    for name in args.names:
        out, err = io.StringIO(), io.StringIO()
        t0 = time.perf_counter()
        code = run(["gallery", name, "--prec", str(args.prec)], out, err)
        dt = time.perf_counter() - t0
        if code:
            print(f"{name:6} exit {code}: {err.getvalue().strip()}")
            continue
        fields = dict(line.split(" = ", 1) for line in out.getvalue().splitlines())
        text = fields["value"].split(" ")[0]
        with mpmath.workdps(args.prec + 10):
            diff = abs(mpmath.mpf(text) - REFERENCE[name]())
            rel = diff / abs(mpmath.mpf(text))
        print(f"{name:6} {text:>{args.prec + 4}}  {dt:7.2f}s  rel.err {mpmath.nstr(rel, 2)}"
              f"  digits {len(Decimal(text).as_tuple().digits)}")


if __name__ == "__main__":
    main()
