"""Command line interface: ``dfinum eval|rootseq|closure|limit|singularities|gallery``.

Reports are ``key = value`` lines in a fixed order. Exit codes:

    0  success
    2  parse error, algebra mismatch, unknown name or invalid input
    3  singular point
    4  no admissible path / path violates the step invariant
    5  budget exhausted (no convergence of a series or sequence)
    6  root sequence diverged or its limit is ambiguous
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import ore
from .algebraic import CriticalRootError, alg_to_diffop, compose_dfinite_algebraic
from .enclosure import format_decimal
from .evaluator import (BudgetError, DFiniteInstance, PathError, SingularPointError, auto_path,
                        evaluate)
from .gaussian import GQ
from .limits import (ConvergentRecurrence, NoConvergenceError, RootIdentificationError,
                     limit_of_recurrence, root_limit, to_function_limit)
from .ore import AlgebraMismatchError, DiffOperator, SequenceWindow, ShiftOperator
from .roots import complex_roots
from .textio import (ParseError, format_number, parse_bivariate, parse_gaussian, parse_instance,
                     parse_number, parse_operator, parse_path, parse_polynomial)

EXIT_OK, EXIT_PARSE, EXIT_SINGULAR, EXIT_PATH, EXIT_BUDGET, EXIT_ROOT = 0, 2, 3, 4, 5, 6

GALLERY = ("e", "log2", "pi4", "zeta3", "epi", "sqrt2")
CLOSURES = ("add", "mul", "sum", "twist", "lclm", "realify", "ode2rec", "rec2ode", "compose", "alg2ode")

# upper half-plane corners for (1+z)^(-i) from 0 to -2, giving exp(pi)
EPI_CORNERS = ("-1+i",)

# a_(n+1)/a_n for a_n = 5/2 * (-1)^n / ((n+1)^3 binomial(2n+2, n+1))
ZETA3_TERMS = "shift n: [(n+1)^3; 2*(2*n+3)*(n+2)^2]"


_NEGATIVE = re.compile(r"^-[\d(i]")


class UsageError(ValueError):
    pass


@dataclass
class JobSpec:
    command: str
    args: list = field(default_factory=list)
    prec: int = 30
    budget: int | None = None
    path: str | None = None
    fmt: str = "decimal"

    def __post_init__(self):
        if self.prec < 1:
            raise UsageError("--prec must be at least 1")
        if self.fmt not in ("exact", "decimal", "both"):
            raise UsageError("--format must be exact, decimal or both")


def _text(arg: str) -> str:
    """Inline literal, or the contents of the file it names."""
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read().strip()
    return arg


def _value_lines(key: str, v, digits: int, fmt: str):
    out = []
    if fmt in ("decimal", "both"):
        out.append((key, format_decimal(v, digits)))
    if fmt in ("exact", "both"):
        exact_key = key if fmt == "exact" else key + "_exact"
        out.append((exact_key, format_number(v)))
    return out


def _points(ps):
    return "[" + ", ".join(str(p) for p in ps) + "]"


# --- commands ----------------------------------------------------------------

def cmd_eval(job: JobSpec, k: int = 0, hint: str | None = None):
    if len(job.args) != 2:
        raise UsageError("eval needs an instance and a point")
    inst = parse_instance(_text(job.args[0]))
    zeta = parse_gaussian(job.args[1])
    path = None
    if job.path:
        corners = parse_path(job.path)
        if corners and corners[0] == inst.base:
            corners = corners[1:]
        if corners and corners[-1] == zeta:
            corners = corners[:-1]
        path = auto_path(inst.op, inst.base, zeta, job.prec, corners=corners)
    extra = {} if job.budget is None else {"budget": job.budget}
    res = evaluate(inst, zeta, k=k, prec=job.prec, path=path, hint=hint, **extra)
    lines = [("command", "eval"), ("operator", inst.op.to_text()), ("base", str(inst.base)),
             ("point", str(zeta)), ("derivative", str(k))]
    lines += _value_lines("value", res.value, job.prec, job.fmt)
    d = res.diagnostics
    lines += [("path", _points(d["path"])), ("steps", str(len(d["path"]) - 1)),
              ("terms", str(d.get("terms", 0))), ("rigor", res.rigor)]
    return lines


def cmd_rootseq(job: JobSpec, show: int = 8, var: str = "y"):
    if len(job.args) != 2:
        raise UsageError("rootseq needs a polynomial and an approximation eta")
    p = parse_polynomial(_text(job.args[0]), var)
    eta = parse_gaussian(job.args[1])
    tol = Fraction(1, 10 ** job.prec)
    c, res, match = root_limit(p, eta, tol, job.budget or 1000)
    from .limits import build_lemma_polynomial
    lines = [("command", "rootseq"), ("polynomial", p.to_str(var)), ("eta", str(eta)),
             ("lemma_polynomial", build_lemma_polynomial(p, eta).to_text()),
             ("recurrence", c.op.to_text()),
             ("terms", ", ".join(str(t) for t in c.terms(show)))]
    lines += _value_lines("limit", res.value, job.prec, job.fmt)
    lines += [("regime", res.regime), ("iterations", str(res.terms)),
              ("root_disk", match.disk.to_str(job.prec + 5)),
              ("root_multiplicity", str(match.multiplicity)), ("rigor", res.rigor)]
    return lines


def _operand(text: str):
    text = _text(text)
    if text.lstrip().startswith("poly"):
        return parse_bivariate(text)
    return parse_operator(text)


def _need(ops, n, name):
    if len(ops) != n:
        raise UsageError(f"closure {name} takes {n} operand(s)")


def cmd_closure(job: JobSpec):
    if not job.args:
        raise UsageError(f"closure needs an operation: {', '.join(CLOSURES)}")
    name, rest = job.args[0], job.args[1:]
    if name not in CLOSURES:
        raise UsageError(f"unknown closure {name!r}; available: {', '.join(CLOSURES)}")
    lines = [("command", "closure"), ("operation", name)]
    if name == "twist":
        _need(rest, 2, name)
        A = _operand(rest[0])
        _expect(A, ShiftOperator, name)
        out = ore.geometric_twist(A, parse_gaussian(rest[1]))
    elif name in ("add", "lclm", "mul"):
        _need(rest, 2, name)
        A, B = _operand(rest[0]), _operand(rest[1])
        if not isinstance(A, ore.OreOperator) or not isinstance(B, ore.OreOperator):
            raise UsageError(f"{name} expects two operators")
        out = ore.annihilator_product(A, B) if name == "mul" else ore.lclm(A, B)
    elif name == "compose":
        _need(rest, 2, name)
        L, P = _operand(rest[0]), _operand(rest[1])
        _expect(L, DiffOperator, name)
        if isinstance(P, ore.OreOperator):
            raise UsageError("compose expects a bivariate polynomial as second operand")
        out = compose_dfinite_algebraic(L, P)
    elif name == "alg2ode":
        _need(rest, 1, name)
        P = _operand(rest[0])
        if isinstance(P, ore.OreOperator):
            raise UsageError("alg2ode expects a bivariate polynomial")
        out = alg_to_diffop(P)
    else:
        _need(rest, 1, name)
        A = _operand(rest[0])
        if name == "sum":
            _expect(A, ShiftOperator, name)
            out = ore.partial_sum_annihilator(A)
        elif name == "realify":
            if not isinstance(A, ore.OreOperator):
                raise UsageError("realify expects an operator")
            out = ore.realify(A)
        elif name == "ode2rec":
            _expect(A, DiffOperator, name)
            out = ore.diffop_to_rec(A)
        else:
            _expect(A, ShiftOperator, name)
            out, bound = ore.rec_to_diffop(A)
            lines.append(("operator", out.to_text()))
            lines.append(("residual_degree_bound", str(bound)))
            return lines
    lines.append(("operator", out.to_text()))
    return lines


def _expect(x, cls, name):
    if not isinstance(x, cls):
        kind = "shift" if cls is ShiftOperator else "diff"
        raise AlgebraMismatchError(f"{name} expects a {kind} operator")


def cmd_limit(job: JobSpec, offset: int = 0, function: bool = False):
    if len(job.args) != 2:
        raise UsageError("limit needs a recurrence and a comma separated list of initial terms")
    op = parse_operator(_text(job.args[0]))
    _expect(op, ShiftOperator, "limit")
    vals = [parse_number(s) for s in job.args[1].strip("[]").split(",") if s.strip()]
    c = ConvergentRecurrence(op, SequenceWindow(offset, tuple(vals)))
    res = limit_of_recurrence(c, Fraction(1, 10 ** job.prec), job.budget or 10_000)
    lines = [("command", "limit"), ("recurrence", op.to_text())]
    lines += _value_lines("value", res.value, job.prec, job.fmt)
    ratio = "n/a" if res.ratio is None else f"{res.ratio:.6g}"
    lines += [("regime", res.regime), ("ratio", ratio), ("terms", str(res.terms)),
              ("tolerance_met", "yes" if res.tol_met else "no"), ("rigor", res.rigor)]
    if function:
        G, note = to_function_limit(c)
        lines += [("function_operator", G.to_text()), ("note", note)]
    return lines


def cmd_singularities(job: JobSpec):
    if len(job.args) != 1:
        raise UsageError("singularities needs one differential operator")
    op = parse_operator(_text(job.args[0]))
    _expect(op, DiffOperator, "singularities")
    bits = max(64, int(job.prec * 3.33) + 16)
    disks = complex_roots(op.lc(), bits)
    lines = [("command", "singularities"), ("operator", op.to_text()), ("count", str(len(disks)))]
    for i, (d, m) in enumerate(disks):
        lines.append((f"singularity_{i}", f"{d.to_str(job.prec)} (multiplicity {m})"))
    return lines


def _gallery_value(name: str, job: JobSpec):
    digits = job.prec
    if name in ("e", "log2", "pi4", "epi"):
        if name == "e":
            inst, zeta, how = DFiniteInstance(parse_operator("diff z: [-1; 1]"), 0, [1]), GQ(1), \
                "exp(z): D - 1, ics [1], value at z = 1"
        elif name == "log2":
            inst, zeta, how = DFiniteInstance(parse_operator("diff z: [0; 1; 1+z]"), 0, [0, 1]), GQ(1), \
                "log(1+z): (1+z)D^2 + D, ics [0, 1], continued to z = 1"
        elif name == "pi4":
            inst, zeta, how = DFiniteInstance(parse_operator("diff z: [0; 2*z; 1+z^2]"), 0, [0, 1]), GQ(1), \
                "arctan(z): (1+z^2)D^2 + 2zD, ics [0, 1], continued to z = 1"
        else:
            inst, zeta = DFiniteInstance(parse_operator("diff z: [i; 1+z]"), 0, [1]), GQ(-2)
            how = "(1+z)^(-i): (1+z)D + i, ics [1], continued to z = -2 through -1+i"
        path = None
        if name == "epi":
            corners = [parse_gaussian(c) for c in EPI_CORNERS]
            path = auto_path(inst.op, inst.base, zeta, digits, corners=corners)
        res = evaluate(inst, zeta, prec=digits, path=path)
        return res.value, how, res.rigor
    if name == "zeta3":
        # zeta(3) = 5/2 * sum_{n>=1} (-1)^(n+1) / (n^3 binomial(2n, n)), terms shrink by about 1/4
        L = ore.partial_sum_annihilator(parse_operator(ZETA3_TERMS))
        c = ConvergentRecurrence(L, SequenceWindow(0, (GQ(Fraction(5, 4)), GQ(Fraction(115, 96)))))
        res = limit_of_recurrence(c, Fraction(1, 10 ** (digits + 1)), job.budget or 100_000)
        if not res.tol_met:
            raise BudgetError(f"zeta(3) to {digits} digits needs more than {res.terms} terms")
        return res.value, "partial sums of 5/2*(-1)^(n+1)/(n^3*binomial(2n,n)): " + L.to_text(), res.rigor
    if name == "sqrt2":
        _, res, _ = root_limit(parse_polynomial("y^2-2", "y"), Fraction(3, 2),
                               Fraction(1, 10 ** (digits + 1)), job.budget or 10_000)
        return res.value, "root sequence of y^2 - 2 from eta = 3/2", res.rigor
    raise UsageError(f"unknown gallery constant {name!r}; available: {', '.join(GALLERY)}")


def cmd_gallery(job: JobSpec):
    if len(job.args) != 1:
        raise UsageError(f"gallery needs a name: {', '.join(GALLERY)}")
    name = job.args[0]
    value, how, rigor = _gallery_value(name, job)
    lines = [("command", "gallery"), ("constant", name), ("pipeline", how), ("digits", str(job.prec))]
    lines += _value_lines("value", value, job.prec, job.fmt)
    lines.append(("rigor", rigor))
    return lines


# --- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dfinum", description="D-finite functions, sequences and numbers.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, default=30, help="precision in decimal digits")
    common.add_argument("--budget", type=int, default=None, help="maximum number of terms")
    common.add_argument("--format", dest="fmt", default="decimal", choices=("exact", "decimal", "both"))
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate an instance (or a derivative) at a point")
    p.add_argument("instance", help="instance literal or file")
    p.add_argument("point")
    p.add_argument("-k", "--derivative", type=int, default=0)
    p.add_argument("--path", default=None, help="intermediate corner points, ';' separated")
    p.add_argument("--hint", choices=("upper", "lower"), default=None)

    p = sub.add_parser("rootseq", parents=[common], help="algebraic sequence converging to a root of p")
    p.add_argument("polynomial")
    p.add_argument("eta")
    p.add_argument("--show", type=int, default=8, help="number of exact terms to print")
    p.add_argument("--var", default="y")

    p = sub.add_parser("closure", parents=[common], help="closure operations on operators")
    p.add_argument("operation", choices=CLOSURES)
    p.add_argument("operands", nargs="+")

    p = sub.add_parser("limit", parents=[common], help="limit of a P-recursive sequence")
    p.add_argument("recurrence")
    p.add_argument("initial", help="comma separated initial terms")
    p.add_argument("--offset", type=int, default=0)
    p.add_argument("--function", action="store_true", help="also print the annihilator of (1-z)*sum a_n z^n")

    p = sub.add_parser("singularities", parents=[common], help="certified roots of the leading coefficient")
    p.add_argument("operator")

    p = sub.add_parser("gallery", parents=[common], help="constants computed by fixed pipelines")
    p.add_argument("name")
    return ap


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    # a leading space keeps literals such as -3/2 or -1+i from looking like options
    argv = [" " + a if _NEGATIVE.match(a) else a for a in argv]
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        if ns.command == "closure":
            args = [ns.operation] + ns.operands
        elif ns.command == "eval":
            args = [ns.instance, ns.point]
        elif ns.command == "rootseq":
            args = [ns.polynomial, ns.eta]
        elif ns.command == "limit":
            args = [ns.recurrence, ns.initial]
        elif ns.command == "singularities":
            args = [ns.operator]
        else:
            args = [ns.name]
        job = JobSpec(ns.command, args, ns.prec, ns.budget, getattr(ns, "path", None), ns.fmt)
        if ns.command == "eval":
            lines = cmd_eval(job, ns.derivative, ns.hint)
        elif ns.command == "rootseq":
            lines = cmd_rootseq(job, ns.show, ns.var)
        elif ns.command == "closure":
            lines = cmd_closure(job)
        elif ns.command == "limit":
            lines = cmd_limit(job, ns.offset, ns.function)
        elif ns.command == "singularities":
            lines = cmd_singularities(job)
        else:
            lines = cmd_gallery(job)
    except SingularPointError as exc:
        return _fail(err, exc, EXIT_SINGULAR)
    except PathError as exc:
        return _fail(err, exc, EXIT_PATH)
    except RootIdentificationError as exc:
        return _fail(err, exc, EXIT_ROOT)
    except NoConvergenceError as exc:
        return _fail(err, exc, EXIT_ROOT if ns.command == "rootseq" else EXIT_BUDGET)
    except BudgetError as exc:
        return _fail(err, exc, EXIT_BUDGET)
    except (ParseError, AlgebraMismatchError, UsageError, CriticalRootError, ValueError,
            ArithmeticError) as exc:
        return _fail(err, exc, EXIT_PARSE)
    for key, value in lines:
        print(f"{key} = {value}", file=out)
    return EXIT_OK


def _fail(err, exc, code):
    print(f"error: {exc}", file=err)
    return code


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
