"""Text formats for numbers, polynomials, operators and instances.

Grammar summary::

    rational    a | a/b
    gaussian    rational | rational*i | i | rational+rational*i | ...
    polynomial  sums/products/powers of gaussians, the variable and (...)
    operator    diff z: [p0; p1; ...; pr]      shift n: [p0; ...; pr]
    bivariate   poly z,y: [[row y^0]; [row y^1]; ...]    (rows may also be comma separated)
    number      gaussian | ~mid±rad   (``+/-`` accepted for ``±``)
    instance    instance { op: <diff operator>; base: <gaussian>; ics: [<number>, ...] }
"""

from __future__ import annotations

import re
from fractions import Fraction

from .enclosure import Enclosure, format_radius
from .gaussian import GQ, I, GaussianRational, parse_gaussian
from .poly import Polynomial

__all__ = [
    "ParseError", "parse_polynomial", "format_polynomial", "parse_operator", "format_operator",
    "parse_bivariate", "format_bivariate", "parse_number", "format_number", "parse_instance",
    "format_instance", "parse_gaussian", "parse_path",
]


class ParseError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*)|(\S))")


def _tokenize(text: str):
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        num, name, sym = m.groups()
        if num is not None:
            out.append(("num", num))
        elif name is not None:
            out.append(("name", name))
        else:
            out.append(("sym", sym))
        pos = m.end()
    return out


class _PolyParser:
    """Recursive descent over + - * / ^ and parentheses in a single variable."""

    def __init__(self, text: str, var: str):
        self.toks = _tokenize(text)
        self.pos = 0
        self.var = var
        self.text = text

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.pos += 1
        return t

    def fail(self, msg):
        raise ParseError(f"{msg} in polynomial literal {self.text!r}")

    def parse(self) -> Polynomial:
        if not self.toks:
            self.fail("empty input")
        p = self.expr()
        if self.pos != len(self.toks):
            self.fail(f"unexpected {self.peek()[1]!r}")
        return p

    def expr(self):
        sign = 1
        kind, val = self.peek()
        if val in ("+", "-"):
            self.take()
            sign = -1 if val == "-" else 1
        acc = self.term().scale(sign)
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self):
        acc = self.power()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            f = self.power()
            if op == "*":
                acc = acc * f
            else:
                if f.degree != 0:
                    self.fail("division by a non-constant")
                acc = acc.scale(f.coeffs[0].inverse())
        return acc

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, val = self.take()
            if kind != "num" or not val.isdigit():
                self.fail("exponent must be a natural number")
            base = base ** int(val)
        return base

    def atom(self):
        kind, val = self.take()
        if kind == "num":
            if not re.fullmatch(r"\d+", val):
                self.fail(f"non-integer literal {val!r} (use a/b)")
            return Polynomial([int(val)])
        if kind == "name":
            if val == "i":
                return Polynomial([I])
            if val == self.var:
                return Polynomial.x()
            self.fail(f"unknown symbol {val!r}")
        if val == "(":
            p = self.expr()
            if self.take()[1] != ")":
                self.fail("missing ')'")
            return p
        if val == "-":
            return -self.power()
        self.fail(f"unexpected {val!r}")


def parse_polynomial(text: str, var: str = "z") -> Polynomial:
    return _PolyParser(text, var).parse()


def format_polynomial(p: Polynomial, var: str = "z") -> str:
    return p.to_str(var)


def _split_top(text: str, sep: str):
    depth, cur, out = 0, [], []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


_OP_HEAD = re.compile(r"^\s*(diff|shift)\s+([A-Za-z_]\w*)\s*:\s*\[(.*)\]\s*$", re.S)


def parse_operator(text: str):
    from .ore import DiffOperator, ShiftOperator
    m = _OP_HEAD.match(text)
    if not m:
        raise ParseError(f"bad operator literal {text!r}; expected 'diff z: [p0; ...]' "
                         f"or 'shift n: [p0; ...]'")
    kind, var, body = m.groups()
    parts = [s for s in _split_top(body, ";")]
    if len(parts) == 1 and "," in body:
        parts = _split_top(body, ",")
    coeffs = [parse_polynomial(s, var) for s in parts if s.strip()]
    cls = DiffOperator if kind == "diff" else ShiftOperator
    op = cls(coeffs, var)
    if op.is_zero():
        raise ParseError("the zero operator is not allowed")
    return op


def format_operator(op) -> str:
    body = "; ".join(p.to_str(op.var) for p in op.coeffs)
    return f"{op.kind} {op.var}: [{body}]"


_BIV_HEAD = re.compile(r"^\s*poly\s+([A-Za-z_]\w*)\s*,\s*([A-Za-z_]\w*)\s*:\s*\[(.*)\]\s*$", re.S)


def parse_bivariate(text: str):
    from .algebraic import BivariatePolynomial
    m = _BIV_HEAD.match(text)
    if not m:
        raise ParseError(f"bad bivariate literal {text!r}; expected 'poly z,y: [[...], ...]'")
    zvar, yvar, body = m.groups()
    rows = []
    for chunk in _split_top(body, ";") if ";" in body else _split_top(body, ","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if not (chunk.startswith("[") and chunk.endswith("]")):
            raise ParseError(f"bivariate rows must be bracketed: {chunk!r}")
        rows.append(parse_polynomial(chunk[1:-1], zvar))
    return BivariatePolynomial(rows, zvar, yvar)


def format_bivariate(P) -> str:
    body = "; ".join(f"[{row.to_str(P.zvar)}]" for row in P.coeffs_y)
    return f"poly {P.zvar},{P.yvar}: [{body}]"


_DEC = r"[+-]?\d+(?:\.\d*)?(?:[eE][+-]?\d+)?"
_DEC_COMPLEX = re.compile(rf"^\s*({_DEC})?\s*(?:([+-])\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)?\s*\*?\s*i)?\s*$")


def _parse_decimal_complex(text: str) -> GaussianRational:
    t = text.strip()
    if t.startswith("(") and t.endswith(")"):
        t = t[1:-1]
    m = _DEC_COMPLEX.match(t)
    if not m or (m.group(1) is None and m.group(2) is None):
        # pure imaginary like "2.5*i"
        m2 = re.fullmatch(rf"\s*({_DEC})\s*\*\s*i\s*", t)
        if m2:
            return GQ(0, Fraction(m2.group(1)))
        raise ParseError(f"bad decimal midpoint {text!r}")
    re_ = Fraction(m.group(1)) if m.group(1) else Fraction(0)
    im_ = Fraction(0)
    if m.group(2):
        im_ = Fraction(m.group(3)) if m.group(3) else Fraction(1)
        if m.group(2) == "-":
            im_ = -im_
    return GQ(re_, im_)


def parse_number(text: str, prec: int = 256):
    """A Gaussian rational literal or an enclosure ``~mid±rad``."""
    t = text.strip()
    if t.startswith("~"):
        body = t[1:].replace("+/-", "±")
        if "±" not in body:
            raise ParseError(f"enclosure literal needs a radius: {text!r}")
        mid_s, rad_s = body.rsplit("±", 1)
        mid = _parse_decimal_complex(mid_s)
        try:
            rad = Fraction(rad_s.strip())
        except ValueError as exc:
            raise ParseError(f"bad radius in {text!r}") from exc
        return Enclosure.exact(mid, prec).add_error(rad)
    try:
        return parse_gaussian(t)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def _exact_decimal(q: Fraction) -> str:
    """Shortest exact decimal text of a dyadic rational."""
    if q.denominator == 1:
        return str(q.numerator)
    k = q.denominator.bit_length() - 1
    digits = q.numerator * 5 ** k
    s = str(abs(digits)).rjust(k + 1, "0")
    body = (s[:-k] + "." + s[-k:]).rstrip("0").rstrip(".")
    return ("-" if q < 0 else "") + body


def format_number(x) -> str:
    if isinstance(x, GaussianRational):
        return str(x)
    mid = x.mid
    re_s = _exact_decimal(mid.re)
    if mid.im != 0:
        im_s = _exact_decimal(abs(mid.im))
        re_s = f"{re_s}{'-' if mid.im < 0 else '+'}{im_s}*i"
    return f"~{re_s}±{format_radius(x.radius)}"


_INST = re.compile(r"^\s*instance\s*\{(.*)\}\s*$", re.S)


def parse_instance(text: str, prec: int = 256):
    from .evaluator import DFiniteInstance
    m = _INST.match(text)
    if not m:
        raise ParseError("bad instance literal; expected 'instance { op: ...; base: ...; ics: [...] }'")
    fields = {}
    for part in _split_top(m.group(1), ";"):
        if not part.strip():
            continue
        if ":" not in part:
            raise ParseError(f"bad instance field {part!r}")
        key, val = part.split(":", 1)
        fields[key.strip()] = val.strip()
    missing = {"op", "base", "ics"} - set(fields)
    if missing:
        raise ParseError(f"instance is missing {sorted(missing)}")
    op = parse_operator(fields["op"])
    base = parse_number(fields["base"])
    if not isinstance(base, GaussianRational):
        raise ParseError("instance base must be an exact Gaussian rational")
    ics_s = fields["ics"].strip()
    if not (ics_s.startswith("[") and ics_s.endswith("]")):
        raise ParseError("ics must be a bracketed list")
    ics = [parse_number(s, prec) for s in _split_top(ics_s[1:-1], ",") if s.strip()]
    return DFiniteInstance(op, base, ics)


def format_instance(inst) -> str:
    ics = ", ".join(format_number(v) for v in inst.ics)
    return f"instance {{ op: {format_operator(inst.op)}; base: {inst.base}; ics: [{ics}] }}"


def parse_path(text: str):
    """Waypoints separated by ';' (or ',' when no ';' is present)."""
    sep = ";" if ";" in text else ","
    pts = [s for s in _split_top(text.strip().strip("[]"), sep) if s.strip()]
    try:
        return [parse_gaussian(s) for s in pts]
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
