"""Line-oriented problem files.

    name: ex01
    vars: 3
    domain: (0, 1)
    constraint: sum(c=x^1, total=1)
    f: (1-x)/x-2*sqrt(2*(1-x)/x)
    family: line
    tangency: tangent_at(1/3)
    direction: ge
    bound: -6
    witness: 1/3, 1/3, 1/3
    expect: proved
    notes: free text

``f`` may repeat (one line per variable for heterogeneous problems).  Lines
starting with ``#`` are comments.  Unknown keys are errors.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .compose import FreeIntercept, PairwiseSum, ProblemSpec, ProductAtLeast, SumOfC
from .expr import (
    Const, Domain, DomainViolation, Expr, ExprSyntaxError, Pow, UnsupportedExponent, X, eval_exact,
    eval_interval, has_var, parse, parse_domain, to_str,
)
from .numerics import Number, NumericsError, Precision, RatInterval, as_number
from .surrogate import AffineInC, ConstraintFn, InterceptSum, Line, Monomial, TangentAt, Through


class ProblemFileError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, col {col}: {msg}" if line else msg)
        self.msg, self.line, self.col = msg, line, col


KEYS = ("name", "vars", "domain", "constraint", "f", "family", "tangency", "direction", "bound",
        "witness", "strategy", "expect", "notes")
REQUIRED = ("name", "vars", "domain", "constraint", "f", "family")
EXPECT = ("proved", "disproved", "unknown", "negative")


@dataclass(frozen=True)
class EqualSlopes:
    pass


@dataclass(frozen=True)
class ProblemFile:
    name: str
    n: int
    domain: Domain
    constraint: object
    functions: tuple
    family: object
    tangency: tuple = ()
    direction: str = "ge"
    bound: Expr | None = None
    witness: tuple | None = None
    strategy: str = "auto"
    expect: str = "proved"
    notes: str = ""

    def spec(self) -> ProblemSpec:
        return ProblemSpec(self.name, self.n, self.functions, self.domain, self.constraint,
                           self.bound, self.direction, self.notes)

    @property
    def bound_value(self) -> Number | None:
        """Exact bound, or None when absent or not exactly representable."""
        if self.bound is None:
            return None
        try:
            return const_value(self.bound)
        except NumericsError:
            return None

    @property
    def witness_values(self) -> tuple | None:
        return None if self.witness is None else tuple(const_value(w) for w in self.witness)

    def tangency_points(self) -> tuple:
        pts = []
        for c in self.tangency:
            v = getattr(c, "x0", getattr(c, "x1", None))
            if v is not None:
                pts.append(v)
        return tuple(pts)


def const_value(e: Expr) -> Number:
    if has_var(e):
        raise ValueError(f"{to_str(e)} is not a constant")
    return as_number(eval_exact(e, 0))


def _const(text: str, line: int) -> Number:
    try:
        return const_value(parse(text))
    except (ExprSyntaxError, UnsupportedExponent, ValueError, NumericsError) as exc:
        raise ProblemFileError(f"bad constant {text!r}: {exc}", line) from None


def _args(text: str, line: int) -> dict:
    out = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise ProblemFileError(f"expected key=value in {part!r}", line)
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


_CALL = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")


def _call(text: str, line: int) -> tuple[str, str | None]:
    m = _CALL.match(text)
    if not m:
        raise ProblemFileError(f"cannot parse {text!r}", line)
    return m.group(1), m.group(2)


def _exponent_of(text: str, line: int) -> Fraction:
    try:
        e = parse(text)
    except ExprSyntaxError as exc:
        raise ProblemFileError(str(exc), line) from None
    if e == X:
        return Fraction(1)
    if isinstance(e, Pow) and e.base == X:
        return e.exponent
    raise ProblemFileError(f"constraint function must be x^p, got {text!r}", line)


def parse_constraint(text: str, line: int = 0):
    name, arg = _call(text, line)
    a = _args(arg or "", line)
    try:
        if name == "sum" and set(a) == {"c", "total"}:
            return SumOfC(ConstraintFn(_exponent_of(a["c"], line)), Fraction(_const(a["total"], line)))
        if name == "product" and set(a) == {"min"}:
            return ProductAtLeast(Fraction(_const(a["min"], line)))
        if name == "pairwise" and set(a) == {"total"}:
            return PairwiseSum(Fraction(_const(a["total"], line)))
        if name == "free" and set(a) == {"A"}:
            return FreeIntercept(Fraction(_const(a["A"], line)))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ProblemFileError):
            raise
        raise ProblemFileError(str(exc), line) from None
    raise ProblemFileError(f"unknown constraint {text!r}", line)


def constraint_str(c) -> str:
    if isinstance(c, SumOfC):
        return f"sum(c=x^{_exp(c.c.p)}, total={c.total})"
    if isinstance(c, ProductAtLeast):
        return f"product(min={c.bound})"
    if isinstance(c, PairwiseSum):
        return f"pairwise(total={c.total})"
    return f"free(A={c.a})"


def _exp(p: Fraction) -> str:
    return str(p) if p.denominator == 1 else f"({p})"


def parse_family(text: str, line: int = 0):
    name, arg = _call(text, line)
    if name == "line" and arg is None:
        return Line()
    if name == "monomial" and arg is None:
        return Monomial()
    if name == "equal_slopes" and arg is None:
        return EqualSlopes()
    if name == "affine":
        a = _args(arg or "", line)
        if set(a) == {"c"}:
            try:
                return AffineInC(ConstraintFn(_exponent_of(a["c"], line)))
            except ValueError as exc:
                if isinstance(exc, ProblemFileError):
                    raise
                raise ProblemFileError(str(exc), line) from None
    raise ProblemFileError(f"unknown family {text!r}", line)


def family_str(f) -> str:
    if isinstance(f, Line):
        return "line"
    if isinstance(f, Monomial):
        return "monomial"
    if isinstance(f, EqualSlopes):
        return "equal_slopes"
    return f"affine(c=x^{_exp(f.c.p)})"


_COND = re.compile(r"([a-z_]+)\(([^()]*(?:\([^()]*\)[^()]*)*)\)")


def parse_tangency(text: str, line: int = 0) -> tuple:
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _COND.match(text, pos)
        if not m:
            raise ProblemFileError(f"cannot parse tangency condition at {text[pos:]!r}", line, pos + 1)
        name, arg = m.group(1), m.group(2)
        if name == "tangent_at":
            out.append(TangentAt(_const(arg, line)))
        elif name == "through":
            out.append(Through(_const(arg, line)))
        elif name == "intercept":
            a = _args(arg, line)
            if set(a) != {"n", "A"}:
                raise ProblemFileError("intercept needs n and A", line)
            out.append(InterceptSum(int(_const(a["n"], line)), Fraction(_const(a["A"], line))))
        else:
            raise ProblemFileError(f"unknown tangency condition {name!r}", line, pos + 1)
        pos = m.end()
    return tuple(out)


def _num_str(v) -> str:
    return to_str(Const(v))


def tangency_str(conds) -> str:
    parts = []
    for c in conds:
        if isinstance(c, TangentAt):
            parts.append(f"tangent_at({_num_str(c.x0)})")
        elif isinstance(c, Through):
            parts.append(f"through({_num_str(c.x1)})")
        else:
            parts.append(f"intercept(n={c.n}, A={c.a})")
    return " ".join(parts)


def parse_problem(text: str) -> ProblemFile:
    vals: dict = {}
    fs: list = []
    for ln, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        if ":" not in s:
            raise ProblemFileError("expected 'key: value'", ln, 1)
        key, val = s.split(":", 1)
        key, val = key.strip(), val.strip()
        if key not in KEYS:
            raise ProblemFileError(f"unknown key {key!r}", ln, 1)
        rest = raw[raw.index(":") + 1:]
        col = len(raw) - len(rest.lstrip()) + 1  # 1-based column of the value
        if key == "f":
            try:
                fs.append(parse(val))
            except (ExprSyntaxError, UnsupportedExponent) as exc:
                raise ProblemFileError(f"bad expression: {exc}", ln, col + getattr(exc, "pos", 0)) from None
            continue
        if key in vals:
            raise ProblemFileError(f"duplicate key {key!r}", ln, 1)
        vals[key] = (val, ln, col)
    if fs:
        vals["f"] = (None, 0, 0)
    for k in REQUIRED:
        if k not in vals:
            raise ProblemFileError(f"missing key {k!r}")

    def get(k, conv, default=None):
        if k not in vals:
            return default
        v, ln, col = vals[k]
        try:
            return conv(v, ln)
        except ProblemFileError as exc:
            if exc.col:
                raise
            raise ProblemFileError(exc.msg, ln, col) from None

    def _int(v, ln):
        try:
            n = int(v)
        except ValueError:
            raise ProblemFileError(f"vars must be an integer, got {v!r}", ln) from None
        if n < 2:
            raise ProblemFileError("vars must be at least 2", ln)
        return n

    def _dom(v, ln):
        try:
            return parse_domain(v)
        except (ExprSyntaxError, ValueError) as exc:
            raise ProblemFileError(f"bad domain: {exc}", ln) from None

    def _choice(options):
        def conv(v, ln):
            if v not in options:
                raise ProblemFileError(f"expected one of {options}, got {v!r}", ln)
            return v
        return conv

    def _expr(v, ln):
        # a bound may leave Q(sqrt d) (e.g. several radicands); it only needs an enclosure
        try:
            e = parse(v)
            if has_var(e):
                raise ValueError("bound must be constant")
            eval_interval(e, RatInterval.point(0), Precision())
        except (ExprSyntaxError, UnsupportedExponent, ValueError, DomainViolation,
                NumericsError) as exc:
            raise ProblemFileError(f"bad bound {v!r}: {exc}", ln) from None
        return e

    def _witness(v, ln):
        items = [s.strip() for s in v.split(",")]
        out = []
        for s in items:
            _const(s, ln)
            out.append(parse(s))
        return tuple(out)

    n = get("vars", _int)
    if len(fs) not in (1, n):
        raise ProblemFileError(f"need 1 or {n} f lines, got {len(fs)}")
    pf = ProblemFile(
        name=get("name", lambda v, ln: v),
        n=n,
        domain=get("domain", _dom),
        constraint=get("constraint", parse_constraint),
        functions=tuple(fs),
        family=get("family", parse_family),
        tangency=get("tangency", parse_tangency, ()),
        direction=get("direction", _choice(("ge", "gt")), "ge"),
        bound=get("bound", _expr),
        witness=get("witness", _witness),
        strategy=get("strategy", _choice(("auto", "symbolic", "interval")), "auto"),
        expect=get("expect", _choice(EXPECT), "proved"),
        notes=get("notes", lambda v, ln: v, ""),
    )
    if pf.witness is not None and len(pf.witness) != n:
        raise ProblemFileError(f"witness needs {n} values")
    return pf


def print_problem(pf: ProblemFile) -> str:
    lines = [f"name: {pf.name}", f"vars: {pf.n}", f"domain: {pf.domain}",
             f"constraint: {constraint_str(pf.constraint)}"]
    lines += [f"f: {to_str(f)}" for f in pf.functions]
    lines.append(f"family: {family_str(pf.family)}")
    if pf.tangency:
        lines.append(f"tangency: {tangency_str(pf.tangency)}")
    lines.append(f"direction: {pf.direction}")
    if pf.bound is not None:
        lines.append(f"bound: {to_str(pf.bound)}")
    if pf.witness is not None:
        lines.append("witness: " + ", ".join(to_str(w) for w in pf.witness))
    lines.append(f"strategy: {pf.strategy}")
    lines.append(f"expect: {pf.expect}")
    if pf.notes:
        lines.append(f"notes: {pf.notes}")
    return "\n".join(lines) + "\n"


def load_problem(path) -> ProblemFile:
    with open(path, encoding="utf-8") as fh:
        return parse_problem(fh.read())
