"""Single-variable expression trees: parse, print, differentiate, evaluate.

Grammar (variable ``x`` only)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ['^' exponent]
    exponent:= INT | '(' ['-'] INT ['/' INT] ')'
    primary := INT | 'x' | 'sqrtN' | 'sqrt(' expr ')' | 'cbrt(' expr ')' | '(' expr ')'

Rational literals such as ``1/3`` at the start of a term are read as a
single constant, and ``sqrt(N)`` for square-free integer ``N >= 2`` is the
exact constant ``sqrt N``.  Decimal literals are rejected.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .numerics import (
    DEFAULT_PRECISION, NegativeRadicand, NotExactlyRepresentable, Number, Precision,
    QuadExt, RatInterval, ZeroToNegativePower, DivisionByIntervalContainingZero,
    as_number, exact_pow, interval_pow, is_squarefree, make_quad, quad_enclosure,
    round_outward, sign,
)

ALLOWED_DENOMINATORS = (1, 2, 3, 6)


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class UnsupportedExponent(ValueError):
    pass


class DomainError(ArithmeticError):
    """Exact evaluation left the real domain of the expression."""


class DomainViolation(ArithmeticError):
    """Interval evaluation touched a pole or a negative even radicand."""


# ----------------------------------------------------------------------------
# nodes


@dataclass(frozen=True)
class Const:
    value: Number


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Sub:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Div:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: Fraction

    def __post_init__(self):
        object.__setattr__(self, "exponent", Fraction(self.exponent))
        if self.exponent.denominator not in ALLOWED_DENOMINATORS:
            raise UnsupportedExponent(
                f"exponent {self.exponent} has denominator outside {ALLOWED_DENOMINATORS}")


Expr = Union[Const, Var, Add, Sub, Mul, Div, Neg, Pow]

X = Var()


def const(v) -> Const:
    return Const(as_number(v))


def sqrt(e: Expr) -> Pow:
    return Pow(e, Fraction(1, 2))


# ----------------------------------------------------------------------------
# tokenizer / parser

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+)|(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


@dataclass
class _Tok:
    kind: str  # 'int', 'name', 'op', 'end'
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1):
            raise ExprSyntaxError("decimal literals are not allowed; use p/q", m.start(1))
        if m.group(2):
            toks.append(_Tok("int", m.group(2), m.start(2)))
        elif m.group(3):
            toks.append(_Tok("name", m.group(3), m.start(3)))
        elif m.group(4):
            ch = m.group(4)
            if ch not in "+-*/^()":
                raise ExprSyntaxError(f"unexpected character {ch!r}", m.start(4))
            toks.append(_Tok("op", ch, m.start(4)))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


_SQRT_NAME = re.compile(r"sqrt(\d+)$")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    # helpers
    def peek(self, k: int = 0) -> _Tok:
        j = min(self.i + k, len(self.toks) - 1)
        return self.toks[j]

    def is_op(self, ch: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind == "op" and t.text == ch

    def expect_op(self, ch: str):
        if not self.is_op(ch):
            t = self.peek()
            raise ExprSyntaxError(f"expected {ch!r}, found {t.text or 'end of input'!r}", t.pos)
        self.i += 1

    # literal patterns; each returns (value, tokens consumed) or None
    def _sq_at(self, k: int):
        t = self.peek(k)
        if t.kind != "name":
            return None
        m = _SQRT_NAME.match(t.text)
        if m:
            n = int(m.group(1))
            return (n, 1) if n >= 2 and is_squarefree(n) else None
        if t.text == "sqrt" and self.is_op("(", k + 1) and self.peek(k + 2).kind == "int" \
                and self.is_op(")", k + 3):
            n = int(self.peek(k + 2).text)
            if n >= 2 and is_squarefree(n):
                return n, 4
        return None

    def _rat_at(self, k: int):
        t = self.peek(k)
        if t.kind != "int":
            return None
        if self.is_op("/", k + 1) and self.peek(k + 2).kind == "int" and not self.is_op("^", k + 3):
            return Fraction(int(t.text), int(self.peek(k + 2).text)), 3
        return Fraction(int(t.text)), 1

    def _scaled_sq_at(self, k: int):
        """RAT ['*' SQ] with nothing binding tighter afterwards."""
        r = self._rat_at(k)
        if r is None:
            return None
        val, n = r
        if self.is_op("^", k + n):
            return None
        if self.is_op("*", k + n):
            sq = self._sq_at(k + n + 1)
            if sq is not None and not self.is_op("^", k + n + 1 + sq[1]):
                return QuadExt(Fraction(0), val, sq[0]), n + 1 + sq[1]
        if n == 1:
            return None  # a bare integer parses the ordinary way
        return val, n

    def _quad_group_at(self, k: int):
        """'(' ['-'] RAT ('+'|'-') [RAT '*'] SQ ')' as one constant."""
        if not self.is_op("(", k):
            return None
        j = k + 1
        neg = self.is_op("-", j)
        if neg:
            j += 1
        r = self._rat_at(j)
        if r is None:
            return None
        a, n = r
        j += n
        if not (self.is_op("+", j) or self.is_op("-", j)):
            return None
        bsign = 1 if self.is_op("+", j) else -1
        j += 1
        b = Fraction(1)
        r = self._rat_at(j)
        if r is not None:
            if not self.is_op("*", j + r[1]):
                return None
            b = r[0]
            j += r[1] + 1
        sq = self._sq_at(j)
        if sq is None:
            return None
        j += sq[1]
        if not self.is_op(")", j):
            return None
        return QuadExt(-a if neg else a, bsign * b, sq[0]), j + 1 - k

    # grammar
    def parse(self) -> Expr:
        e = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ExprSyntaxError(f"unexpected token {t.text!r}", t.pos)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.is_op("+") or self.is_op("-"):
            op = self.peek().text
            self.i += 1
            r = self.term()
            e = Add(e, r) if op == "+" else Sub(e, r)
        return e

    def term(self) -> Expr:
        e = self.unary(fold=True)
        while self.is_op("*") or self.is_op("/"):
            op = self.peek().text
            self.i += 1
            r = self.unary(fold=False)
            e = Mul(e, r) if op == "*" else Div(e, r)
        return e

    def unary(self, fold: bool) -> Expr:
        if self.is_op("-"):
            if fold:
                lit = self._scaled_sq_at(1)
                if lit is None:
                    r = self._rat_at(1)
                    if r is not None and r[1] == 1 and not self.is_op("^", 2):
                        lit = r
                if lit is None:
                    sq = self._sq_at(1)
                    if sq is not None and not self.is_op("^", 1 + sq[1]):
                        lit = QuadExt(Fraction(0), Fraction(1), sq[0]), sq[1]
                if lit is not None:
                    self.i += 1 + lit[1]
                    return Const(as_number(-lit[0]))
            self.i += 1
            return Neg(self.unary(fold))
        if fold:
            lit = self._scaled_sq_at(0)
            if lit is not None:
                self.i += lit[1]
                return Const(as_number(lit[0]))
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.is_op("^"):
            self.i += 1
            base = Pow(base, self.exponent())
        return base

    def exponent(self) -> Fraction:
        t = self.peek()
        if t.kind == "int":
            self.i += 1
            return Fraction(int(t.text))
        if self.is_op("("):
            self.i += 1
            neg = self.is_op("-")
            if neg:
                self.i += 1
            t = self.peek()
            if t.kind != "int":
                raise ExprSyntaxError("exponent must be a rational literal", t.pos)
            self.i += 1
            num, den = int(t.text), 1
            if self.is_op("/"):
                self.i += 1
                t2 = self.peek()
                if t2.kind != "int":
                    raise ExprSyntaxError("exponent denominator must be an integer", t2.pos)
                self.i += 1
                den = int(t2.text)
                if den == 0:
                    raise ExprSyntaxError("zero exponent denominator", t2.pos)
            self.expect_op(")")
            val = Fraction(-num if neg else num, den)
            if val.denominator not in ALLOWED_DENOMINATORS:
                raise UnsupportedExponent(
                    f"exponent {val} at position {t.pos}: denominator must be in "
                    f"{ALLOWED_DENOMINATORS}")
            return val
        raise ExprSyntaxError("expected exponent", t.pos)

    def primary(self) -> Expr:
        t = self.peek()
        if t.kind == "int":
            self.i += 1
            return Const(Fraction(int(t.text)))
        if t.kind == "name":
            sq = self._sq_at(0)
            if sq is not None:
                self.i += sq[1]
                return Const(QuadExt(Fraction(0), Fraction(1), sq[0]))
            if t.text == "x":
                self.i += 1
                return X
            if t.text in ("sqrt", "cbrt"):
                self.i += 1
                self.expect_op("(")
                inner = self.expr()
                self.expect_op(")")
                return Pow(inner, Fraction(1, 2 if t.text == "sqrt" else 3))
            raise ExprSyntaxError(f"unknown name {t.text!r}", t.pos)
        if self.is_op("("):
            grp = self._quad_group_at(0)
            if grp is not None:
                self.i += grp[1]
                return Const(as_number(grp[0]))
            self.i += 1
            e = self.expr()
            self.expect_op(")")
            return e
        raise ExprSyntaxError(f"unexpected {t.text or 'end of input'!r}", t.pos)


def parse(text: str) -> Expr:
    return _Parser(text).parse()


# ----------------------------------------------------------------------------
# printer


def _const_text(v: Number) -> tuple[str, bool]:
    """Text for a constant and whether it is an atom (safe anywhere)."""
    if isinstance(v, QuadExt):
        if v.a == 0:
            if v.b == 1:
                return f"sqrt({v.d})", True
            if v.b == -1:
                return f"-sqrt({v.d})", False
            return f"{_rat_text(v.b)}*sqrt({v.d})", False
        b = abs(v.b)
        bs = f"sqrt({v.d})" if b == 1 else f"{_rat_text(b)}*sqrt({v.d})"
        return f"({_rat_text(v.a)}{'+' if v.b > 0 else '-'}{bs})", True
    v = Fraction(v)
    return _rat_text(v), (v >= 0 and v.denominator == 1)


def _rat_text(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def _is_const_atom(e) -> bool:
    return isinstance(e, Const) and _const_text(e.value)[1]


def _exp_text(p: Fraction) -> str:
    if p.denominator == 1 and p >= 0:
        return str(p.numerator)
    return f"({_rat_text(p)})"


def to_str(e: Expr) -> str:
    return _pr(e, True)


def _wrap(s: str) -> str:
    return f"({s})"


def _pr(e: Expr, fold: bool) -> str:
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Const):
        text, atom = _const_text(e.value)
        return text if (atom or fold) else _wrap(text)
    if isinstance(e, (Add, Sub)):
        left = _pr(e.left, fold)
        r = e.right
        if isinstance(r, (Add, Sub, Neg)):
            right = _wrap(_pr(r, True))
        elif isinstance(r, Const):
            text, atom = _const_text(r.value)
            if isinstance(r.value, QuadExt) or text.startswith("-"):
                right = _wrap(text)
            else:
                right = text
        else:
            right = _pr(r, True)
        return f"{left}{'+' if isinstance(e, Add) else '-'}{right}"
    if isinstance(e, (Mul, Div)):
        if isinstance(e.left, (Add, Sub)):
            left = _wrap(_pr(e.left, True))
        else:
            left = _pr(e.left, fold)
        r = e.right
        if isinstance(r, (Add, Sub, Mul, Div, Neg)):
            right = _wrap(_pr(r, True))
        elif isinstance(r, Const):
            text, atom = _const_text(r.value)
            if isinstance(r.value, QuadExt) or not atom or isinstance(e.left, Const):
                right = _wrap(text)
            else:
                right = text
        else:
            right = _pr(r, False)
        return f"{left}{'*' if isinstance(e, Mul) else '/'}{right}"
    if isinstance(e, Neg):
        o = e.operand
        if isinstance(o, (Add, Sub, Mul, Div, Const)):
            return "-" + _wrap(_pr(o, True))
        return "-" + _pr(o, False)
    if isinstance(e, Pow):
        b = e.base
        if isinstance(b, Var) or _is_const_atom(b):
            base = _pr(b, False)
        else:
            base = _wrap(_pr(b, True))
        return f"{base}^{_exp_text(e.exponent)}"
    raise TypeError(f"not an expression: {e!r}")


# ----------------------------------------------------------------------------
# structural helpers


def children(e: Expr) -> tuple:
    if isinstance(e, (Add, Sub, Mul, Div)):
        return (e.left, e.right)
    if isinstance(e, Neg):
        return (e.operand,)
    if isinstance(e, Pow):
        return (e.base,)
    return ()


def walk(e: Expr):
    yield e
    for c in children(e):
        yield from walk(c)


def has_var(e: Expr) -> bool:
    return any(isinstance(n, Var) for n in walk(e))


def substitute(e: Expr, repl: Expr) -> Expr:
    """Replace every occurrence of x by ``repl``."""
    if isinstance(e, Var):
        return repl
    if isinstance(e, Const):
        return e
    if isinstance(e, Neg):
        return Neg(substitute(e.operand, repl))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, repl), e.exponent)
    return type(e)(substitute(e.left, repl), substitute(e.right, repl))


# ----------------------------------------------------------------------------
# differentiation

ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def _is_c(e, v) -> bool:
    return isinstance(e, Const) and e.value == v


def _fold(op, a: Const, b: Const):
    try:
        return Const(as_number(op(a.value, b.value)))
    except NotExactlyRepresentable:
        return None


def _add(a, b):
    if _is_c(a, 0):
        return b
    if _is_c(b, 0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return _fold(lambda u, v: u + v, a, b) or Add(a, b)
    return Add(a, b)


def _sub(a, b):
    if _is_c(b, 0):
        return a
    if _is_c(a, 0):
        return _neg(b)
    if isinstance(a, Const) and isinstance(b, Const):
        return _fold(lambda u, v: u - v, a, b) or Sub(a, b)
    return Sub(a, b)


def _neg(a):
    if isinstance(a, Const):
        return Const(as_number(-a.value))
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def _mul(a, b):
    if _is_c(a, 0) or _is_c(b, 0):
        return ZERO
    if _is_c(a, 1):
        return b
    if _is_c(b, 1):
        return a
    if _is_c(a, -1):
        return _neg(b)
    if isinstance(a, Const) and isinstance(b, Const):
        return _fold(lambda u, v: u * v, a, b) or Mul(a, b)
    if isinstance(b, Const) and not isinstance(a, Const):
        a, b = b, a
    if isinstance(a, Const) and isinstance(b, Mul) and isinstance(b.left, Const):
        c = _fold(lambda u, v: u * v, a, b.left)
        if c is not None:
            return _mul(c, b.right)
    return Mul(a, b)


def _div(a, b):
    if _is_c(a, 0):
        return ZERO
    if _is_c(b, 1):
        return a
    return Div(a, b)


def _pow(base, p: Fraction):
    if p == 0:
        return ONE
    if p == 1:
        return base
    return Pow(base, p)


def diff(e: Expr) -> Expr:
    """Symbolic derivative with respect to x."""
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return ONE
    if isinstance(e, Add):
        return _add(diff(e.left), diff(e.right))
    if isinstance(e, Sub):
        return _sub(diff(e.left), diff(e.right))
    if isinstance(e, Neg):
        return _neg(diff(e.operand))
    if isinstance(e, Mul):
        return _add(_mul(diff(e.left), e.right), _mul(e.left, diff(e.right)))
    if isinstance(e, Div):
        u, v = e.left, e.right
        du, dv = diff(u), diff(v)
        if _is_c(dv, 0):
            return _div(du, v)
        num = _sub(_mul(du, v), _mul(u, dv))
        return _div(num, _pow(v, Fraction(2)))
    if isinstance(e, Pow):
        du = diff(e.base)
        if _is_c(du, 0):
            return ZERO
        p = e.exponent
        return _mul(Const(p), _mul(_pow(e.base, p - 1), du))
    raise TypeError(f"not an expression: {e!r}")


# ----------------------------------------------------------------------------
# evaluation


def eval_exact(e: Expr, p) -> Number:
    """Exact value of ``e`` at ``p`` within Q or a single Q(sqrt d)."""
    p = as_number(p)

    def ev(n):
        if isinstance(n, Const):
            return n.value
        if isinstance(n, Var):
            return p
        if isinstance(n, Add):
            return as_number(ev(n.left) + ev(n.right))
        if isinstance(n, Sub):
            return as_number(ev(n.left) - ev(n.right))
        if isinstance(n, Mul):
            return as_number(ev(n.left) * ev(n.right))
        if isinstance(n, Neg):
            return as_number(-ev(n.operand))
        if isinstance(n, Div):
            den = ev(n.right)
            if den == 0:
                raise DomainError("division by zero")
            return as_number(ev(n.left) / den)
        if isinstance(n, Pow):
            b = ev(n.base)
            q = n.exponent.denominator
            if q % 2 == 0 and sign(b) < 0:
                raise DomainError("even root of a negative value")
            if n.exponent < 0 and b == 0:
                raise DomainError("zero to a negative power")
            return as_number(exact_pow(b, n.exponent.numerator, q))
        raise TypeError(f"not an expression: {n!r}")

    return ev(e)


def eval_interval(e: Expr, x: RatInterval, prec: Precision = DEFAULT_PRECISION,
                  defined: bool = False) -> RatInterval:
    """Rigorous enclosure of ``{e(t) : t in x}``.

    With ``defined=True`` the caller guarantees that ``x`` encloses a single
    point at which ``e`` is defined, so an even-root base whose enclosure dips
    below zero is clipped at zero instead of being rejected.
    """
    bits = prec.bits + 30

    def ev(n) -> RatInterval:
        if isinstance(n, Const):
            return quad_enclosure(n.value, Precision(prec.epsilon / 1024))
        if isinstance(n, Var):
            return x
        if isinstance(n, Add):
            r = ev(n.left) + ev(n.right)
        elif isinstance(n, Sub):
            r = ev(n.left) - ev(n.right)
        elif isinstance(n, Mul):
            r = ev(n.left) * ev(n.right)
        elif isinstance(n, Neg):
            return -ev(n.operand)
        elif isinstance(n, Div):
            try:
                r = ev(n.left) / ev(n.right)
            except DivisionByIntervalContainingZero as exc:
                raise DomainViolation(str(exc)) from None
        elif isinstance(n, Pow):
            b = ev(n.base)
            if defined and n.exponent.denominator % 2 == 0 and b.lo < 0 <= b.hi:
                b = RatInterval(Fraction(0), b.hi)
            try:
                r = interval_pow(b, n.exponent.numerator, n.exponent.denominator,
                                 Precision(prec.epsilon / 1024))
            except (NegativeRadicand, ZeroToNegativePower) as exc:
                raise DomainViolation(str(exc)) from None
        else:
            raise TypeError(f"not an expression: {n!r}")
        return round_outward(r, bits)

    return ev(e)


# ----------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class Domain:
    """An interval of the real line with exact (possibly infinite) endpoints.

    ``lo``/``hi`` of ``None`` mean minus/plus infinity.
    """

    lo: Number | None
    hi: Number | None
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        if self.lo is not None:
            object.__setattr__(self, "lo", as_number(self.lo))
        else:
            object.__setattr__(self, "lo_open", True)
        if self.hi is not None:
            object.__setattr__(self, "hi", as_number(self.hi))
        else:
            object.__setattr__(self, "hi_open", True)
        if self.lo is not None and self.hi is not None and sign(self.hi - self.lo) <= 0:
            raise ValueError("domain must satisfy lo < hi")

    def contains(self, v) -> bool:
        if self.lo is not None:
            s = sign(v - self.lo)
            if s < 0 or (s == 0 and self.lo_open):
                return False
        if self.hi is not None:
            s = sign(self.hi - v)
            if s < 0 or (s == 0 and self.hi_open):
                return False
        return True

    def __str__(self) -> str:
        lo = "-inf" if self.lo is None else to_str(Const(self.lo))
        hi = "inf" if self.hi is None else to_str(Const(self.hi))
        return f"{'(' if self.lo_open else '['}{lo}, {hi}{')' if self.hi_open else ']'}"


REALS = Domain(None, None)


def parse_domain(text: str) -> Domain:
    """Parse ``(0, 1)``, ``[-1, inf)``, ``(0, 3*sqrt(3))`` and similar."""
    s = text.strip()
    if len(s) < 2 or s[0] not in "([" or s[-1] not in ")]":
        raise ExprSyntaxError("domain must look like (lo, hi) or [lo, hi]", 0)
    body = s[1:-1]
    if body.count(",") != 1:
        raise ExprSyntaxError("domain needs exactly one comma", 0)
    lo_t, hi_t = (t.strip() for t in body.split(","))

    def endpoint(t: str, neg_inf: bool):
        if t in ("inf", "+inf", "oo") and not neg_inf:
            return None
        if t in ("-inf", "-oo") and neg_inf:
            return None
        e = parse(t)
        if has_var(e):
            raise ExprSyntaxError("domain endpoint must be constant", 0)
        try:
            return eval_exact(e, 0)
        except (DomainError, NotExactlyRepresentable) as exc:
            raise ExprSyntaxError(f"endpoint {t!r} not exactly representable: {exc}", 0)

    lo = endpoint(lo_t, True)
    hi = endpoint(hi_t, False)
    return Domain(lo, hi, lo_open=(s[0] == "("), hi_open=(s[-1] == ")"))


def make_quad_const(a, b, d) -> Const:
    return Const(make_quad(a, b, d))
