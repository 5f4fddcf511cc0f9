"""Rational functions in x and single-radical forms ``P + Q*sqrt(R)``.

These are the normal forms the symbolic rewriter works in.  Conversion from
:mod:`expr` trees is exact; anything outside the fragment raises.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm

from .expr import Add, Const, Div, Expr, Mul, Neg, Pow, Sub, Var, X, eval_exact, has_var
from .numerics import NotExactlyRepresentable, QuadExt, as_number, sign
from .poly import UniPoly, gcd


class NotRationalStructure(ValueError):
    pass


class NoSingleRadicalDecomposition(ValueError):
    pass


ONE = UniPoly([1])


class RatFunc:
    """num/den with gcd removed and a constant denominator folded into num."""

    __slots__ = ("num", "den")

    def __init__(self, num: UniPoly, den: UniPoly = ONE):
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if not num:
            num, den = UniPoly(), ONE
        elif den.degree > 0:
            g = gcd(num, den)
            if g.degree > 0:
                num, den = num // g, den // g
        if den.degree == 0:
            num, den = num.scale(1 / den.lc), ONE
        self.num, self.den = num, den

    @classmethod
    def const(cls, c) -> RatFunc:
        return cls(UniPoly([c]))

    def is_poly(self) -> bool:
        return self.den.degree == 0

    def is_zero(self) -> bool:
        return not self.num

    def is_const(self) -> bool:
        return self.is_poly() and self.num.degree <= 0

    def __add__(self, o):
        o = _rf(o)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, o):
        return self + (-_rf(o))

    def __rsub__(self, o):
        return _rf(o) - self

    def __mul__(self, o):
        o = _rf(o)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> RatFunc:
        if not self.num:
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, o):
        return self * _rf(o).inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RatFunc(self.num ** n, self.den ** n)

    def __eq__(self, o):
        if not isinstance(o, RatFunc):
            return NotImplemented
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __call__(self, v):
        return as_number(self.num(v) / self.den(v))

    def __repr__(self):
        return f"RatFunc({self.num} / {self.den})"

    def to_expr(self) -> Expr:
        n = poly_to_expr(self.num)
        if self.den.degree <= 0:
            return n
        return Div(n, poly_to_expr(self.den))


def _rf(o) -> RatFunc:
    return o if isinstance(o, RatFunc) else RatFunc.const(o)


def poly_to_expr(p: UniPoly) -> Expr:
    """Expanded ``c_n*x^n + ... + c_0`` with subtraction for negative terms."""
    if not p:
        return Const(Fraction(0))
    acc = None
    for i in range(p.degree, -1, -1):
        c = p.coeffs[i]
        if c == 0:
            continue
        mono = None if i == 0 else (X if i == 1 else Pow(X, Fraction(i)))
        neg = sign(c) < 0 and acc is not None
        mag = as_number(-c) if neg else c
        if mono is None:
            term = Const(mag)
        elif mag == 1:
            term = mono
        else:
            term = Mul(Const(mag), mono)
        if acc is None:
            acc = term
        else:
            acc = Sub(acc, term) if neg else Add(acc, term)
    return acc


def content_normalize(p: UniPoly) -> tuple[Fraction, UniPoly]:
    """Positive rational c with c*p having coprime integer coefficients (Q only)."""
    if not p or p.domain is not None:
        return Fraction(1), p
    den = 1
    for c in p.coeffs:
        den = lcm(den, c.denominator)
    ints = [int(c * den) for c in p.coeffs]
    g = 0
    for v in ints:
        g = _gcd(g, v)
    c = Fraction(den, g)
    return c, p.scale(c)


def _gcd(a: int, b: int) -> int:
    a, b = abs(a), abs(b)
    while b:
        a, b = b, a % b
    return a


# ----------------------------------------------------------------------------
# single-radical forms


class RadForm:
    """``p + q*sqrt(r)``; ``r`` is None when ``q`` is zero."""

    __slots__ = ("p", "q", "r")

    def __init__(self, p: RatFunc, q: RatFunc | None = None, r: RatFunc | None = None):
        q = q if q is not None else RatFunc(UniPoly())
        if q.is_zero():
            r = None
        self.p, self.q, self.r = p, q, r

    @property
    def radical_free(self) -> bool:
        return self.r is None

    def _join(self, o: RadForm) -> RatFunc | None:
        if self.r is None:
            return o.r
        if o.r is None or o.r == self.r:
            return self.r
        raise NoSingleRadicalDecomposition(
            f"two independent radicals sqrt({self.r}) and sqrt({o.r})")

    def __add__(self, o: RadForm) -> RadForm:
        r = self._join(o)
        return RadForm(self.p + o.p, self.q + o.q, r)

    def __neg__(self) -> RadForm:
        return RadForm(-self.p, -self.q, self.r)

    def __sub__(self, o: RadForm) -> RadForm:
        return self + (-o)

    def __mul__(self, o: RadForm) -> RadForm:
        r = self._join(o)
        rr = r if r is not None else RatFunc.const(0)
        return RadForm(self.p * o.p + self.q * o.q * rr, self.p * o.q + self.q * o.p, r)

    def inverse(self) -> RadForm:
        if self.r is None:
            return RadForm(self.p.inverse())
        den = self.p * self.p - self.q * self.q * self.r
        if den.is_zero():
            raise NotRationalStructure("radical expression with vanishing norm")
        inv = den.inverse()
        return RadForm(self.p * inv, -self.q * inv, self.r)

    def __truediv__(self, o: RadForm) -> RadForm:
        return self * o.inverse()

    def __pow__(self, n: int) -> RadForm:
        if n < 0:
            return self.inverse() ** (-n)
        out = RadForm(RatFunc.const(1))
        for _ in range(n):
            out = out * self
        return out


def to_radform(e: Expr) -> RadForm:
    """Convert an expression to ``P + Q*sqrt(R)`` with rational-function P, Q, R."""
    if not has_var(e):
        try:
            return RadForm(RatFunc.const(eval_exact(e, 0)))
        except NotExactlyRepresentable as exc:
            raise NotRationalStructure(f"constant not in a single Q(sqrt d): {exc}") from None
        except ArithmeticError as exc:
            raise NotRationalStructure(str(exc)) from None
    if isinstance(e, Var):
        return RadForm(RatFunc(UniPoly([0, 1])))
    if isinstance(e, Add):
        return to_radform(e.left) + to_radform(e.right)
    if isinstance(e, Sub):
        return to_radform(e.left) - to_radform(e.right)
    if isinstance(e, Mul):
        return to_radform(e.left) * to_radform(e.right)
    if isinstance(e, Neg):
        return -to_radform(e.operand)
    if isinstance(e, Div):
        den = to_radform(e.right)
        try:
            return to_radform(e.left) / den
        except ZeroDivisionError:
            raise NotRationalStructure("division by the zero function") from None
    if isinstance(e, Pow):
        base = to_radform(e.base)
        r = e.exponent
        if r.denominator == 1:
            try:
                return base ** r.numerator
            except ZeroDivisionError:
                raise NotRationalStructure("zero function to a negative power") from None
        if r.denominator != 2:
            raise NotRationalStructure(f"exponent {r} needs a root substitution")
        if not base.radical_free:
            raise NoSingleRadicalDecomposition("nested radical")
        b = base.p
        k = (r.numerator - 1) // 2
        if b.is_zero():
            raise NotRationalStructure("radical of the zero function")
        return RadForm(RatFunc(UniPoly()), b ** k, b)
    raise TypeError(f"not an expression: {e!r}")


def to_ratfunc(e: Expr) -> RatFunc:
    f = to_radform(e)
    if not f.radical_free:
        raise NotRationalStructure("expression contains a radical")
    return f.p


def var_root_denominator(e: Expr) -> int:
    """lcm of exponent denominators on ``x^(p/q)`` nodes, or 1."""
    from .expr import walk
    q = 1
    for n in walk(e):
        if isinstance(n, Pow) and isinstance(n.base, Var):
            q = lcm(q, n.exponent.denominator)
    return q


def other_fractional_powers(e: Expr) -> bool:
    from .expr import walk
    return any(isinstance(n, Pow) and not isinstance(n.base, Var)
               and n.exponent.denominator != 1 and has_var(n.base) for n in walk(e))


def substitute_power(e: Expr, q: int) -> Expr:
    """Replace x by t^q, collapsing ``(t^q)^(p/s)`` to ``t^(pq/s)``."""
    if isinstance(e, Var):
        return X if q == 1 else Pow(X, Fraction(q))
    if isinstance(e, Const):
        return e
    if isinstance(e, Pow):
        if isinstance(e.base, Var):
            k = e.exponent * q
            if k.denominator != 1:
                raise ValueError("exponent not cleared by substitution")
            return X if k == 1 else Pow(X, k)
        return Pow(substitute_power(e.base, q), e.exponent)
    if isinstance(e, Neg):
        return Neg(substitute_power(e.operand, q))
    return type(e)(substitute_power(e.left, q), substitute_power(e.right, q))
