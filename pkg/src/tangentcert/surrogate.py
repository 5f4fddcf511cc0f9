"""Surrogate synthesis: the lower-bounding curve g tangent to f.

Families are lines, ``k*c(x) + m`` for a power constraint function
``c(x) = x^p``, and monomials ``k*x^m``.  Parameters are solved exactly in
Q or a single Q(sqrt d); the one place that needs two independent radicals
(the equal-slope system) works with certified enclosures instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .expr import (
    Add, Const, Div, Domain, Expr, Mul, Pow, Sub, Var, X, diff, eval_exact, parse, to_str,
)
from .numerics import (
    Number, Precision, QuadExt, RatInterval, as_number, exact_pow, exact_sqrt, interval_arith,
    quad_enclosure, sign,
)
from .poly import UniPoly, isolate_roots
from .ratfunc import NoSingleRadicalDecomposition, NotRationalStructure, RatFunc, to_ratfunc


class NoSolutionInDomain(ValueError):
    pass


class NonAlgebraicCondition(ValueError):
    pass


class InconsistentConditions(ValueError):
    pass


class SingularSystem(ValueError):
    pass


class NonPositiveWeight(ValueError):
    pass


@dataclass(frozen=True)
class ConstraintFn:
    """c(x) = x^p."""

    p: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        if self.p <= 0 or self.p.denominator not in (1, 2, 3, 6):
            raise ValueError(f"constraint exponent {self.p} not supported")

    def expr(self) -> Expr:
        return X if self.p == 1 else Pow(X, self.p)

    def __call__(self, v) -> Number:
        return exact_pow(v, self.p.numerator, self.p.denominator)

    def __str__(self):
        return "x" if self.p == 1 else f"x^{self.p}" if self.p.denominator == 1 else f"x^({self.p})"


LINEAR = ConstraintFn(Fraction(1))


@dataclass(frozen=True)
class Line:
    pass


@dataclass(frozen=True)
class AffineInC:
    c: ConstraintFn = LINEAR


@dataclass(frozen=True)
class Monomial:
    pass


Family = Union[Line, AffineInC, Monomial]


@dataclass(frozen=True)
class TangentAt:
    x0: Number


@dataclass(frozen=True)
class Through:
    x1: Number


@dataclass(frozen=True)
class InterceptSum:
    n: int
    a: Fraction


Condition = Union[TangentAt, Through, InterceptSum]


def condition_str(c: Condition) -> str:
    if isinstance(c, TangentAt):
        return f"tangent_at({c.x0})"
    if isinstance(c, Through):
        return f"through({c.x1})"
    return f"intercept(n={c.n}, A={c.a})"


@dataclass(frozen=True)
class SolvedSurrogate:
    """g = k*c(x) + m (line and affine families) or g = k*x^m (monomial)."""

    kind: str  # line | affine | monomial
    k: Number
    m: Number
    c: ConstraintFn | None
    points: tuple
    residuals: tuple = ()
    notes: str = ""

    @property
    def alpha(self) -> Number:
        return self.m

    @property
    def beta(self) -> Number:
        return self.k

    @property
    def g(self) -> Expr:
        if self.kind == "monomial":
            base = X if self.m == 1 else Pow(X, Fraction(self.m))
            return base if self.k == 1 else Mul(Const(self.k), base)
        return affine_expr(self.k, self.m, self.c.expr())

    def __str__(self):
        return f"y = {to_str(self.g)}"


def affine_expr(k: Number, m: Number, c: Expr) -> Expr:
    if k == 0:
        return Const(as_number(m))
    term = c if k == 1 else Mul(Const(as_number(k)), c)
    if m == 0:
        return term
    if sign(m) < 0 and not isinstance(m, QuadExt):
        return Sub(term, Const(as_number(-m)))
    return Add(term, Const(as_number(m)))


def _value(f: Expr, v) -> Number:
    return eval_exact(f, v)


def _slope(f: Expr, v) -> Number:
    return eval_exact(diff(f), v)


def verify_conditions(f: Expr, g: Expr, conditions) -> tuple:
    """Exact residual check of every value/slope condition; raises on failure."""
    out = []
    dg = diff(g)
    df = diff(f)
    for cond in conditions:
        if isinstance(cond, TangentAt):
            ok = (eval_exact(f, cond.x0) == eval_exact(g, cond.x0)
                  and eval_exact(df, cond.x0) == eval_exact(dg, cond.x0))
        elif isinstance(cond, Through):
            ok = eval_exact(f, cond.x1) == eval_exact(g, cond.x1)
        else:
            continue
        if not ok:
            raise InconsistentConditions(f"{condition_str(cond)} fails for g = {to_str(g)}")
        out.append(condition_str(cond))
    return tuple(out)


def solve_line_tangent(f: Expr, x0) -> SolvedSurrogate:
    x0 = as_number(x0)
    fx, dfx = _value(f, x0), _slope(f, x0)
    alpha = as_number(fx - dfx * x0)
    s = SolvedSurrogate("line", as_number(dfx), alpha, LINEAR, (x0,))
    res = verify_conditions(f, s.g, [TangentAt(x0)])
    return SolvedSurrogate("line", s.k, s.m, LINEAR, (x0,), res,
                           f"tangent line at x0 = {x0}")


def _ratfunc(f: Expr) -> RatFunc:
    try:
        return to_ratfunc(f)
    except (NotRationalStructure, NoSingleRadicalDecomposition) as exc:
        raise NonAlgebraicCondition(f"intercept condition is not polynomial: {exc}") from None


def solve_intercept(f: Expr, n: int, a, domain: Domain) -> list[tuple[Number, SolvedSurrogate]]:
    """All exact x0 in the domain with n*(f(x0) - f'(x0)*x0) = A, increasing."""
    if n < 1:
        raise ValueError("n must be at least 1")
    a = Fraction(a)
    rf = _ratfunc(f)
    drf = _ratfunc(diff(f))
    cond = (rf - RatFunc(UniPoly([0, 1])) * drf) * n - a
    if cond.is_zero():
        raise NoSolutionInDomain("intercept condition holds identically; no point singled out")
    out = []
    for box in isolate_roots(cond.num, domain):
        x0 = box.exact
        if x0 is None or not domain.contains(x0) or cond.den(x0) == 0:
            continue
        s = solve_line_tangent(f, x0)
        assert n * (s.m) == a  # n*(f(x0) - f'(x0)*x0) is n*alpha
        out.append((x0, SolvedSurrogate(s.kind, s.k, s.m, s.c, s.points,
                                        s.residuals + (f"intercept(n={n}, A={a})",),
                                        f"x0 = {x0} from n*(f(x0)-f'(x0)*x0) = {a}")))
    if not out:
        raise NoSolutionInDomain(f"no exact x0 in {domain} with {n}*(f-x*f') = {a}")
    return out


def _affine_equations(f: Expr, c: ConstraintFn, conditions):
    # rows (coef_k, coef_m, rhs) of k*a + m*b = rhs
    dc = diff(c.expr())
    rows = []
    for cond in conditions:
        if isinstance(cond, TangentAt):
            x0 = as_number(cond.x0)
            rows.append((c(x0), Fraction(1), _value(f, x0)))
            rows.append((eval_exact(dc, x0), Fraction(0), _slope(f, x0)))
        elif isinstance(cond, Through):
            x1 = as_number(cond.x1)
            rows.append((c(x1), Fraction(1), _value(f, x1)))
        else:
            raise ValueError("intercept conditions are handled by solve_intercept")
    return rows


def solve_two_param(f: Expr, family: Family, conditions) -> SolvedSurrogate:
    conditions = list(conditions)
    points = tuple(as_number(getattr(c, "x0", getattr(c, "x1", None))) for c in conditions)
    if isinstance(family, Monomial):
        tangents = [c for c in conditions if isinstance(c, TangentAt)]
        if not tangents:
            raise SingularSystem("monomial family needs a tangency point")
        x0 = as_number(tangents[0].x0)
        fx, dfx = _value(f, x0), _slope(f, x0)
        if fx == 0 or sign(x0) <= 0:
            raise SingularSystem("monomial elimination needs f(x0) != 0 and x0 > 0")
        m = as_number(x0 * dfx / fx)
        if not isinstance(m, Fraction):
            raise SingularSystem(f"exponent {m} is irrational")
        k = as_number(fx / exact_pow(x0, m.numerator, m.denominator))
        s = SolvedSurrogate("monomial", k, m, None, points)
        res = verify_conditions(f, s.g, conditions)
        return SolvedSurrogate("monomial", k, m, None, points, res,
                               f"m = x0*f'(x0)/f(x0), k = f(x0)/x0^m at x0 = {x0}")
    c = LINEAR if isinstance(family, Line) else family.c
    kind = "line" if isinstance(family, Line) else "affine"
    rows = _affine_equations(f, c, conditions)
    if len(rows) < 2:
        raise SingularSystem("need two independent conditions")
    first = rows[0]
    for other in rows[1:]:
        det = first[0] * other[1] - first[1] * other[0]
        if det != 0:
            k = as_number((first[2] * other[1] - first[1] * other[2]) / det)
            m = as_number((first[0] * other[2] - first[2] * other[0]) / det)
            break
    else:
        raise SingularSystem("conditions do not determine k and m")
    s = SolvedSurrogate(kind, k, m, c, points)
    res = verify_conditions(f, s.g, conditions)
    return SolvedSurrogate(kind, k, m, c, points, res,
                           f"k, m from {len(rows)} linear conditions, all verified exactly")


# ----------------------------------------------------------------------------
# equal-slope system for weighted x/(s-x)

ENC = Precision(Fraction(1, 10 ** 45))


@dataclass(frozen=True)
class EqualSlopeSystem:
    weights: tuple
    s: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(Fraction(w) for w in self.weights))
        object.__setattr__(self, "s", Fraction(self.s))
        if len(self.weights) < 2:
            raise ValueError("equal-slope system needs n >= 2")
        if any(w <= 0 for w in self.weights):
            raise NonPositiveWeight("weights must be positive")
        if self.s <= 0:
            raise ValueError("s must be positive")

    @property
    def n(self) -> int:
        return len(self.weights)

    def function(self, i: int) -> Expr:
        w = self.weights[i]
        num = X if w == 1 else Mul(Const(w), X)
        return Div(num, Sub(Const(self.s), X))


@dataclass(frozen=True)
class EqualSlopeSolution:
    t: RatInterval
    points: tuple  # RatInterval per variable
    slope: RatInterval  # common derivative s/t^2
    exact_points: tuple | None
    t_text: str
    point_texts: tuple


def _sqrt_text(w: Fraction) -> str:
    r = exact_sqrt(w)
    if isinstance(r, Fraction):
        return str(r)
    return f"sqrt({w})"


def _sqrt_enc(w: Fraction) -> RatInterval:
    return quad_enclosure(as_number(exact_sqrt(w)), ENC)


def solve_equal_slopes(sys: EqualSlopeSystem) -> EqualSlopeSolution:
    """s - x_i = sqrt(c_i)*t with t = (n-1)*s / sum(sqrt(c_i))."""
    n, s = sys.n, sys.s
    roots = [exact_sqrt(w) for w in sys.weights]
    encs = [_sqrt_enc(w) for w in sys.weights]
    total = encs[0]
    for e in encs[1:]:
        total = total + e
    t = RatInterval.point((n - 1) * s) / total
    pts = tuple(RatInterval.point(s) - e * t for e in encs)
    slope = RatInterval.point(s) / (t * t)
    exact = None
    if all(isinstance(r, Fraction) for r in roots):
        te = (n - 1) * s / sum(roots)
        exact = tuple(s - r * te for r in roots)
        t = RatInterval.point(te)
        pts = tuple(RatInterval.point(x) for x in exact)
        slope = RatInterval.point(s / (te * te))
    texts = [_sqrt_text(w) for w in sys.weights]
    sum_text = "+".join(texts)
    t_text = f"{(n - 1) * s}/({sum_text})"
    point_texts = []
    for i, ti in enumerate(texts):
        others = "+".join(texts[:i] + texts[i + 1:])
        coef = n - 2
        num = others if coef == 0 else f"{others}-{ti}" if coef == 1 else f"{others}-{coef}*{ti}"
        if s != 1:
            num = f"{s}*({num})"
        point_texts.append(f"({num})/({sum_text})")
    return EqualSlopeSolution(t, pts, slope, exact, t_text, tuple(point_texts))


@dataclass(frozen=True)
class EqualSlopeBound:
    enclosure: RatInterval
    exact: Number | None
    closed_form: str

    def closed_form_expr(self) -> Expr:
        return parse(self.closed_form)


def bound_from_equal_slopes(sys: EqualSlopeSystem, sol: EqualSlopeSolution) -> EqualSlopeBound:
    total = RatInterval.point(0)
    sp = RatInterval.point(sys.s)
    for w, x in zip(sys.weights, sol.points):
        total = total + RatInterval.point(w) * x / (sp - x)
    exact = None
    if sol.exact_points is not None:
        exact = sum((w * x / (sys.s - x) for w, x in zip(sys.weights, sol.exact_points)),
                    Fraction(0))
        total = RatInterval.point(exact)
    texts = "+".join(_sqrt_text(w) for w in sys.weights)
    div = "" if sys.n == 2 else f"/{sys.n - 1}"
    closed = f"({texts})^2{div}-{sum(sys.weights)}"
    return EqualSlopeBound(total, exact, closed)


def equal_slope_tangents(sys: EqualSlopeSystem, sol: EqualSlopeSolution) -> list[tuple]:
    """(alpha, beta) enclosures of the tangent line to each f_i at x_i."""
    out = []
    sp = RatInterval.point(sys.s)
    for w, x in zip(sys.weights, sol.points):
        fx = RatInterval.point(w) * x / (sp - x)
        alpha = fx - sol.slope * x
        out.append((alpha, sol.slope))
    return out
