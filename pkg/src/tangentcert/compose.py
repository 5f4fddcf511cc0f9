"""Lifting a pointwise bound f >= g to the n-variable statement.

The sum case telescopes through the constraint; the product case multiplies
monomial bounds; the pairwise-sum case goes through a Hölder step that is
taken as an axiom and spot-checked.  Equality is decided exactly from the
certified zero sets.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .certify import Certificate, Claim, Verdict, certify
from .expr import Domain, DomainError, Expr, Sub, eval_exact, eval_interval, to_str
from .numerics import (
    NotExactlyRepresentable, Number, NumericsError, Precision, RatInterval, as_number, exact_pow,
    quad_enclosure, sign,
)
from .poly import MultiPoly, expand_equal
from .surrogate import ConstraintFn, LINEAR, SolvedSurrogate


class MixedConstraintFunctions(ValueError):
    pass


class SlopeMismatch(ValueError):
    pass


class NonpositiveLeadingCoefficient(ValueError):
    pass


class NonpositiveExponent(ValueError):
    pass


class SideConditionFailed(ValueError):
    pass


class WitnessViolatesConstraint(ValueError):
    pass


class ZeroSetNotExact(ValueError):
    pass


@dataclass(frozen=True)
class SumOfC:
    c: ConstraintFn
    total: Fraction


@dataclass(frozen=True)
class ProductAtLeast:
    bound: Fraction = Fraction(1)


@dataclass(frozen=True)
class PairwiseSum:
    """x1*x2 + x1*x3 + ... = total; enters only through classical steps."""

    total: Fraction


@dataclass(frozen=True)
class FreeIntercept:
    """No constraint; the claim is sum f(x_i) >= a + k * sum x_i with k the reported bound."""

    a: Fraction


Constraint = Union[SumOfC, ProductAtLeast, PairwiseSum, FreeIntercept]


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    n: int
    functions: tuple  # Expr, length 1 or n
    domain: Domain
    constraint: Constraint
    bound: Expr | None = None
    direction: str = "ge"
    notes: str = ""

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("need at least two variables")
        if len(self.functions) not in (1, self.n):
            raise ValueError("functions must have length 1 or n")
        if self.direction not in ("ge", "gt"):
            raise ValueError("direction must be ge or gt")

    def f(self, i: int) -> Expr:
        return self.functions[0] if len(self.functions) == 1 else self.functions[i]

    @property
    def combine(self) -> str:
        return "product" if isinstance(self.constraint, (ProductAtLeast, PairwiseSum)) else "sum"


@dataclass(frozen=True)
class ClassicalStep:
    name: str
    statement: str
    checks: int
    passed: bool


@dataclass(frozen=True)
class ComposedVerdict:
    bound: Number | RatInterval
    strict: bool | None = None
    witnesses: tuple = ()
    classical_steps: tuple = ()
    explanation: str = ""


# ----------------------------------------------------------------------------
# constraint and objective evaluation


def satisfies(spec: ProblemSpec, xs) -> bool:
    if len(xs) != spec.n or not all(spec.domain.contains(x) for x in xs):
        return False
    c = spec.constraint
    if isinstance(c, SumOfC):
        return sum((c.c(x) for x in xs), Fraction(0)) == c.total
    if isinstance(c, ProductAtLeast):
        p = Fraction(1)
        for x in xs:
            p = p * x
        return sign(as_number(p - c.bound)) >= 0
    if isinstance(c, PairwiseSum):
        s = sum((a * b for a, b in itertools.combinations(xs, 2)), Fraction(0))
        return as_number(s) == c.total
    return True


def objective(spec: ProblemSpec, xs) -> Number:
    vals = [eval_exact(spec.f(i), x) for i, x in enumerate(xs)]
    if spec.combine == "product":
        out = Fraction(1)
        for v in vals:
            out = out * v
        return as_number(out)
    return as_number(sum(vals, Fraction(0)))


# ----------------------------------------------------------------------------
# composition


def compose_sum(surrogates: list[SolvedSurrogate], spec: ProblemSpec) -> ComposedVerdict:
    con = spec.constraint
    if not isinstance(con, SumOfC):
        raise MixedConstraintFunctions("compose_sum needs a sum constraint")
    if len(surrogates) not in (1, spec.n):
        raise ValueError("one surrogate per function")
    k = surrogates[0].k
    for s in surrogates:
        if s.kind == "monomial" or (s.c or LINEAR) != con.c:
            raise MixedConstraintFunctions(f"surrogate in {s.c}, constraint in {con.c}")
        if s.k != k:
            raise SlopeMismatch(f"slopes {k} and {s.k} differ")
    ms = [s.m for s in surrogates] * (spec.n if len(surrogates) == 1 else 1)
    bound = as_number(sum(ms, Fraction(0)) + k * con.total)
    return ComposedVerdict(bound, explanation=(
        f"sum f(x_i) >= sum (k*c(x_i) + m_i) = {k}*{con.total} + {as_number(sum(ms, Fraction(0)))}"))


def compose_intercept(surrogate: SolvedSurrogate, spec: ProblemSpec) -> ComposedVerdict:
    con = spec.constraint
    if not isinstance(con, FreeIntercept) or surrogate.kind != "line":
        raise MixedConstraintFunctions("intercept composition needs a line and a free constraint")
    if spec.n * surrogate.m != con.a:
        raise SlopeMismatch(f"n*alpha = {spec.n * surrogate.m} differs from A = {con.a}")
    return ComposedVerdict(surrogate.k, explanation=(
        f"sum f(x_i) >= n*alpha + beta*sum x_i = {con.a} + {surrogate.k}*sum x_i"))


def _rng(seed: int = 0) -> random.Random:
    return random.Random(seed)


def _interval_value(e: Expr, x) -> RatInterval:
    p = Precision(Fraction(1, 10 ** 25))
    return eval_interval(e, quad_enclosure(as_number(x), p), p)


def compose_product(surrogate: SolvedSurrogate, spec: ProblemSpec, checks: int = 100) -> ComposedVerdict:
    con = spec.constraint
    if not isinstance(con, ProductAtLeast) or surrogate.kind != "monomial":
        raise MixedConstraintFunctions("product composition needs a monomial and a product constraint")
    k, m = surrogate.k, surrogate.m
    if sign(k) <= 0:
        raise NonpositiveLeadingCoefficient(f"k = {k}")
    if sign(m) <= 0:
        raise NonpositiveExponent(f"m = {m}")
    verdict, _ = certify(Claim(surrogate.g, spec.domain))
    if not verdict.proved:
        raise SideConditionFailed(f"surrogate {to_str(surrogate.g)} >= 0 fails on {spec.domain}: {verdict}")
    if con.bound != 1:
        raise ValueError("product composition implemented for prod x_i >= 1")
    bound = as_number(k ** spec.n)
    # spot check: prod f(x_i) >= k^n at points with prod x_i >= 1
    rng = _rng(spec.n)
    ok = True
    for _ in range(checks):
        xs = [Fraction(rng.randint(1, 400), rng.randint(1, 100)) for _ in range(spec.n - 1)]
        prod = Fraction(1)
        for x in xs:
            prod *= x
        xs.append(max(Fraction(1) / prod, Fraction(1, 10 ** 6)) * Fraction(rng.randint(100, 300), 100))
        val = RatInterval.point(1)
        for i, x in enumerate(xs):
            val = val * _interval_value(spec.f(i), x)
        ok = ok and val.hi >= bound
    step = ClassicalStep("AM-GM product step",
                         f"(x_1*...*x_{spec.n})^{m} >= 1 when x_1*...*x_{spec.n} >= 1 and {m} > 0; "
                         f"needs f >= {to_str(surrogate.g)} >= 0 on the domain", checks, ok)
    return ComposedVerdict(bound, classical_steps=(step,), explanation=(
        f"prod f(x_i) >= {k}^{spec.n} * (prod x_i)^{m} >= {bound}"))


@dataclass(frozen=True)
class ChainResult:
    verdicts: tuple
    certificates: tuple
    claims: tuple
    proved: bool
    witness: Fraction | None = None

    @property
    def zero_sets(self) -> tuple:
        return tuple(None if c is None else c.zeros for c in self.certificates)


def chain_compose(chain: list[Expr], domain: Domain, strategy: str = "auto") -> ChainResult:
    """Certify chain[i] - chain[i+1] >= 0 for every adjacent pair."""
    verdicts, certs, claims = [], [], []
    witness = None
    for a, b in zip(chain, chain[1:]):
        claim = Claim(Sub(a, b), domain)
        v, c = certify(claim, strategy)
        verdicts.append(v)
        certs.append(c)
        claims.append(claim)
        if v.status == "disproved" and witness is None:
            witness = v.witness
    proved = all(v.proved for v in verdicts)
    return ChainResult(tuple(verdicts), tuple(certs), tuple(claims), proved, witness)


def _sum_of_squares_identity() -> bool:
    a, b, c = (MultiPoly.var(i, 3) for i in range(3))
    lhs = (a - b) * (a - b) + (b - c) * (b - c) + (c - a) * (c - a)
    s = a + b + c
    rhs = (s * s - (a * b + b * c + c * a) * 3) * 2
    return expand_equal(lhs, rhs)


def _pairwise_points(total: Fraction, count: int, seed: int = 7):
    rng = _rng(seed)
    out = []
    while len(out) < count:
        a = Fraction(rng.randint(1, 300), 100)
        b = Fraction(rng.randint(1, 300), 100)
        if a * b >= total:
            continue
        c = (total - a * b) / (a + b)
        out.append((a, b, c))
    return out


def compose_holder(surrogate: SolvedSurrogate, spec: ProblemSpec, checks: int = 100) -> ComposedVerdict:
    """prod (x_i^3 + 2) >= (x_1+x_2+x_3)^3 >= (3*T)^(3/2) under sum_{i<j} x_i x_j = T."""
    con = spec.constraint
    if not isinstance(con, PairwiseSum) or spec.n != 3:
        raise MixedConstraintFunctions("Hölder composition implemented for three variables")
    if surrogate.kind != "affine" or surrogate.c != ConstraintFn(3) or surrogate.k != 1 \
            or surrogate.m != 2:
        raise MixedConstraintFunctions(f"Hölder step needs g = x^3 + 2, got {to_str(surrogate.g)}")
    pts = _pairwise_points(con.total, checks)
    holder_ok = all((a ** 3 + 2) * (b ** 3 + 2) * (c ** 3 + 2) >= (a + b + c) ** 3 for a, b, c in pts)
    square_ok = all((a + b + c) ** 2 >= 3 * con.total for a, b, c in pts)
    ident = _sum_of_squares_identity()
    bound = as_number(exact_pow(3 * con.total, 3, 2))
    steps = (
        ClassicalStep("Hölder", "(a^3+1+1)(1+b^3+1)(1+1+c^3) >= (a+b+c)^3", checks, holder_ok),
        ClassicalStep("sum of squares",
                      "(a-b)^2+(b-c)^2+(c-a)^2 = 2((a+b+c)^2-3(ab+bc+ca)) >= 0, so "
                      f"a+b+c >= sqrt(3*{con.total})", checks, square_ok and ident),
    )
    return ComposedVerdict(bound, classical_steps=steps, explanation=(
        f"prod f_i(x_i) >= prod (x_i^3+2) >= (x_1+x_2+x_3)^3 >= {bound}"))


# ----------------------------------------------------------------------------
# equality and optimality


def strictness_analysis(zero_sets, spec: ProblemSpec, bound=None, cap: int = 10 ** 5) -> ComposedVerdict:
    """Enumerate assignments of certified zeros; equality needs the constraint and the bound."""
    if not isinstance(zero_sets[0], (list, tuple)) and zero_sets[0] is not None:
        zero_sets = [zero_sets]
    if any(z is None for z in zero_sets):
        raise ZeroSetNotExact("zero set not exact")
    sets = [sorted(z, key=lambda v: quad_enclosure(as_number(v)).mid) for z in zero_sets]
    if len(sets) == 1:
        sets = sets * spec.n
    total = 1
    for s in sets:
        total *= len(s)
    if total > cap:
        return ComposedVerdict(bound, None, (), (), f"{total} assignments exceed the cap {cap}")
    witnesses = []
    for xs in itertools.product(*sets):
        if not satisfies(spec, xs):
            continue
        if bound is not None and isinstance(spec.constraint, FreeIntercept):
            lhs = objective(spec, xs) - spec.constraint.a
            if lhs != as_number(bound * sum(xs, Fraction(0))):
                continue
        elif bound is not None:
            try:
                if objective(spec, xs) != bound:
                    continue
            except (NotExactlyRepresentable, DomainError, NumericsError):
                continue
        witnesses.append(tuple(xs))
    strict = not witnesses
    if strict:
        expl = f"no assignment from zero sets {[list(map(str, s)) for s in sets]} meets the constraint"
    else:
        expl = f"equality at ({', '.join(map(str, witnesses[0]))})"
    return ComposedVerdict(bound, strict, tuple(witnesses), (), expl)


@dataclass(frozen=True)
class OptimalityReport:
    lhs: Number
    rhs: Number
    margin: Number
    status: str  # equality | holds | violated


def check_optimality(spec: ProblemSpec, witness, parameter) -> OptimalityReport:
    xs = tuple(as_number(x) for x in witness)
    if not satisfies(spec, xs):
        raise WitnessViolatesConstraint(f"{xs} does not satisfy the constraint of {spec.name}")
    parameter = as_number(parameter)
    obj = objective(spec, xs)
    if isinstance(spec.constraint, FreeIntercept):
        lhs = as_number(obj - spec.constraint.a)
        rhs = as_number(parameter * sum(xs, Fraction(0)))
    else:
        lhs, rhs = obj, parameter
    margin = as_number(lhs - rhs)
    s = sign(margin)
    return OptimalityReport(lhs, rhs, margin, "equality" if s == 0 else "holds" if s > 0 else "violated")
