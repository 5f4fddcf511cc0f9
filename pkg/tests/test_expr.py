import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gen import rand_expr, rand_rational
from tangentcert.expr import (
    X, Add, Const, Domain, DomainError, DomainViolation, ExprSyntaxError, Mul, Pow, UnsupportedExponent, diff,
    eval_exact, eval_interval, has_var, parse, parse_domain, substitute, to_str,
)
from tangentcert.numerics import NotExactlyRepresentable, NumericsError, Precision, QuadExt, RatInterval

seeds = st.integers(0, 2 ** 32 - 1)
FINE = Precision(Fraction(1, 10 ** 30))


def _value(e, p):
    try:
        return eval_exact(e, p)
    except (DomainError, NotExactlyRepresentable, NumericsError, ArithmeticError):
        return None


# parsing and printing -------------------------------------------------------


@pytest.mark.parametrize("text,point,value", [
    ("(1-x)/x-2*sqrt(2*(1-x)/x)", Fraction(1, 3), Fraction(-2)),
    ("x^(2/3)", Fraction(8), Fraction(4)),
    ("x^2-x^(4/3)", Fraction(1), Fraction(0)),
    ("1/3*x", Fraction(3), Fraction(1)),
    ("-x^2", Fraction(3), Fraction(-9)),
    ("2^-1", None, None),
    ("sqrt2*x", Fraction(1), QuadExt(0, 1, 2)),
    ("(sqrt(3)+2+sqrt(5))^2", None, None),
    ("cbrt(x)", Fraction(-27), Fraction(-3)),
    ("x/sqrt(4-x^2)", Fraction(0), Fraction(0)),
])
def test_parse_examples(text, point, value):
    try:
        e = parse(text)
    except ExprSyntaxError:
        assert value is None
        return
    if point is not None:
        assert eval_exact(e, point) == value


def test_precedence_and_unary_minus():
    assert eval_exact(parse("-x^2"), 2) == -4
    assert eval_exact(parse("2*x^3/4"), 2) == 4
    assert eval_exact(parse("1-x-x"), 1) == -1
    assert eval_exact(parse("8/2/2"), 0) == 2


@pytest.mark.parametrize("text,pos", [
    ("x+", 2),
    ("(x", 2),
    ("0.5*x", 0),
    ("x $ 1", 2),
    ("y+1", 0),
    ("x)", 1),
])
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(ExprSyntaxError) as err:
        parse(text)
    assert err.value.pos == pos


def test_unsupported_exponent():
    with pytest.raises((UnsupportedExponent, ExprSyntaxError)):
        parse("x^(1/4)")


@given(seeds)
def test_print_parse_round_trip(seed):
    rng = random.Random(seed)
    e = rand_expr(rng, depth=4)
    text = to_str(e)
    back = parse(text)
    assert to_str(back) == text
    for _ in range(3):
        p = rand_rational(rng, -3, 3)
        assert _value(back, p) == _value(e, p)


def test_printer_is_stable_on_quad_literals():
    e = Add(Const(QuadExt(1, 1, 2)), Mul(Const(QuadExt(0, -1, 3)), X))
    assert to_str(parse(to_str(e))) == to_str(e)


# derivatives ----------------------------------------------------------------


@pytest.mark.parametrize("text,point,slope", [
    ("x^3", Fraction(2), Fraction(12)),
    ("x/(4-x)+(4-x)/x", Fraction(1), Fraction(-32, 9)),
    ("x+1/(x+1)", Fraction(1), Fraction(3, 4)),
    ("x^(2/3)", Fraction(8), Fraction(1, 3)),
    ("sqrt(x)", Fraction(4), Fraction(1, 4)),
])
def test_diff_known_slopes(text, point, slope):
    assert eval_exact(diff(parse(text)), point) == slope


@given(seeds)
def test_diff_matches_central_difference(seed):
    rng = random.Random(seed)
    e = rand_expr(rng, depth=3)
    x0 = rand_rational(rng, 0, 3, 16)
    h = Fraction(1, 10 ** 6)
    try:
        eval_interval(e, RatInterval(x0 - Fraction(1, 10), x0 + Fraction(1, 10)))
        d = eval_interval(diff(e), RatInterval.point(x0), FINE).mid
        fp = eval_interval(e, RatInterval.point(x0 + h), FINE).mid
        fm = eval_interval(e, RatInterval.point(x0 - h), FINE).mid
    except (DomainViolation, DomainError, NumericsError):
        return
    if abs(fp) > 10 ** 4:
        return
    assert abs((fp - fm) / (2 * h) - d) <= Fraction(1, 10 ** 4) * max(1, abs(d))


def test_diff_of_constant_is_zero():
    assert not has_var(diff(Const(Fraction(3))))
    assert eval_exact(diff(Const(QuadExt(1, 1, 2))), 5) == 0


# evaluation -----------------------------------------------------------------


@given(seeds)
def test_interval_encloses_exact(seed):
    rng = random.Random(seed)
    e = rand_expr(rng, depth=4)
    p = rand_rational(rng, -3, 3)
    v = _value(e, p)
    if v is None:
        return
    assert eval_interval(e, RatInterval.point(p)).contains(v)


@given(seeds)
def test_interval_encloses_over_a_box(seed):
    rng = random.Random(seed)
    e = rand_expr(rng, depth=3, radicals=False)
    lo = rand_rational(rng, -3, 3)
    box = RatInterval(lo, lo + Fraction(1, rng.randint(1, 20)))
    try:
        enc = eval_interval(e, box)
    except (DomainViolation, NumericsError):
        return
    for t in (box.lo, box.mid, box.hi):
        v = _value(e, t)
        if v is not None:
            assert enc.contains(v)


def test_domain_errors():
    with pytest.raises(DomainError):
        eval_exact(parse("1/x"), 0)
    with pytest.raises(DomainError):
        eval_exact(parse("sqrt(x)"), -1)
    with pytest.raises(DomainViolation):
        eval_interval(parse("1/x"), RatInterval(-1, 1))
    with pytest.raises(DomainViolation):
        eval_interval(parse("sqrt(x)"), RatInterval(-1, 1))


def test_defined_point_mode_clips_even_root():
    e = parse("sqrt(x-x)")
    iv = RatInterval(Fraction(1), Fraction(2))
    with pytest.raises(DomainViolation):
        eval_interval(e, iv)
    assert eval_interval(e, iv, defined=True).contains(0)


def test_substitute():
    e = substitute(parse("x^2+1"), parse("x^3"))
    assert eval_exact(e, 2) == 65


# domains --------------------------------------------------------------------


def test_parse_domain():
    d = parse_domain("(0, 3*sqrt(3))")
    assert d.lo == 0 and d.lo_open and d.hi == QuadExt(0, 3, 3) and d.hi_open
    d = parse_domain("[-1, inf)")
    assert d.lo == -1 and not d.lo_open and d.hi is None
    assert d.contains(-1) and not parse_domain("(-1, 1]").contains(-1)
    assert str(parse_domain("[0, 2)")) == "[0, 2)"


@pytest.mark.parametrize("text", ["0, 1", "(0 1)", "(1, 0)", "(x, 1)", "(0, 1, 2)"])
def test_bad_domains(text):
    with pytest.raises((ExprSyntaxError, ValueError)):
        parse_domain(text)


def test_domain_requires_order():
    with pytest.raises(ValueError):
        Domain(Fraction(1), Fraction(1))


def test_pow_node_keeps_exponent():
    e = parse("x^(3/2)")
    assert isinstance(e, Pow) and e.exponent == Fraction(3, 2)
