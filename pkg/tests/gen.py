"""Seeded random generators and brute-force oracles shared by the tests."""
from __future__ import annotations

import random
from fractions import Fraction

from tangentcert.expr import Add, Const, Div, Mul, Neg, Pow, Sub, X
from tangentcert.numerics import QuadExt
from tangentcert.poly import UniPoly

SMALL = [Fraction(n, d) for n in range(-5, 6) for d in (1, 2, 3) if n or d == 1]
EXPONENTS = [Fraction(n) for n in (-2, -1, 2, 3, 4)] + [Fraction(1, 2), Fraction(1, 3), Fraction(3, 2),
                                                      Fraction(-1, 2), Fraction(2, 3)]


def rand_rational(rng: random.Random, lo: int = -4, hi: int = 4, den: int = 12) -> Fraction:
    d = rng.randint(1, den)
    return Fraction(rng.randint(lo * d, hi * d), d)


def rand_const(rng: random.Random, quad: bool = True) -> Const:
    if quad and rng.random() < 0.15:
        return Const(QuadExt(rng.choice(SMALL), rng.choice([Fraction(1), Fraction(-1), Fraction(1, 2)]), 2))
    return Const(rng.choice(SMALL))


def rand_expr(rng: random.Random, depth: int = 3, quad: bool = True, radicals: bool = True):
    """Random tree over x; fractional powers only when ``radicals``."""
    if depth == 0 or rng.random() < 0.25:
        return X if rng.random() < 0.6 else rand_const(rng, quad)
    op = rng.choice("+-*/^n")
    if op == "n":
        return Neg(rand_expr(rng, depth - 1, quad, radicals))
    if op == "^":
        exps = EXPONENTS if radicals else [e for e in EXPONENTS if e.denominator == 1]
        return Pow(rand_expr(rng, depth - 1, quad, radicals), rng.choice(exps))
    a = rand_expr(rng, depth - 1, quad, radicals)
    b = rand_expr(rng, depth - 1, quad, radicals)
    return {"+": Add, "-": Sub, "*": Mul, "/": Div}[op](a, b)


def rand_poly(rng: random.Random, max_deg: int = 8) -> UniPoly:
    deg = rng.randint(0, max_deg)
    cs = [Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(deg + 1)]
    if cs[-1] == 0:
        cs[-1] = Fraction(1)
    return UniPoly(cs)


def planted_poly(rng: random.Random, max_deg: int = 8) -> tuple[UniPoly, list[tuple[Fraction, int]]]:
    """A polynomial with known rational roots times a factor without real roots."""
    p = UniPoly([Fraction(rng.choice([-3, -1, 1, 2, 5]), rng.randint(1, 3))])
    roots: list[tuple[Fraction, int]] = []
    while p.degree < max_deg and rng.random() < 0.8:
        if rng.random() < 0.25 and p.degree + 2 <= max_deg:
            a, b = rand_rational(rng, -3, 3, 5), Fraction(rng.randint(1, 20), rng.randint(1, 10))
            p = p * UniPoly([a * a + b, -2 * a, 1])
            continue
        r = rand_rational(rng, -4, 4, 7)
        if any(r == s for s, _ in roots):
            continue
        m = rng.choice([1, 1, 1, 2, 2, 3])
        if p.degree + m > max_deg:
            m = max_deg - p.degree
        p = p * UniPoly([-r, 1]) ** m
        roots.append((r, m))
    return p, roots


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def grid_root_count(p: UniPoly, lo: Fraction, hi: Fraction, start: int = 64, cap: int = 1 << 13) -> int:
    """Distinct roots of ``p`` in the open interval (lo, hi) by sign scanning.

    Scans the square-free part on a uniform grid, counting exact zeros at
    grid nodes plus sign changes between nodes, doubling the grid until two
    successive counts agree.
    """
    from tangentcert.poly import square_free_part

    s = square_free_part(p) if p.degree > 0 else p
    # integer coefficients for fast Horner evaluation
    den = 1
    for c in s.coeffs:
        den = den * c.denominator // _gcd(den, c.denominator)
    ints = [int(c * den) for c in s.coeffs]

    def count(n: int) -> int:
        step = (hi - lo) / n
        signs = []
        for i in range(n + 1):
            x = lo + step * i
            signs.append(_eval_sign(ints, x.numerator, x.denominator))
        # endpoints only anchor sign changes; a zero there is outside the open interval
        zeros = sum(1 for z in signs[1:-1] if z == 0)
        return zeros + sum(1 for a, b in zip(signs, signs[1:]) if a * b < 0)

    prev, n = None, start
    while n <= cap:
        c = count(n)
        if c == prev:
            return c
        prev, n = c, n * 2
    return prev


def _eval_sign(ints: list[int], num: int, d: int) -> int:
    """Sign of sum c_i (num/d)^i via Horner on the d^deg-scaled integer."""
    acc = 0
    for i, c in enumerate(reversed(ints)):
        acc = acc * num + c * d ** i
    return _sign(acc)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a
