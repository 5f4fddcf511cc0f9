"""Exact scalars and rigorous rational intervals.

Rationals are :class:`fractions.Fraction`.  Real quadratic irrationals
``a + b*sqrt(d)`` are :class:`QuadExt`; arithmetic between two of them is only
defined when they share the radicand ``d``.  Intervals have rational
endpoints, so no hardware float ever enters a decision.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union


class NumericsError(ArithmeticError):
    pass


class DivisionByIntervalContainingZero(NumericsError):
    pass


class NegativeRadicand(NumericsError):
    pass


class ZeroToNegativePower(NumericsError):
    pass


class NotExactlyRepresentable(NumericsError):
    """The exact result would leave Q or the single active Q(sqrt d)."""


Rational = Fraction


def Q(x, y=1) -> Fraction:
    return Fraction(x, y)


# ----------------------------------------------------------------------------
# integer helpers


TRIAL_LIMIT = 1 << 16


def squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(s, d)`` with ``n == s*s*d`` and ``d`` square-free (``n > 0``).

    Trial division stops at ``TRIAL_LIMIT``.  A cofactor left over is settled
    only when it is a perfect square or below ``TRIAL_LIMIT**3`` (then it is a
    prime or a product of two distinct large primes); otherwise the split is
    reported as not exactly representable.
    """
    if n <= 0:
        raise ValueError("squarefree_split needs a positive integer")
    s, d = 1, 1
    p = 2
    while p * p <= n and p <= TRIAL_LIMIT:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            d *= p
        p += 1 if p == 2 else 2
    if n > 1 and p * p <= n:
        r = math.isqrt(n)
        if r * r == n:
            return s * r, d
        if n >= TRIAL_LIMIT ** 3:
            raise NotExactlyRepresentable(f"cannot decide square-freeness of a {n.bit_length()}-bit cofactor")
    return s, d * n


def is_squarefree(n: int) -> bool:
    try:
        return n >= 1 and squarefree_split(n)[0] == 1
    except NotExactlyRepresentable:
        return False


def iroot(n: int, q: int) -> int:
    """floor(n ** (1/q)) for ``n >= 0``."""
    if n < 0:
        raise ValueError("iroot of negative integer")
    if n < 2 or q == 1:
        return n
    if q == 2:
        return math.isqrt(n)
    x = 1 << ((n.bit_length() + q - 1) // q)
    while True:
        y = ((q - 1) * x + n // x ** (q - 1)) // q
        if y >= x:
            break
        x = y
    while x ** q > n:
        x -= 1
    while (x + 1) ** q <= n:
        x += 1
    return x


def rational_root(r: Fraction, q: int) -> Fraction | None:
    """Exact rational q-th root of ``r`` or ``None``.  Odd q accepts negatives."""
    if r < 0:
        if q % 2 == 0:
            raise NegativeRadicand(f"even root of {r}")
        s = rational_root(-r, q)
        return None if s is None else -s
    a, b = iroot(r.numerator, q), iroot(r.denominator, q)
    if a ** q == r.numerator and b ** q == r.denominator:
        return Fraction(a, b)
    return None


# ----------------------------------------------------------------------------
# Q(sqrt d)


@dataclass(frozen=True)
class QuadExt:
    """The real number ``a + b*sqrt(d)``."""

    a: Fraction
    b: Fraction
    d: int

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if not (isinstance(self.d, int) and self.d >= 2 and is_squarefree(self.d)):
            raise ValueError(f"radicand must be square-free and >= 2, got {self.d}")

    # arithmetic --------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if other.d != self.d:
                raise NotExactlyRepresentable(
                    f"mixed radicands sqrt({self.d}) and sqrt({other.d})")
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return make_quad(self.a + o[0], self.b + o[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return make_quad(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return make_quad(self.a - o[0], self.b - o[1], self.d)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return make_quad(o[0] - self.a, o[1] - self.b, self.d)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = o
        return make_quad(self.a * a + self.b * b * self.d, self.a * b + self.b * a, self.d)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def conjugate(self) -> QuadExt:
        return QuadExt(self.a, -self.b, self.d)

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt d)")
        return make_quad(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        other = make_quad(o[0], o[1], self.d)
        if isinstance(other, Fraction):
            if other == 0:
                raise ZeroDivisionError("division by zero in Q(sqrt d)")
            return make_quad(self.a / other, self.b / other, self.d)
        return self * other.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.inverse() * o[0]

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result: Number = Fraction(1)
        base: Number = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # comparisons -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, QuadExt):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d) or (
                self.b == 0 and other.b == 0 and self.a == other.a)
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __lt__(self, other):
        return sign(self - other) < 0

    def __le__(self, other):
        return sign(self - other) <= 0

    def __gt__(self, other):
        return sign(self - other) > 0

    def __ge__(self, other):
        return sign(self - other) >= 0

    def __repr__(self):
        return f"QuadExt({self.a}, {self.b}, {self.d})"

    def __str__(self):
        return f"{self.a}+{self.b}*sqrt({self.d})"


Number = Union[Fraction, QuadExt]


def make_quad(a, b, d: int) -> Number:
    """Build ``a + b*sqrt(d)``, demoting to a plain Fraction when ``b == 0``."""
    b = Fraction(b)
    if b == 0:
        return Fraction(a)
    return QuadExt(Fraction(a), b, d)


def quadext_sign(v: QuadExt) -> int:
    """Exact sign of ``a + b*sqrt(d)`` by comparing ``a^2`` with ``b^2*d``."""
    sa = (v.a > 0) - (v.a < 0)
    sb = (v.b > 0) - (v.b < 0)
    if sa >= 0 and sb >= 0:
        return 1 if (sa or sb) else 0
    if sa <= 0 and sb <= 0:
        return -1
    diff = v.a * v.a - v.b * v.b * v.d
    s = (diff > 0) - (diff < 0)
    return s if sa > 0 else -s


def sign(v) -> int:
    if isinstance(v, QuadExt):
        return quadext_sign(v)
    return (v > 0) - (v < 0)


def radicand(v) -> int | None:
    return v.d if isinstance(v, QuadExt) else None


def as_number(v) -> Number:
    if isinstance(v, QuadExt):
        return make_quad(v.a, v.b, v.d)
    if isinstance(v, (int, Fraction)):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"not an exact number: {v!r}")


def exact_sqrt(v: Number) -> Number:
    """Exact square root inside Q or a single Q(sqrt d)."""
    if sign(v) < 0:
        raise NegativeRadicand(f"sqrt of negative value {v}")
    if isinstance(v, QuadExt):
        if v.b == 0:
            return exact_sqrt(v.a)
        # (x + y sqrt d)^2 = v  <=>  x^2 + d y^2 = a, 2xy = b
        disc = rational_root(v.norm(), 2) if v.norm() >= 0 else None
        if disc is not None:
            for x2 in ((v.a + disc) / 2, (v.a - disc) / 2):
                if x2 <= 0:
                    continue
                x = rational_root(x2, 2)
                if x is None:
                    continue
                for cand in (make_quad(x, v.b / (2 * x), v.d), make_quad(-x, -v.b / (2 * x), v.d)):
                    if cand * cand == v and sign(cand) >= 0:
                        return cand
        # pure radical: (y sqrt d)^... only squares to rationals; nothing else fits
        raise NotExactlyRepresentable(f"sqrt({v}) not in Q(sqrt {v.d})")
    r = rational_root(v, 2)
    if r is not None:
        return r
    p, q = v.numerator, v.denominator
    s, d = squarefree_split(p * q)
    return QuadExt(Fraction(0), Fraction(s, q), d)


def exact_root(v: Number, q: int) -> Number:
    """Exact real q-th root for q in {1, 2, 3, 6}."""
    if q == 1:
        return v
    if q == 2:
        return exact_sqrt(v)
    if q == 6:
        return exact_sqrt(exact_root(v, 3))
    if q != 3:
        raise NotExactlyRepresentable(f"unsupported root index {q}")
    if isinstance(v, QuadExt):
        if v.b == 0:
            return exact_root(v.a, 3)
        if v.a == 0:
            # (y sqrt d)^3 = y^3 d sqrt d
            y = rational_root(v.b / v.d, 3)
            if y is not None:
                return QuadExt(Fraction(0), y, v.d)
        raise NotExactlyRepresentable(f"cbrt({v}) not in Q(sqrt {v.d})")
    r = rational_root(v, 3)
    if r is None:
        raise NotExactlyRepresentable(f"cbrt({v}) is irrational")
    return r


def exact_pow(v: Number, p: int, q: int) -> Number:
    if p < 0 and v == 0:
        raise ZeroToNegativePower("0 to a negative power")
    r = exact_root(v, q)
    if p < 0:
        return 1 / (r ** (-p))
    return r ** p


# ----------------------------------------------------------------------------
# intervals


@dataclass(frozen=True)
class Precision:
    epsilon: Fraction = Fraction(1, 10 ** 12)

    def __post_init__(self):
        object.__setattr__(self, "epsilon", Fraction(self.epsilon))
        if self.epsilon <= 0:
            raise ValueError("precision must be positive")

    @property
    def bits(self) -> int:
        """Binary digits needed to resolve epsilon."""
        return max(1, math.ceil(math.log2(1 / self.epsilon)) + 1)


DEFAULT_PRECISION = Precision()


@dataclass(frozen=True)
class RatInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, v) -> RatInterval:
        return cls(v, v)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, v) -> bool:
        if isinstance(v, RatInterval):
            return self.lo <= v.lo and v.hi <= self.hi
        return sign(v - self.lo) >= 0 and sign(self.hi - v) >= 0

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def __add__(self, other):
        other = _iv(other)
        return RatInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return RatInterval(-self.hi, -self.lo)

    def __sub__(self, other):
        other = _iv(other)
        return RatInterval(self.lo - other.hi, self.hi - other.lo)

    def __rsub__(self, other):
        return _iv(other) - self

    def __mul__(self, other):
        other = _iv(other)
        ps = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return RatInterval(min(ps), max(ps))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _iv(other)
        if other.lo <= 0 <= other.hi:
            raise DivisionByIntervalContainingZero(f"division by {other}")
        return self * RatInterval(1 / other.hi, 1 / other.lo)

    def __rtruediv__(self, other):
        return _iv(other) / self

    def __pow__(self, n: int):
        return interval_int_pow(self, n)

    def hull(self, other: RatInterval) -> RatInterval:
        return RatInterval(min(self.lo, other.lo), max(self.hi, other.hi))

    def __repr__(self):
        return f"[{self.lo}, {self.hi}]"


def _iv(v) -> RatInterval:
    if isinstance(v, RatInterval):
        return v
    if isinstance(v, QuadExt):
        return quad_enclosure(v, DEFAULT_PRECISION)
    return RatInterval.point(v)


def interval_arith(op: str, x: RatInterval, y: RatInterval) -> RatInterval:
    if op == "+":
        return x + y
    if op in ("-", "−"):
        return x - y
    if op in ("*", "×"):
        return x * y
    if op in ("/", "÷"):
        return x / y
    raise ValueError(f"unknown interval op {op!r}")


def interval_int_pow(x: RatInterval, n: int) -> RatInterval:
    if n < 0:
        if x.lo <= 0 <= x.hi:
            raise ZeroToNegativePower(f"{x} to negative power {n}")
        return RatInterval.point(1) / interval_int_pow(x, -n)
    if n == 0:
        return RatInterval.point(1)
    a, b = x.lo ** n, x.hi ** n
    if n % 2 == 1 or x.lo >= 0:
        return RatInterval(min(a, b), max(a, b))
    if x.hi <= 0:
        return RatInterval(b, a)
    return RatInterval(0, max(a, b))


def _floor_root(r: Fraction, q: int, k: int) -> Fraction:
    # largest s/2^k with (s/2^k)^q <= r, for r >= 0
    scaled = (r.numerator << (q * k)) // r.denominator
    return Fraction(iroot(scaled, q), 1 << k)


def _ceil_root(r: Fraction, q: int, k: int) -> Fraction:
    num = r.numerator << (q * k)
    scaled = -((-num) // r.denominator)
    s = iroot(scaled, q)
    if s ** q < scaled:
        s += 1
    return Fraction(s, 1 << k)


def _root_down(r: Fraction, q: int, k: int) -> Fraction:
    exact = rational_root(r, q)
    if exact is not None:
        return exact
    if r < 0:
        return -_root_up(-r, q, k)
    return _floor_root(r, q, k)


def _root_up(r: Fraction, q: int, k: int) -> Fraction:
    exact = rational_root(r, q)
    if exact is not None:
        return exact
    if r < 0:
        return -_root_down(-r, q, k)
    return _ceil_root(r, q, k)


def interval_root(x: RatInterval, q: int, prec: Precision = DEFAULT_PRECISION) -> RatInterval:
    """Enclose ``{t**(1/q) : t in x}``; endpoints are rounded outward."""
    if q < 1:
        raise ValueError("root index must be positive")
    if q == 1:
        return x
    if q % 2 == 0 and x.lo < 0:
        raise NegativeRadicand(f"even root of {x}")
    k = prec.bits + 1
    return RatInterval(_root_down(x.lo, q, k), _root_up(x.hi, q, k))


def interval_pow(x: RatInterval, p: int, q: int,
                 prec: Precision = DEFAULT_PRECISION) -> RatInterval:
    """Enclose ``x ** (p/q)``, using the real odd root for negative bases."""
    if q % 2 == 0 and x.lo < 0:
        raise NegativeRadicand(f"even root of {x}")
    if p < 0 and x.lo <= 0 <= x.hi:
        raise ZeroToNegativePower(f"{x} to negative power {p}/{q}")
    if q == 1:
        return interval_int_pow(x, p)
    if p == 0:
        return RatInterval.point(1)
    # tighten the root so that the power does not blow the width past epsilon
    coarse = interval_root(x, q, Precision(Fraction(1, 16)))
    big = max(abs(coarse.lo), abs(coarse.hi)) + 1
    if p > 0:
        gain = abs(p) * big ** (abs(p) - 1)
    else:
        small = min(abs(coarse.lo), abs(coarse.hi))
        if small == 0:
            small = _floor_root(min(abs(x.lo), abs(x.hi)), q, prec.bits + 8)
        gain = abs(p) / small ** (abs(p) + 1)
    inner = Precision(prec.epsilon / max(Fraction(1), Fraction(gain)))
    return interval_int_pow(interval_root(x, q, inner), p)


def quad_enclosure(v: Number, prec: Precision = DEFAULT_PRECISION) -> RatInterval:
    """Rational enclosure of an exact value."""
    if not isinstance(v, QuadExt):
        return RatInterval.point(v)
    if v.b == 0:
        return RatInterval.point(v.a)
    scale = abs(v.b)
    r = interval_root(RatInterval.point(v.d), 2, Precision(prec.epsilon / scale))
    return v.a + v.b * r


def round_outward(x: RatInterval, bits: int) -> RatInterval:
    """Snap endpoints outward onto the dyadic grid 2**-bits to keep sizes bounded."""
    lo, hi = x.lo, x.hi
    limit = bits + 8
    if lo.denominator.bit_length() > limit:
        lo = Fraction((lo.numerator << bits) // lo.denominator, 1 << bits)
    if hi.denominator.bit_length() > limit:
        hi = Fraction(-((-(hi.numerator << bits)) // hi.denominator), 1 << bits)
    return RatInterval(lo, hi)


def number_to_json(v: Number):
    if isinstance(v, QuadExt):
        return {"a": str(v.a), "b": str(v.b), "d": v.d}
    return str(Fraction(v))


def number_from_json(obj) -> Number:
    if isinstance(obj, dict):
        if set(obj) != {"a", "b", "d"}:
            raise ValueError(f"bad QuadExt object {obj!r}")
        return QuadExt(Fraction(obj["a"]), Fraction(obj["b"]), int(obj["d"]))
    if not isinstance(obj, str):
        raise ValueError(f"rationals are serialized as strings, got {obj!r}")
    return Fraction(obj)


def to_decimal_str(v: Fraction, digits: int = 20) -> str:
    """Fixed-point rendering with ``digits`` decimals, rounded half away from zero."""
    scaled = v * 10 ** digits
    n = int(abs(scaled) + Fraction(1, 2))
    s = "-" if scaled < 0 and n else ""
    whole, frac = divmod(n, 10 ** digits)
    text = f"{s}{whole}.{frac:0{digits}d}".rstrip("0")
    return text + "0" if text.endswith(".") else text
