"""Exact univariate polynomials over Q or Q(sqrt d), Sturm root counting,
square-free decomposition and a nonnegativity decision on intervals.
A small sparse multivariate type covers identity checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import zip_longest

from .expr import Domain
from .numerics import (
    DEFAULT_PRECISION, NotExactlyRepresentable, Number, Precision, QuadExt, RatInterval, as_number, quad_enclosure,
    radicand, sign,
)


class DomainMismatch(ValueError):
    pass


class DivisionByZeroPoly(ZeroDivisionError):
    pass


class EndpointNotRepresentable(ValueError):
    pass


def _norm(v) -> Number:
    return as_number(v)


class UniPoly:
    """Dense polynomial; ``coeffs[i]`` multiplies ``x**i``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [_norm(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        d = None
        for c in cs:
            r = radicand(c)
            if r is not None:
                if d is not None and d != r:
                    raise DomainMismatch(f"coefficients from Q(sqrt {d}) and Q(sqrt {r})")
                d = r
        self.coeffs: tuple = tuple(cs)

    # constructors -------------------------------------------------------
    @classmethod
    def x(cls) -> UniPoly:
        return cls([0, 1])

    @classmethod
    def const(cls, c) -> UniPoly:
        return cls([c])

    @classmethod
    def from_roots(cls, roots) -> UniPoly:
        p = cls([1])
        for r in roots:
            p = p * cls([-as_number(r), 1])
        return p

    # basic properties -----------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Number:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    @property
    def domain(self) -> int | None:
        """Radicand of the coefficient field, or None for Q."""
        for c in self.coeffs:
            if isinstance(c, QuadExt):
                return c.d
        return None

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction, QuadExt)):
            return self == UniPoly([other])
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"UniPoly({list(map(str, self.coeffs))})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            cs = f"({c})" if isinstance(c, QuadExt) or (c < 0 if not isinstance(c, QuadExt) else False) else str(c)
            if mono and c == 1:
                parts.append(mono)
            else:
                parts.append(cs + ("*" + mono if mono else ""))
        return " + ".join(parts)

    # arithmetic ------------------------------------------------------------
    def _lift(self, other) -> UniPoly:
        return other if isinstance(other, UniPoly) else UniPoly([other])

    def __add__(self, other):
        other = self._lift(other)
        return UniPoly([a + b for a, b in zip_longest(self.coeffs, other.coeffs, fillvalue=Fraction(0))])

    __radd__ = __add__

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        if not self.coeffs or not other.coeffs:
            return UniPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return UniPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = UniPoly([1])
        for _ in range(n):
            result = result * self
        return result

    def divrem(self, other: UniPoly) -> tuple[UniPoly, UniPoly]:
        if not other.coeffs:
            raise DivisionByZeroPoly("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return UniPoly(), self
        quot = [Fraction(0)] * (dq + 1)
        lc = other.lc
        for k in range(dq, -1, -1):
            c = _norm(rem[k + other.degree] / lc)
            quot[k] = c
            if c == 0:
                continue
            for j, b in enumerate(other.coeffs):
                rem[k + j] = rem[k + j] - c * b
        return UniPoly(quot), UniPoly(rem[: other.degree])

    def __floordiv__(self, other):
        return self.divrem(self._lift(other))[0]

    def __mod__(self, other):
        return self.divrem(self._lift(other))[1]

    def scale(self, c) -> UniPoly:
        return UniPoly([a * c for a in self.coeffs])

    def monic(self) -> UniPoly:
        if not self.coeffs:
            return self
        return self.scale(1 / self.lc)

    def deriv(self) -> UniPoly:
        return UniPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def __call__(self, v) -> Number:
        acc: Number = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * v + c
        return _norm(acc)

    def eval_interval(self, x: RatInterval) -> RatInterval:
        acc = RatInterval.point(0)
        for c in reversed(self.coeffs):
            acc = acc * x + quad_enclosure(c, DEFAULT_PRECISION)
        return acc

    def compose_power(self, q: int) -> UniPoly:
        """p(t**q)."""
        out = [Fraction(0)] * (q * self.degree + 1) if self.coeffs else []
        for i, c in enumerate(self.coeffs):
            out[i * q] = c
        return UniPoly(out)


def poly_arith(op: str, p: UniPoly, q: UniPoly):
    if p.domain is not None and q.domain is not None and p.domain != q.domain:
        raise DomainMismatch("polynomials over different quadratic fields")
    if op == "+":
        return p + q
    if op in ("-", "−"):
        return p - q
    if op in ("*", "×"):
        return p * q
    if op == "divrem":
        return p.divrem(q)
    raise ValueError(f"unknown polynomial op {op!r}")


def gcd(p: UniPoly, q: UniPoly) -> UniPoly:
    """Monic gcd by the Euclidean algorithm."""
    if not p and not q:
        raise ValueError("gcd(0, 0) is undefined")
    a, b = p, q
    while b:
        a, b = b, a.divrem(b)[1]
    return a.monic()


@dataclass(frozen=True)
class SqfDecomp:
    unit: Number
    factors: tuple  # of (UniPoly monic square-free, multiplicity)

    def reconstruct(self) -> UniPoly:
        p = UniPoly([self.unit])
        for f, m in self.factors:
            p = p * f ** m
        return p


def square_free_decompose(p: UniPoly) -> SqfDecomp:
    """Yun's algorithm; factors are monic, pairwise coprime, square-free."""
    if not p:
        raise ValueError("square-free decomposition of the zero polynomial")
    unit = p.lc
    if p.degree == 0:
        return SqfDecomp(unit, ())
    f = p.monic()
    df = f.deriv()
    a = gcd(f, df)
    b = f // a
    c = df // a
    d = c - b.deriv()
    out = []
    i = 1
    while b.degree > 0:
        a = gcd(b, d)
        if a.degree > 0:
            out.append((a, i))
        b = b // a
        c = d // a
        d = c - b.deriv()
        i += 1
    out = [(g, m) for f, m in out for g in split_rational_linear(f)]
    out.sort(key=lambda fm: (fm[1], fm[0].degree, [str(c) for c in fm[0].coeffs]))
    return SqfDecomp(unit, tuple(out))


def _divisors(n: int, limit: int = 10 ** 10) -> list[int] | None:
    n = abs(n)
    if n > limit:
        return None
    small, large = [], []
    k = 1
    while k * k <= n:
        if n % k == 0:
            small.append(k)
            if k * k != n:
                large.append(n // k)
        k += 1
    return small + large[::-1]


def rational_roots(p: UniPoly) -> list[Fraction]:
    """Rational roots of a rational polynomial (rational root theorem)."""
    if p.domain is not None or p.degree < 1:
        return []
    roots = []
    if p.coeffs[0] == 0:
        roots.append(Fraction(0))
        k = next(i for i, c in enumerate(p.coeffs) if c != 0)
        p = UniPoly(p.coeffs[k:])
        if p.degree < 1:
            return roots
    den = 1
    for c in p.coeffs:
        den = den * c.denominator // _igcd(den, c.denominator)
    ints = [int(c * den) for c in p.coeffs]
    ps, qs = _divisors(ints[0]), _divisors(ints[-1])
    if ps is None or qs is None:
        return roots
    seen = set()
    for a in ps:
        for b in qs:
            for cand in (Fraction(a, b), Fraction(-a, b)):
                if cand not in seen:
                    seen.add(cand)
                    if p(cand) == 0:
                        roots.append(cand)
    return sorted(roots)


def _igcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def split_rational_linear(f: UniPoly) -> list[UniPoly]:
    """Split monic linear factors with rational roots off a square-free f."""
    if f.degree <= 1:
        return [f]
    out = []
    for r in rational_roots(f):
        lin = UniPoly([-r, 1])
        f = f // lin
        out.append(lin)
    if f.degree >= 1:
        out.append(f.monic())
    return out


def square_free_part(p: UniPoly) -> UniPoly:
    if p.degree <= 0:
        return p.monic()
    return (p // gcd(p, p.deriv())).monic()


# ----------------------------------------------------------------------------
# Sturm machinery


def _positive_scale(p: UniPoly) -> UniPoly:
    lc = p.lc
    return p.scale(1 / (lc * sign(lc)))


def sturm_chain(p: UniPoly) -> list[UniPoly]:
    chain = [p, p.deriv()]
    while chain[-1].degree > 0:
        r = chain[-2].divrem(chain[-1])[1]
        if not r:
            break
        chain.append(_positive_scale(-r))
    return [c for c in chain if c]


def _variations(signs) -> int:
    s = [v for v in signs if v != 0]
    return sum(1 for a, b in zip(s, s[1:]) if a != b)


def _sign_at(chain, v) -> list[int]:
    if v == "-inf":
        return [sign(c.lc) * (-1) ** c.degree for c in chain]
    if v == "+inf":
        return [sign(c.lc) for c in chain]
    return [sign(c(v)) for c in chain]


def _check_point(p: UniPoly, v):
    if isinstance(v, QuadExt) and p.domain not in (None, v.d):
        raise EndpointNotRepresentable(f"endpoint {v} outside Q(sqrt {p.domain})")


def _count_open(chain, lo, hi) -> int:
    """Distinct roots of chain[0] strictly between lo and hi (``'-inf'``/``'+inf'`` allowed)."""
    n = _variations(_sign_at(chain, lo)) - _variations(_sign_at(chain, hi))
    if hi not in ("-inf", "+inf") and chain[0](hi) == 0:
        n -= 1
    return n


def _ends(domain: Domain):
    return ("-inf" if domain.lo is None else domain.lo,
            "+inf" if domain.hi is None else domain.hi)


def sturm_count(p: UniPoly, interval: Domain) -> int:
    """Number of distinct real roots of ``p`` in ``interval`` (respecting open/closed ends)."""
    if not p:
        raise ValueError("zero polynomial has infinitely many roots")
    s = square_free_part(p)
    lo, hi = _ends(interval)
    for v in (lo, hi):
        if v not in ("-inf", "+inf"):
            _check_point(s, v)
    if s.degree == 0:
        return 0
    chain = sturm_chain(s)
    n = _count_open(chain, lo, hi)
    if not interval.lo_open and s(lo) == 0:
        n += 1
    if not interval.hi_open and s(hi) == 0:
        n += 1
    return n


def cauchy_bound(p: UniPoly) -> Fraction:
    """Integer B with every real root inside (-B, B)."""
    eps = Fraction(1, 2 ** 20)
    lc = quad_enclosure(p.lc, Precision(eps))
    while lc.lo <= 0 <= lc.hi:
        eps /= 2 ** 20
        lc = quad_enclosure(p.lc, Precision(eps))
    m = min(abs(lc.lo), abs(lc.hi))
    big = Fraction(0)
    for c in p.coeffs[:-1]:
        e = quad_enclosure(c, Precision(eps))
        big = max(big, abs(e.lo), abs(e.hi))
    b = 1 + big / m
    return Fraction(-((-b.numerator) // b.denominator) + 1)


def rational_between(u, v) -> Fraction:
    """A small-denominator rational strictly between exact u < v."""
    if not isinstance(u, QuadExt) and not isinstance(v, QuadExt):
        u, v = Fraction(u), Fraction(v)
        # prefer simple dyadic points when available
        k = 0
        while True:
            scale = 2 ** k
            cand = Fraction(int((u * scale) // 1) + 1, scale)
            if cand < v:
                return cand
            k += 1
    eps = Fraction(1, 2)
    while True:
        iu = quad_enclosure(u, Precision(eps))
        iv = quad_enclosure(v, Precision(eps))
        if iu.hi < iv.lo:
            return rational_between(iu.hi, iv.lo)
        eps /= 16


@dataclass(frozen=True)
class RootBox:
    interval: RatInterval
    multiplicity: int
    factor: UniPoly = field(compare=False, repr=False, default=None)
    exact: Number | None = None


def _isolate_sqf(s: UniPoly, lo, hi) -> list[RatInterval]:
    """Boxes for roots of square-free ``s`` strictly between lo and hi."""
    if s.degree <= 0:
        return []
    chain = sturm_chain(s)
    if lo == "-inf" or hi == "+inf":
        b = cauchy_bound(s)
        lo = -b if lo == "-inf" else lo
        hi = b if hi == "+inf" else hi
    boxes: list[RatInterval] = []
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        n = _count_open(chain, a, b)
        if n == 0:
            continue
        rational_ends = not isinstance(a, QuadExt) and not isinstance(b, QuadExt)
        if n == 1 and rational_ends and s(a) != 0 and s(b) != 0:
            boxes.append(RatInterval(a, b))
            continue
        m = rational_between(a, b)
        if s(m) == 0:
            boxes.append(RatInterval(m, m))
        stack.append((a, m))
        stack.append((m, b))
    boxes.sort(key=lambda iv: iv.lo)
    return boxes


def refine_box(s: UniPoly, box: RatInterval, width: Fraction) -> RatInterval:
    """Bisect an isolating box of a simple root of ``s`` down to ``width``."""
    lo, hi = box.lo, box.hi
    if lo == hi:
        return box
    slo = sign(s(lo))
    while hi - lo > width:
        m = (lo + hi) / 2
        sm = sign(s(m))
        if sm == 0:
            return RatInterval(m, m)
        if sm == slo:
            lo = m
        else:
            hi = m
    return RatInterval(lo, hi)


def _exact_root_in(f: UniPoly, box: RatInterval):
    if box.lo == box.hi:
        return box.lo
    if f.domain is not None:
        return None
    if f.degree == 1:
        return _norm(-f.coeffs[0] / f.coeffs[1])
    if f.degree == 2:
        from .numerics import exact_sqrt
        c, b, a = f.coeffs
        disc = b * b - 4 * a * c
        try:
            r = exact_sqrt(disc)
        except NotExactlyRepresentable:
            return None
        for cand in ((-b + r) / (2 * a), (-b - r) / (2 * a)):
            cand = _norm(cand)
            if box.contains(cand):
                return cand
    return None


def isolate_roots(p: UniPoly, interval: Domain) -> list[RootBox]:
    """Disjoint rational boxes, one per distinct root of ``p`` in the interval."""
    if not p:
        raise ValueError("cannot isolate roots of the zero polynomial")
    lo, hi = _ends(interval)
    for v in (lo, hi):
        if v not in ("-inf", "+inf"):
            _check_point(p, v)
    dec = square_free_decompose(p)
    found: list[RootBox] = []
    for f, m in dec.factors:
        for box in _isolate_sqf(f, lo, hi):
            found.append(RootBox(box, m, f))
        for end, is_open in ((lo, interval.lo_open), (hi, interval.hi_open)):
            if end not in ("-inf", "+inf") and not is_open and f(end) == 0:
                iv = quad_enclosure(end, Precision(Fraction(1, 2 ** 40)))
                found.append(RootBox(iv, m, f, exact=end))
    found = _separate(found)
    return [RootBox(b.interval, b.multiplicity, b.factor,
                    b.exact if b.exact is not None else _exact_root_in(b.factor, b.interval))
            for b in found]


def _separate(boxes: list[RootBox]) -> list[RootBox]:
    boxes = sorted(boxes, key=lambda b: b.interval.lo)
    changed = True
    while changed:
        changed = False
        for i in range(len(boxes) - 1):
            a, b = boxes[i], boxes[i + 1]
            if a.interval.hi >= b.interval.lo:
                boxes[i] = _halve(a)
                boxes[i + 1] = _halve(b)
                changed = True
        boxes.sort(key=lambda b: b.interval.lo)
    return boxes


def _halve(b: RootBox) -> RootBox:
    iv = b.interval
    if iv.lo == iv.hi:
        return b
    if b.exact is not None:
        w = iv.width / 4
        return RootBox(quad_enclosure(b.exact, Precision(w)), b.multiplicity, b.factor, b.exact)
    return RootBox(refine_box(b.factor, iv, iv.width / 2), b.multiplicity, b.factor, b.exact)


# ----------------------------------------------------------------------------
# nonnegativity decision


@dataclass(frozen=True)
class NonnegCert:
    poly: UniPoly
    decomposition: SqfDecomp | None
    roots: tuple  # RootBox
    samples: tuple  # (Fraction, sign)
    endpoint_signs: tuple  # (exact endpoint, sign)
    nonneg: bool
    witness: Fraction | None = None
    zeros: tuple | None = None  # exact zeros in the domain, None if not all exact

    @property
    def verdict(self) -> str:
        return "nonneg" if self.nonneg else f"fails-at({self.witness})"


def _interior(interval: Domain, v) -> bool:
    return interval.contains(v) and v != interval.lo and v != interval.hi


def _witness_near(p: UniPoly, box: RootBox, interval: Domain) -> Fraction | None:
    """Rational point next to an odd root where p < 0."""
    iv = box.interval
    for _ in range(400):
        if iv.lo == iv.hi:
            m, w = iv.lo, Fraction(1, 2)
            for _ in range(400):
                for c in (m - w, m + w):
                    if _interior(interval, c) and sign(p(c)) < 0:
                        return c
                w /= 2
            return None
        for c in (iv.lo, iv.hi):
            if _interior(interval, c) and sign(p(c)) < 0:
                return c
        iv = refine_box(box.factor, iv, iv.width / 2)
    return None


def _endpoint_witness(p: UniPoly, end, interval: Domain) -> Fraction:
    # p(end) < 0 exactly; walk inside until a rational point with p < 0
    w = Fraction(1, 2)
    inward = 1 if end == interval.lo else -1
    while True:
        c = rational_between(end, end + w) if inward > 0 else rational_between(end - w, end)
        if interval.contains(c) and sign(p(c)) < 0:
            return c
        w /= 2


def nonneg_on(p: UniPoly, interval: Domain) -> NonnegCert:
    """Decide ``p >= 0`` on the interval, with an exact witness on failure."""
    if not p:
        return NonnegCert(p, None, (), (), (), True, None, None)
    lo, hi = _ends(interval)
    for v in (lo, hi):
        if v not in ("-inf", "+inf"):
            _check_point(p, v)
    dec = square_free_decompose(p)
    boxes = isolate_roots(p, interval)
    interior = [b for b in boxes if not _on_boundary(b, interval)]

    def fail(w):
        return NonnegCert(p, dec, tuple(boxes), tuple(samples), tuple(ends), False, w, None)

    samples: list = []
    ends: list = []
    for end, is_open in ((interval.lo, interval.lo_open), (interval.hi, interval.hi_open)):
        if end is not None and not is_open:
            s = sign(p(end))
            ends.append((end, s))
    # odd multiplicity strictly inside -> sign change
    for b in interior:
        if b.multiplicity % 2 == 1:
            w = _witness_near(p, b, interval)
            if w is not None:
                return fail(w)
    # one sample per root-free gap
    pts = _gap_samples(interior, interval, p)
    for pt in pts:
        s = sign(p(pt))
        samples.append((pt, s))
        if s < 0:
            return fail(pt)
    for end, s in ends:
        if s < 0:
            if isinstance(end, QuadExt):
                return fail(_endpoint_witness(p, end, interval))
            return fail(end)
    zeros = []
    for b in boxes:
        if b.exact is None:
            zeros = None
            break
        if interval.contains(b.exact):
            zeros.append(b.exact)
    return NonnegCert(p, dec, tuple(boxes), tuple(samples), tuple(ends), True, None,
                      None if zeros is None else tuple(zeros))


def _on_boundary(b: RootBox, interval: Domain) -> bool:
    return b.exact is not None and (b.exact == interval.lo or b.exact == interval.hi)


def _gap_samples(boxes: list[RootBox], interval: Domain, p: UniPoly) -> list[Fraction]:
    lo, hi = interval.lo, interval.hi
    if lo is None or hi is None:
        bound = cauchy_bound(p) if p.degree > 0 else Fraction(1)
    # refine each box to at most 1/64 of its neighbouring gaps
    refined = []
    for i, b in enumerate(boxes):
        left = boxes[i - 1].interval.hi if i > 0 else lo
        right = boxes[i + 1].interval.lo if i + 1 < len(boxes) else hi
        iv = b.interval
        gaps = []
        if left is not None:
            gaps.append(_approx_gap(left, iv.lo))
        if right is not None:
            gaps.append(_approx_gap(iv.hi, right))
        if gaps and iv.lo != iv.hi:
            target = min(gaps) / 64
            if target > 0:
                iv = refine_box(b.factor, iv, target)
        refined.append(iv)
    edges = [lo if lo is not None else -bound - 1]
    for iv in refined:
        edges.extend([iv.lo, iv.hi])
    edges.append(hi if hi is not None else bound + 1)
    pts = []
    for a, b in zip(edges[::2], edges[1::2]):
        if sign(b - a) > 0:
            pts.append(_mid(a, b))
    return pts


def _approx_gap(a, b) -> Fraction:
    ia = quad_enclosure(a, Precision(Fraction(1, 2 ** 30)))
    ib = quad_enclosure(b, Precision(Fraction(1, 2 ** 30)))
    return max(Fraction(0), ib.lo - ia.hi)


def _mid(a, b) -> Fraction:
    if isinstance(a, QuadExt) or isinstance(b, QuadExt):
        return rational_between(a, b)
    return (Fraction(a) + Fraction(b)) / 2


def positive_on(p: UniPoly, interval: Domain) -> bool:
    """True iff p > 0 everywhere on the interval."""
    if not p:
        return False
    cert = nonneg_on(p, interval)
    return cert.nonneg and sturm_count(p, interval) == 0


# ----------------------------------------------------------------------------
# multivariate identity checking


class MultiPoly:
    """Sparse polynomial in up to four variables with rational coefficients."""

    __slots__ = ("terms", "nvars")

    def __init__(self, terms: dict | None = None, nvars: int = 4):
        if nvars > 4:
            raise ValueError("at most four variables")
        self.nvars = nvars
        self.terms = {k: Fraction(v) for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def var(cls, i: int, nvars: int = 4) -> MultiPoly:
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): 1}, nvars)

    @classmethod
    def const(cls, c, nvars: int = 4) -> MultiPoly:
        return cls({(0,) * nvars: c}, nvars)

    def _lift(self, other):
        return other if isinstance(other, MultiPoly) else MultiPoly.const(other, self.nvars)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return MultiPoly(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly({k: -v for k, v in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out: dict = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0) + v1 * v2
        return MultiPoly(out, self.nvars)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        r = MultiPoly.const(1, self.nvars)
        for _ in range(n):
            r = r * self
        return r

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __call__(self, *vals):
        total = Fraction(0)
        for k, c in self.terms.items():
            t = c
            for v, e in zip(vals, k):
                t = t * v ** e
            total += t
        return total


def expand_equal(lhs: MultiPoly, rhs: MultiPoly) -> bool:
    """True iff both sides have identical canonical expansions."""
    return lhs.terms == rhs.terms
