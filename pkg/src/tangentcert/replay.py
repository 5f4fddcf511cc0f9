"""Certificate checker.

Every rewrite, side condition, polynomial verdict and interval enclosure is
recomputed from the claim and compared with what the certificate stores.  On
top of the reproduction check the polynomial leaves get an independent sign
argument (a separate Sturm count per odd-multiplicity factor), so a bug in the
prover's decision procedure cannot silently pass.
"""
from __future__ import annotations

from fractions import Fraction

from .certify import (
    Certificate, Claim, ClearDenominator, IntervalLeaf, MoveAndSquare, PolyLeaf, RewriteNode,
    SubstituteRoot, interval_leaf_zeros, leaf_poly, rewrite_clear_denominators,
    rewrite_move_and_square, rewrite_substitute_root,
)
from .expr import Domain, diff, eval_exact, eval_interval
from .numerics import Precision, RatInterval, as_number, quad_enclosure, sign
from .poly import UniPoly, nonneg_on, rational_between
from .ratfunc import var_root_denominator


class Rejected(Exception):
    pass


def _need(cond: bool, why: str):
    if not cond:
        raise Rejected(why)


# ----------------------------------------------------------------------------
# independent sign argument for polynomial leaves


def _rem(a: UniPoly, b: UniPoly) -> UniPoly:
    return a.divrem(b)[1]


def _chain(f: UniPoly) -> list[UniPoly]:
    ch = [f, f.deriv()]
    while ch[-1].degree > 0:
        r = _rem(ch[-2], ch[-1])
        if not r:
            break
        ch.append(-r)
    return ch


def _sgn_at(p: UniPoly, v) -> int:
    if v == "-inf":
        return sign(p.lc) * (-1 if p.degree % 2 else 1)
    if v == "+inf":
        return sign(p.lc)
    return sign(p(v))


def _var(ch, v) -> int:
    s = [x for x in (_sgn_at(p, v) for p in ch) if x != 0]
    return sum(1 for a, b in zip(s, s[1:]) if a != b)


def _distinct_roots_open(f: UniPoly, lo, hi) -> int:
    """Distinct roots of f in the open interval (lo, hi); lo, hi may be infinite."""
    if f.degree <= 0:
        return 0
    ch = _chain(f)
    n = _var(ch, lo) - _var(ch, hi)
    if hi != "+inf" and sign(f(hi)) == 0:
        n -= 1  # V(lo) - V(hi) counts (lo, hi]
    return n


def _interior_point(lo, hi) -> Fraction:
    if lo == "-inf" and hi == "+inf":
        return Fraction(0)
    if lo == "-inf":
        return quad_enclosure(hi).lo - 1
    if hi == "+inf":
        return quad_enclosure(lo).hi + 1
    return rational_between(lo, hi)


def independent_nonneg(p: UniPoly, dom: Domain, dec) -> bool:
    _need(dec is not None, "missing square-free decomposition")
    _need(dec.reconstruct() == p, "decomposition does not multiply back to the polynomial")
    lo = "-inf" if dom.lo is None else dom.lo
    hi = "+inf" if dom.hi is None else dom.hi
    pt = _interior_point(lo, hi)
    s = sign(dec.unit)
    for f, m in dec.factors:
        _need(m >= 1, "bad multiplicity")
        if m % 2 == 1:
            _need(_distinct_roots_open(f, lo, hi) == 0,
                  "odd-multiplicity factor changes sign inside the domain")
            s *= sign(f(pt))
    _need(s > 0, "polynomial negative inside the domain")
    for end, is_open in ((dom.lo, dom.lo_open), (dom.hi, dom.hi_open)):
        if end is not None and not is_open:
            _need(sign(p(end)) >= 0, "polynomial negative at a closed endpoint")
    return True


# ----------------------------------------------------------------------------
# node checks


def _check_poly(node: PolyLeaf, claim: Claim) -> tuple:
    p = leaf_poly(claim)
    _need(p is not None, "leaf claim is not polynomial")
    _need(p == node.poly, "stored polynomial differs from the claim")
    ref = nonneg_on(p, claim.domain)
    c = node.cert
    _need(c.poly == p, "certificate polynomial differs")
    _need(ref.nonneg and c.nonneg, "polynomial is not nonnegative")
    _need(c.decomposition == ref.decomposition, "decomposition does not reproduce")
    _need(c.roots == ref.roots, "root isolation does not reproduce")
    _need(c.samples == ref.samples, "gap samples do not reproduce")
    _need(c.endpoint_signs == ref.endpoint_signs, "endpoint signs do not reproduce")
    _need(c.zeros == ref.zeros, "zero set does not reproduce")
    for pt, s in c.samples:
        _need(claim.domain.contains(pt) and sign(p(pt)) == s, "bad sample")
    if p:
        independent_nonneg(p, claim.domain, c.decomposition)
    if not claim.zeros_allowed:
        _need(bool(p) and c.zeros == (), "strict claim has zeros")
    return c.zeros


def _bounds(dom: Domain):
    _need(dom.lo is not None and dom.hi is not None, "interval proof on unbounded domain")
    return (quad_enclosure(dom.lo, Precision(Fraction(1, 2 ** 60))).lo,
            quad_enclosure(dom.hi, Precision(Fraction(1, 2 ** 60))).hi)


def _check_interval(node: IntervalLeaf, claim: Claim) -> tuple:
    h, dom = claim.h, claim.domain
    prec = Precision(node.epsilon)
    lo, hi = _bounds(dom)
    segs = []
    for a, b, elo, ehi in node.pieces:
        _need(lo <= a <= b <= hi, "piece outside the domain closure")
        enc = eval_interval(h, RatInterval(a, b), prec)
        _need((enc.lo, enc.hi) == (elo, ehi), "piece enclosure does not reproduce")
        _need(enc.lo > 0, "piece enclosure not positive")
        segs.append((a, b))
    d1 = diff(h)
    d2 = diff(d1)
    for nb in node.neighborhoods:
        z = nb.center
        _need(lo <= nb.lo <= nb.hi <= hi, "neighbourhood outside the domain closure")
        zi = quad_enclosure(z, Precision(Fraction(1, 2 ** 80)))
        _need(nb.lo <= zi.lo and zi.hi <= nb.hi, "neighbourhood does not contain its centre")
        _need(sign(eval_exact(h, z)) == 0, "neighbourhood centre is not a zero")
        iv = RatInterval(nb.lo, nb.hi)
        if nb.order == 2:
            _need(nb.direction == 1, "bad direction")
            _need(sign(eval_exact(d1, z)) == 0, "no horizontal tangent at the centre")
            enc = eval_interval(d2, iv, prec)
            _need(enc.lo > 0, "second derivative not positive")
        elif nb.order == 1 and nb.direction == 1:
            _need(z == dom.lo and nb.lo == lo, "increasing neighbourhood not at the left end")
            enc = eval_interval(d1, iv, prec)
            _need(enc.lo > 0, "derivative not positive")
        elif nb.order == 1 and nb.direction == -1:
            _need(z == dom.hi and nb.hi == hi, "decreasing neighbourhood not at the right end")
            enc = eval_interval(d1, iv, prec)
            _need(enc.hi < 0, "derivative not negative")
        else:
            raise Rejected("bad neighbourhood kind")
        _need((enc.lo, enc.hi) == (nb.enc_lo, nb.enc_hi), "neighbourhood enclosure does not reproduce")
        segs.append((nb.lo, nb.hi))
    segs.sort()
    _need(bool(segs) and segs[0][0] <= lo, "left end not covered")
    reach = segs[0][1]
    for a, b in segs[1:]:
        _need(a <= reach, f"gap in coverage at {reach}")
        reach = max(reach, b)
    _need(reach >= hi, "right end not covered")
    zeros = interval_leaf_zeros(node)
    _need(claim.zeros_allowed or not zeros, "strict claim has zeros")
    return zeros


def _check_rewrite(node: RewriteNode, claim: Claim) -> tuple:
    step = node.step
    if isinstance(step, SubstituteRoot):
        q = var_root_denominator(claim.h)
        child, ref = rewrite_substitute_root(claim, q)
        _need(ref == step, "substitution does not reproduce")
        _need(len(node.children) == 1, "substitution has one child")
        zeros = _check(node.children[0], child)
        return None if zeros is None else tuple(as_number(z ** q) for z in zeros)
    if isinstance(step, ClearDenominator):
        for sgn in (1, -1):
            main, ref = rewrite_clear_denominators(claim, sgn)
            if ref == step:
                break
        else:
            raise Rejected("multiplier does not reproduce")
        _need(len(node.children) == 2, "clearing has two children")
        _check(node.children[1], ref.sides[0])
        return _check(node.children[0], main)
    if isinstance(step, MoveAndSquare):
        main, ref = rewrite_move_and_square(claim, step.radical_larger)
        _need(ref == step, "squaring step does not reproduce")
        _need(len(node.children) == 4, "squaring has four children")
        for child, side in zip(node.children[1:], ref.sides):
            _check(child, side)
        return _check(node.children[0], main)
    raise Rejected("unknown step")


def _check(node, claim: Claim) -> tuple:
    _need(node.claim == claim, "node claim does not match")
    if isinstance(node, PolyLeaf):
        return _check_poly(node, claim)
    if isinstance(node, IntervalLeaf):
        return _check_interval(node, claim)
    if isinstance(node, RewriteNode):
        return _check_rewrite(node, claim)
    raise Rejected("unknown node")


def check_certificate_reason(cert: Certificate, claim: Claim) -> tuple[bool, str]:
    try:
        zeros = _check(cert.root, claim)
        _need(zeros == cert.zeros, "recorded zero set does not reproduce")
    except Rejected as exc:
        return False, str(exc)
    except Exception as exc:  # malformed data of any kind is a rejection
        return False, f"{type(exc).__name__}: {exc}"
    return True, "ok"


def check_certificate(cert: Certificate, claim: Claim) -> bool:
    return check_certificate_reason(cert, claim)[0]
