"""Pointwise claims ``h(x) >= 0`` and their certificates.

Two backends.  The symbolic one rewrites the claim (root substitution,
isolate-and-square for a single radical, clearing a denominator of known
sign) until a polynomial remains, then decides it exactly.  The interval one
covers the domain with subintervals on which a rigorous enclosure of ``h`` is
positive, plus convexity neighbourhoods around declared tangency zeros.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .expr import (
    Const, Domain, DomainError, DomainViolation, Expr, Neg, Sub, diff, eval_exact, eval_interval,
    has_var, parse, parse_domain, to_str, walk, Pow, Var,
)
from .numerics import (
    DEFAULT_PRECISION, NotExactlyRepresentable, NumericsError, Number, Precision, QuadExt,
    RatInterval, as_number, exact_root, number_from_json, number_to_json, quad_enclosure, sign,
)
from .poly import NonnegCert, RootBox, SqfDecomp, UniPoly, nonneg_on, positive_on
from .ratfunc import (
    NoSingleRadicalDecomposition, NotRationalStructure, RatFunc, content_normalize,
    other_fractional_powers, poly_to_expr, substitute_power, to_radform, to_ratfunc,
    var_root_denominator,
)


class ExponentNotClearedByQ(ValueError):
    pass


class EndpointNotRepresentable(ValueError):
    pass


class SideConditionFailed(ValueError):
    pass


@dataclass(frozen=True)
class Claim:
    """``h >= 0`` on ``domain``; with ``zeros_allowed=False`` the claim is ``h > 0``."""

    h: Expr
    domain: Domain
    zeros_allowed: bool = True

    def __str__(self):
        rel = ">=" if self.zeros_allowed else ">"
        return f"{to_str(self.h)} {rel} 0 on {self.domain}"


@dataclass(frozen=True)
class Verdict:
    status: str  # proved | disproved | unknown
    witness: Fraction | None = None
    reason: str = ""

    @property
    def proved(self) -> bool:
        return self.status == "proved"

    def __str__(self):
        if self.status == "disproved":
            return f"disproved({self.witness})"
        if self.status == "unknown":
            return f"unknown({self.reason})"
        return "proved"


# ----------------------------------------------------------------------------
# rewrite steps


@dataclass(frozen=True)
class ClearDenominator:
    multiplier: Expr
    sides: tuple = field(default=(), compare=False)


@dataclass(frozen=True)
class MoveAndSquare:
    """``A >= B*sqrt(R)`` (radical_larger False) or ``B*sqrt(R) >= A`` (True),
    valid as an equivalence when A, B, R are nonnegative on the domain."""

    a: Expr
    b: Expr
    r: Expr
    radical_larger: bool
    sides: tuple = field(default=(), compare=False)


@dataclass(frozen=True)
class SubstituteRoot:
    q: int
    image: Domain
    sides: tuple = field(default=(), compare=False)


RewriteStep = Union[ClearDenominator, MoveAndSquare, SubstituteRoot]


@dataclass(frozen=True)
class PolyLeaf:
    claim: Claim
    poly: UniPoly
    cert: NonnegCert


@dataclass(frozen=True)
class IntervalLeaf:
    claim: Claim
    epsilon: Fraction
    pieces: tuple  # (lo, hi, enc_lo, enc_hi)
    neighborhoods: tuple  # Neighborhood


@dataclass(frozen=True)
class Neighborhood:
    center: Number
    lo: Fraction
    hi: Fraction
    order: int  # derivative whose enclosure is positive (1 or 2)
    direction: int  # +1: h^(order) > 0; -1: h' < 0 (right boundary)
    enc_lo: Fraction
    enc_hi: Fraction


@dataclass(frozen=True)
class RewriteNode:
    claim: Claim
    step: RewriteStep
    children: tuple


Node = Union[PolyLeaf, IntervalLeaf, RewriteNode]


@dataclass(frozen=True)
class Certificate:
    root: Node
    zeros: tuple | None  # exact zero set of h in the domain, None if not exact

    def step_kinds(self) -> list[str]:
        out = []

        def visit(n):
            if isinstance(n, PolyLeaf):
                out.append("PolyNonneg")
            elif isinstance(n, IntervalLeaf):
                out.append("IntervalProof")
            else:
                out.append(type(n.step).__name__)
                for c in n.children:
                    visit(c)

        visit(self.root)
        return out

    def main_leaf(self) -> Node:
        """Leaf reached by always following the main (first) child."""
        n = self.root
        while isinstance(n, RewriteNode):
            n = n.children[0]
        return n


# ----------------------------------------------------------------------------
# rewrites (pure; shared by prover and checker)


def rewrite_clear_denominators(claim: Claim, sgn: int = 1) -> tuple[Claim, ClearDenominator]:
    """``N/D >= 0`` becomes ``c*sgn*N >= 0`` with multiplier ``c*sgn*D`` (side: multiplier > 0)."""
    try:
        rf = to_ratfunc(claim.h)
    except NoSingleRadicalDecomposition as exc:
        raise NotRationalStructure(str(exc)) from None
    if rf.is_poly():
        raise NotRationalStructure("no denominator to clear")
    c, _ = content_normalize(rf.num)
    num = rf.num.scale(c * sgn)
    mult = rf.den.scale(c * sgn)
    side = Claim(poly_to_expr(mult), claim.domain, zeros_allowed=False)
    main = Claim(poly_to_expr(num), claim.domain, claim.zeros_allowed)
    return main, ClearDenominator(poly_to_expr(mult), (side,))


def rewrite_move_and_square(claim: Claim, radical_larger: bool) -> tuple[Claim, MoveAndSquare]:
    """Square away the single radical of ``h = P + Q*sqrt(R)``.

    ``radical_larger=True`` treats h as ``Q*sqrt(R) - (-P)``; False as ``P - (-Q)*sqrt(R)``.
    Side claims: A >= 0, B >= 0, R >= 0.
    """
    try:
        f = to_radform(claim.h)
    except NotRationalStructure as exc:
        raise NoSingleRadicalDecomposition(str(exc)) from None
    if f.radical_free:
        raise NoSingleRadicalDecomposition("no radical present")
    if radical_larger:
        a, b = -f.p, f.q
        main_rf = b * b * f.r - a * a
    else:
        a, b = f.p, -f.q
        main_rf = a * a - b * b * f.r
    a_e, b_e, r_e = a.to_expr(), b.to_expr(), f.r.to_expr()
    sides = (Claim(a_e, claim.domain), Claim(b_e, claim.domain), Claim(r_e, claim.domain))
    main = Claim(main_rf.to_expr(), claim.domain, claim.zeros_allowed)
    return main, MoveAndSquare(a_e, b_e, r_e, radical_larger, sides)


def _root_of_endpoint(v, q: int):
    if v is None:
        return None
    try:
        return as_number(exact_root(v, q))
    except (NotExactlyRepresentable, NumericsError) as exc:
        raise EndpointNotRepresentable(f"{v}^(1/{q}) not exactly representable: {exc}") from None


def rewrite_substitute_root(claim: Claim, q: int) -> tuple[Claim, SubstituteRoot]:
    """Substitute x = t^q so that every power of x becomes integral."""
    h, dom = claim.h, claim.domain
    for n in walk(h):
        if isinstance(n, Pow) and isinstance(n.base, Var) and (n.exponent * q).denominator != 1:
            raise ExponentNotClearedByQ(f"x^({n.exponent}) not cleared by q={q}")
    if q % 2 == 0 and (dom.lo is None or sign(dom.lo) < 0):
        raise EndpointNotRepresentable("even root substitution needs a nonnegative domain")
    image = Domain(_root_of_endpoint(dom.lo, q), _root_of_endpoint(dom.hi, q),
                   dom.lo_open, dom.hi_open)
    child = Claim(substitute_power(h, q), image, claim.zeros_allowed)
    return child, SubstituteRoot(q, image)


# ----------------------------------------------------------------------------
# symbolic prover


@dataclass
class _Out:
    status: str
    node: Node | None = None
    zeros: tuple | None = None
    witness: Fraction | None = None
    reason: str = ""


def leaf_poly(claim: Claim) -> UniPoly | None:
    try:
        rf = to_ratfunc(claim.h)
    except (NotRationalStructure, NoSingleRadicalDecomposition):
        return None
    return rf.num if rf.is_poly() else None


def _prove_leaf(claim: Claim, p: UniPoly) -> _Out:
    cert = nonneg_on(p, claim.domain)
    node = PolyLeaf(claim, p, cert)
    if not cert.nonneg:
        return _Out("disproved", witness=cert.witness)
    if not claim.zeros_allowed:
        if not p or (cert.zeros is None) or cert.zeros:
            if p and cert.zeros is None and positive_on(p, claim.domain):
                return _Out("proved", node, ())
            return _Out("unknown", reason="not strictly positive")
    return _Out("proved", node, cert.zeros)


def _prove(claim: Claim, depth: int = 0) -> _Out:
    if depth > 12:
        return _Out("unknown", reason="rewrite depth exceeded")
    h = claim.h
    q = var_root_denominator(h)
    if q > 1:
        try:
            child, step = rewrite_substitute_root(claim, q)
        except (ExponentNotClearedByQ, EndpointNotRepresentable) as exc:
            return _Out("unknown", reason=str(exc))
        out = _prove(child, depth + 1)
        if out.status == "proved":
            zeros = None if out.zeros is None else tuple(_pow_exact(z, q) for z in out.zeros)
            return _Out("proved", RewriteNode(claim, step, (out.node,)), zeros)
        if out.status == "disproved":
            return _Out("disproved", witness=out.witness ** q)
        return out
    p = leaf_poly(claim)
    if p is not None:
        return _prove_leaf(claim, p)
    try:
        f = to_radform(h)
    except (NotRationalStructure, NoSingleRadicalDecomposition) as exc:
        return _Out("unknown", reason=str(exc))
    if f.radical_free:
        reasons = []
        for sgn in (1, -1):
            main, step = rewrite_clear_denominators(claim, sgn)
            side = _prove(step.sides[0], depth + 1)
            if side.status != "proved":
                reasons.append(f"multiplier {to_str(step.multiplier)} not certified positive")
                continue
            out = _prove(main, depth + 1)
            if out.status == "proved":
                return _Out("proved", RewriteNode(claim, step, (out.node, side.node)), out.zeros)
            return out
        return _Out("unknown", reason="; ".join(reasons))
    reasons = []
    for radical_larger in (True, False):
        main, step = rewrite_move_and_square(claim, radical_larger)
        side_nodes = []
        ok = True
        # B first: it decides the orientation
        for side in (step.sides[1], step.sides[0], step.sides[2]):
            s = _prove(side, depth + 1)
            if s.status != "proved":
                ok = False
                reasons.append(f"side condition {to_str(side.h)} >= 0 not certified")
                break
            side_nodes.append(s.node)
        if not ok:
            continue
        b_node, a_node, r_node = side_nodes
        out = _prove(main, depth + 1)
        if out.status == "proved":
            return _Out("proved", RewriteNode(claim, step, (out.node, a_node, b_node, r_node)),
                        out.zeros)
        return out
    return _Out("unknown", reason="; ".join(reasons))


def _pow_exact(z, q: int):
    return as_number(z ** q)


# ----------------------------------------------------------------------------
# interval prover


def _confirm_negative(h: Expr, w) -> bool:
    """Exact (or rigorously enclosed) check that h(w) < 0."""
    try:
        return sign(eval_exact(h, w)) < 0
    except NotExactlyRepresentable:
        pass
    except (DomainError, NumericsError):
        return False
    try:
        enc = eval_interval(h, quad_enclosure(w, Precision(Fraction(1, 10 ** 30))),
                            Precision(Fraction(1, 10 ** 30)))
    except (DomainViolation, NumericsError):
        return False
    return enc.hi < 0


def _closure_bounds(dom: Domain):
    if dom.lo is None or dom.hi is None:
        return None
    lo = quad_enclosure(dom.lo, Precision(Fraction(1, 2 ** 60))).lo
    hi = quad_enclosure(dom.hi, Precision(Fraction(1, 2 ** 60))).hi
    return lo, hi


def _enclose(e: Expr, iv: RatInterval, prec: Precision) -> RatInterval | None:
    try:
        return eval_interval(e, iv, prec)
    except (DomainViolation, NumericsError):
        return None


def _exact_or_none(e: Expr, z):
    try:
        return eval_exact(e, z)
    except (NotExactlyRepresentable, DomainError, NumericsError):
        return None


def neighborhood_for(h: Expr, z, lo: Fraction, hi: Fraction, prec: Precision) -> Neighborhood | None:
    """Convexity / monotonicity neighbourhood of a zero ``z`` of ``h`` inside [lo, hi]."""
    if _exact_or_none(h, z) != 0:
        return None
    d1 = diff(h)
    d2 = diff(d1)
    slope = _exact_or_none(d1, z)
    zi = quad_enclosure(z, Precision(Fraction(1, 2 ** 80)))
    delta = Fraction(1, 10)
    for _ in range(21):
        a = max(lo, zi.lo - delta)
        b = min(hi, zi.hi + delta)
        if z == lo:
            a = lo
        if z == hi:
            b = hi
        iv = RatInterval(a, b)
        if slope == 0:
            enc = _enclose(d2, iv, prec)
            if enc is not None and enc.lo > 0:
                return Neighborhood(z, a, b, 2, 1, enc.lo, enc.hi)
        elif slope is not None and z == lo and sign(slope) > 0:
            enc = _enclose(d1, iv, prec)
            if enc is not None and enc.lo > 0:
                return Neighborhood(z, a, b, 1, 1, enc.lo, enc.hi)
        elif slope is not None and z == hi and sign(slope) < 0:
            enc = _enclose(d1, iv, prec)
            if enc is not None and enc.hi < 0:
                return Neighborhood(z, a, b, 1, -1, enc.lo, enc.hi)
        else:
            return None
        delta /= 2
    return None


def interval_prove(claim: Claim, declared_zeros=(), prec: Precision = DEFAULT_PRECISION,
                   max_depth: int = 40) -> tuple[Verdict, Certificate | None]:
    """Cover the domain closure with positive enclosures and zero neighbourhoods."""
    h, dom = claim.h, claim.domain
    bounds = _closure_bounds(dom)
    if bounds is None:
        return Verdict("unknown", reason="interval backend needs a bounded domain"), None
    lo, hi = bounds
    for end in (lo, hi):
        if _enclose(h, RatInterval.point(end), prec) is None:
            return Verdict("unknown", reason=(
                f"h undefined at endpoint {end}; one-sided boundary analysis not available")), None
    if declared_zeros and not claim.zeros_allowed:
        return Verdict("unknown", reason="strict claim with zeros"), None
    nbhds = []
    for z in declared_zeros:
        z = as_number(z)
        if not dom.contains(z) and not (z == dom.lo or z == dom.hi):
            continue
        nb = neighborhood_for(h, z, lo, hi, prec)
        if nb is None:
            val = _exact_or_none(h, z)
            if val is not None and sign(val) < 0 and isinstance(z, Fraction) and dom.contains(z):
                return Verdict("disproved", witness=z), None
            continue
        nbhds.append(nb)
    nbhds.sort(key=lambda n: n.lo)
    gaps = []
    cur = lo
    for nb in nbhds:
        if nb.lo > cur:
            gaps.append((cur, nb.lo))
        cur = max(cur, nb.hi)
    if cur < hi:
        gaps.append((cur, hi))
    pieces = []
    budget = [200000]
    for a, b in gaps:
        res = _bisect(h, dom, a, b, 0, max_depth, prec, pieces, budget)
        if res is not None:
            return res, None
    pieces.sort(key=lambda p: p[0])
    leaf = IntervalLeaf(claim, prec.epsilon, tuple(pieces), tuple(nbhds))
    return Verdict("proved"), Certificate(leaf, interval_leaf_zeros(leaf))


def interval_leaf_zeros(leaf: IntervalLeaf) -> tuple:
    # each neighbourhood holds exactly one zero (strict convexity or monotonicity)
    return tuple(nb.center for nb in leaf.neighborhoods if leaf.claim.domain.contains(nb.center))


def _bisect(h, dom, a, b, depth, max_depth, prec, pieces, budget):
    stack = [(a, b, depth)]
    while stack:
        a, b, d = stack.pop()
        budget[0] -= 1
        if budget[0] < 0:
            return Verdict("unknown", reason="evaluation budget exhausted")
        enc = _enclose(h, RatInterval(a, b), prec)
        if enc is not None and enc.lo > 0:
            pieces.append((a, b, enc.lo, enc.hi))
            continue
        m = (a + b) / 2
        for w in (m, a, b):
            if dom.contains(w) and _confirm_negative(h, w):
                return Verdict("disproved", witness=w)
        if d >= max_depth:
            return Verdict("unknown", reason=f"subdivision depth {max_depth} reached near {m}")
        stack.append((m, b, d + 1))
        stack.append((a, m, d + 1))
    return None


# ----------------------------------------------------------------------------
# entry point


def certify(claim: Claim, strategy: str = "auto", zeros=(), prec: Precision = DEFAULT_PRECISION,
            max_depth: int = 40) -> tuple[Verdict, Certificate | None]:
    if strategy not in ("auto", "symbolic", "interval"):
        raise ValueError(f"unknown strategy {strategy!r}")
    reason = ""
    if strategy in ("auto", "symbolic"):
        out = _prove(claim)
        if out.status == "proved":
            return Verdict("proved"), Certificate(out.node, out.zeros)
        if out.status == "disproved" and _confirm_negative(claim.h, out.witness):
            return Verdict("disproved", witness=out.witness), None
        reason = out.reason or "symbolic pipeline inconclusive"
        if strategy == "symbolic":
            return Verdict("unknown", reason=reason), None
    verdict, cert = interval_prove(claim, zeros, prec, max_depth)
    if verdict.status == "unknown" and reason:
        verdict = Verdict("unknown", reason=f"{reason}; {verdict.reason}")
    return verdict, cert


# ----------------------------------------------------------------------------
# canonical JSON

FORMAT = "tangentcert-certificate/1"


def claim_to_json(c: Claim) -> dict:
    return {"h": to_str(c.h), "domain": str(c.domain), "zeros_allowed": c.zeros_allowed}


def _poly_json(p: UniPoly) -> list:
    return [number_to_json(c) for c in p.coeffs]


def _node_json(n: Node) -> dict:
    if isinstance(n, PolyLeaf):
        c = n.cert
        dec = c.decomposition
        return {
            "kind": "poly",
            "claim": claim_to_json(n.claim),
            "poly": _poly_json(n.poly),
            "unit": None if dec is None else number_to_json(dec.unit),
            "factors": [] if dec is None else [[_poly_json(f), m] for f, m in dec.factors],
            "roots": [[str(b.interval.lo), str(b.interval.hi), b.multiplicity,
                       None if b.exact is None else number_to_json(b.exact)] for b in c.roots],
            "samples": [[str(pt), s] for pt, s in c.samples],
            "endpoints": [[number_to_json(pt), s] for pt, s in c.endpoint_signs],
            "nonneg": c.nonneg,
            "zeros": None if c.zeros is None else [number_to_json(z) for z in c.zeros],
        }
    if isinstance(n, IntervalLeaf):
        return {
            "kind": "interval",
            "claim": claim_to_json(n.claim),
            "epsilon": str(n.epsilon),
            "pieces": [[str(v) for v in p] for p in n.pieces],
            "neighborhoods": [{
                "center": number_to_json(nb.center), "lo": str(nb.lo), "hi": str(nb.hi),
                "order": nb.order, "direction": nb.direction,
                "enclosure": [str(nb.enc_lo), str(nb.enc_hi)]} for nb in n.neighborhoods],
        }
    step = n.step
    if isinstance(step, ClearDenominator):
        sj = {"type": "ClearDenominator", "multiplier": to_str(step.multiplier)}
    elif isinstance(step, MoveAndSquare):
        sj = {"type": "MoveAndSquare", "a": to_str(step.a), "b": to_str(step.b),
              "r": to_str(step.r), "radical_larger": step.radical_larger}
    else:
        sj = {"type": "SubstituteRoot", "q": step.q, "image": str(step.image)}
    return {"kind": "rewrite", "claim": claim_to_json(n.claim), "step": sj,
            "children": [_node_json(c) for c in n.children]}


def certificate_to_dict(cert: Certificate) -> dict:
    return {"format": FORMAT,
            "zeros": None if cert.zeros is None else [number_to_json(z) for z in cert.zeros],
            "tree": _node_json(cert.root)}


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def certificate_to_json(cert: Certificate) -> str:
    return canonical_json(certificate_to_dict(cert))


class CertificateFormatError(ValueError):
    pass


def _keys(d, expected: set):
    if not isinstance(d, dict) or set(d) != expected:
        raise CertificateFormatError(f"unexpected keys {sorted(d) if isinstance(d, dict) else d}")


def claim_from_json(d) -> Claim:
    _keys(d, {"h", "domain", "zeros_allowed"})
    if not isinstance(d["zeros_allowed"], bool):
        raise CertificateFormatError("zeros_allowed must be boolean")
    return Claim(parse(d["h"]), parse_domain(d["domain"]), d["zeros_allowed"])


def _poly_from(lst) -> UniPoly:
    if not isinstance(lst, list):
        raise CertificateFormatError("polynomial must be a list")
    return UniPoly([number_from_json(c) for c in lst])


def _int(v) -> int:
    if not isinstance(v, int) or isinstance(v, bool):
        raise CertificateFormatError(f"expected integer, got {v!r}")
    return v


def _node_from(d) -> Node:
    if not isinstance(d, dict) or "kind" not in d:
        raise CertificateFormatError("node without kind")
    kind = d["kind"]
    if kind == "poly":
        _keys(d, {"kind", "claim", "poly", "unit", "factors", "roots", "samples", "endpoints",
                  "nonneg", "zeros"})
        poly = _poly_from(d["poly"])
        dec = None
        if d["unit"] is not None:
            dec = SqfDecomp(number_from_json(d["unit"]),
                            tuple((_poly_from(f), _int(m)) for f, m in d["factors"]))
        roots = tuple(RootBox(RatInterval(Fraction(lo), Fraction(hi)), _int(m), None,
                              None if ex is None else number_from_json(ex))
                      for lo, hi, m, ex in d["roots"])
        samples = tuple((Fraction(pt), _int(s)) for pt, s in d["samples"])
        ends = tuple((number_from_json(pt), _int(s)) for pt, s in d["endpoints"])
        if not isinstance(d["nonneg"], bool):
            raise CertificateFormatError("nonneg must be boolean")
        zeros = None if d["zeros"] is None else tuple(number_from_json(z) for z in d["zeros"])
        cert = NonnegCert(poly, dec, roots, samples, ends, d["nonneg"], None, zeros)
        return PolyLeaf(claim_from_json(d["claim"]), poly, cert)
    if kind == "interval":
        _keys(d, {"kind", "claim", "epsilon", "pieces", "neighborhoods"})
        pieces = tuple(tuple(Fraction(v) for v in p) for p in d["pieces"])
        if any(len(p) != 4 for p in pieces):
            raise CertificateFormatError("piece needs four entries")
        nbs = []
        for nb in d["neighborhoods"]:
            _keys(nb, {"center", "lo", "hi", "order", "direction", "enclosure"})
            nbs.append(Neighborhood(number_from_json(nb["center"]), Fraction(nb["lo"]),
                                    Fraction(nb["hi"]), _int(nb["order"]), _int(nb["direction"]),
                                    Fraction(nb["enclosure"][0]), Fraction(nb["enclosure"][1])))
        return IntervalLeaf(claim_from_json(d["claim"]), Fraction(d["epsilon"]), pieces, tuple(nbs))
    if kind == "rewrite":
        _keys(d, {"kind", "claim", "step", "children"})
        s = d["step"]
        t = s.get("type") if isinstance(s, dict) else None
        if t == "ClearDenominator":
            _keys(s, {"type", "multiplier"})
            step = ClearDenominator(parse(s["multiplier"]))
        elif t == "MoveAndSquare":
            _keys(s, {"type", "a", "b", "r", "radical_larger"})
            if not isinstance(s["radical_larger"], bool):
                raise CertificateFormatError("radical_larger must be boolean")
            step = MoveAndSquare(parse(s["a"]), parse(s["b"]), parse(s["r"]), s["radical_larger"])
        elif t == "SubstituteRoot":
            _keys(s, {"type", "q", "image"})
            step = SubstituteRoot(_int(s["q"]), parse_domain(s["image"]))
        else:
            raise CertificateFormatError(f"unknown step {t!r}")
        return RewriteNode(claim_from_json(d["claim"]), step,
                           tuple(_node_from(c) for c in d["children"]))
    raise CertificateFormatError(f"unknown node kind {kind!r}")


def certificate_from_dict(d) -> Certificate:
    _keys(d, {"format", "zeros", "tree"})
    if d["format"] != FORMAT:
        raise CertificateFormatError("unknown certificate format")
    zeros = None if d["zeros"] is None else tuple(number_from_json(z) for z in d["zeros"])
    return Certificate(_node_from(d["tree"]), zeros)


def certificate_from_json(text: str) -> Certificate:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CertificateFormatError(str(exc)) from None
    try:
        return certificate_from_dict(d)
    except CertificateFormatError:
        raise
    except (ValueError, TypeError, KeyError, ZeroDivisionError, ArithmeticError) as exc:
        raise CertificateFormatError(str(exc)) from None
