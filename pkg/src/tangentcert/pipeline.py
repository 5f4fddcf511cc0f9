"""Problem orchestration: surrogate, pointwise certificates, composition, report."""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .certify import (
    Certificate, CertificateFormatError, Claim, claim_from_json, claim_to_json, canonical_json,
    certificate_from_dict, certificate_to_dict, certify,
)
from .compose import (
    ComposedVerdict, FreeIntercept, MixedConstraintFunctions, NonpositiveExponent,
    NonpositiveLeadingCoefficient, PairwiseSum, ProductAtLeast, SideConditionFailed, SlopeMismatch,
    SumOfC, WitnessViolatesConstraint, ZeroSetNotExact, chain_compose, check_optimality,
    compose_holder, compose_intercept, compose_product, compose_sum, strictness_analysis,
)
from .expr import Const, DomainError, Expr, Sub, diff, eval_exact, eval_interval, parse, to_str
from .numerics import (
    NotExactlyRepresentable, NumericsError, Precision, RatInterval, as_number, number_from_json,
    number_to_json, quad_enclosure, sign, to_decimal_str,
)
from .problem import EqualSlopes, ProblemFile
from .ratfunc import to_ratfunc
from .replay import check_certificate_reason
from .surrogate import (
    EqualSlopeSystem, InconsistentConditions, InterceptSum, Line, NoSolutionInDomain,
    NonAlgebraicCondition, SingularSystem, SolvedSurrogate, TangentAt, Through,
    bound_from_equal_slopes, equal_slope_tangents, solve_equal_slopes, solve_intercept,
    solve_line_tangent, solve_two_param, verify_conditions,
)

EXIT = {"proved": 0, "disproved": 1, "unknown": 2}
SOLVE_ERRORS = (NoSolutionInDomain, NonAlgebraicCondition, InconsistentConditions, SingularSystem,
                NotExactlyRepresentable, DomainError, NumericsError, ZeroDivisionError)
COMPOSE_ERRORS = (MixedConstraintFunctions, SlopeMismatch, NonpositiveLeadingCoefficient,
                  NonpositiveExponent, SideConditionFailed, ValueError)


def _s(v) -> str:
    if isinstance(v, RatInterval):
        return f"[{to_decimal_str(v.lo, 25)}, {to_decimal_str(v.hi, 25)}]"
    return to_str(Const(as_number(v)))


@dataclass
class Report:
    name: str
    surrogate: list
    verdict: str
    bound: str | None
    claimed_bound: str | None
    strict: bool | None
    witnesses: list
    certificates: list  # {"claim", "verdict", "steps", "zeros"}
    classical_steps: list
    optimality: dict | None
    expect: str
    as_expected: bool
    reason: str = ""
    numeric_only: bool = False
    timing_s: float = 0.0

    def to_dict(self, timing: bool = False) -> dict:
        d = asdict(self)
        if not timing:
            d.pop("timing_s")
        return d

    def to_json(self, timing: bool = False) -> str:
        return canonical_json(self.to_dict(timing))

    @classmethod
    def from_dict(cls, d: dict) -> Report:
        return cls(**d)

    @property
    def exit_code(self) -> int:
        return EXIT[self.verdict]

    def to_text(self) -> str:
        lines = [f"{self.name}: {self.verdict}"]
        for g in self.surrogate:
            lines.append(f"  surrogate: {g}")
        if self.bound is not None:
            rel = ">" if self.strict and self.verdict == "proved" else ">="
            lines.append(f"  bound: {rel} {self.bound}" + (" (numeric)" if self.numeric_only else ""))
        if self.claimed_bound is not None:
            lines.append(f"  claimed: {self.claimed_bound}")
        if self.strict is not None:
            lines.append(f"  strict: {self.strict}")
        for w in self.witnesses[:4]:
            lines.append(f"  equality at: ({', '.join(w)})")
        for c in self.certificates:
            z = "unknown" if c["zeros"] is None else "{" + ", ".join(c["zeros"]) + "}"
            lines.append(f"  claim {c['claim']}: {c['verdict']} via {' > '.join(c['steps'])}; zeros {z}")
        for st in self.classical_steps:
            lines.append(f"  classical step {st['name']}: {st['statement']} "
                         f"[{st['checks']} spot checks {'ok' if st['passed'] else 'FAILED'}]")
        if self.optimality:
            o = self.optimality
            lines.append(f"  at witness: lhs {o['lhs']}, rhs {o['rhs']}, {o['status']}")
        if self.reason:
            lines.append(f"  note: {self.reason}")
        lines.append(f"  expected {self.expect}: {'ok' if self.as_expected else 'MISMATCH'}")
        return "\n".join(lines)


def _matches(expect: str, verdict: str) -> bool:
    if expect == "negative":
        return verdict in ("disproved", "unknown")
    return expect == verdict


# ----------------------------------------------------------------------------
# surrogate selection


def _candidates(pf: ProblemFile, f: Expr) -> list[SolvedSurrogate]:
    conds = list(pf.tangency)
    inter = [c for c in conds if isinstance(c, InterceptSum)]
    if inter:
        c = inter[0]
        return [s for _, s in solve_intercept(f, c.n, c.a, pf.domain)]
    if isinstance(pf.family, Line) and len(conds) == 1 and isinstance(conds[0], TangentAt):
        return [solve_line_tangent(f, conds[0].x0)]
    return [solve_two_param(f, pf.family, conds)]


@dataclass
class _Claims:
    claims: list
    verdicts: list
    certs: list
    zero_sets: list | None


def _certify_claims(pf: ProblemFile, surs: list[SolvedSurrogate], strategy: str) -> _Claims:
    pts = pf.tangency_points()
    for s in surs:
        pts = pts + tuple(s.points)
    pts = tuple(dict.fromkeys(pts))
    if isinstance(pf.constraint, PairwiseSum):
        chain = list(pf.functions) + [surs[-1].g]
        res = chain_compose(chain, pf.domain, strategy)
        zs = res.zero_sets
        per = []
        for i in range(len(pf.functions)):
            tail = zs[i:]
            if any(z is None for z in tail):
                per = None
                break
            common = [z for z in tail[0] if all(z in t for t in tail[1:])]
            per.append(tuple(common))
        return _Claims(list(res.claims), list(res.verdicts), list(res.certificates), per)
    claims, verdicts, certs = [], [], []
    for f, s in zip(pf.functions, surs):
        claim = Claim(Sub(f, s.g), pf.domain)
        v, c = certify(claim, strategy, zeros=pts)
        claims.append(claim)
        verdicts.append(v)
        certs.append(c)
    zs = [None if c is None else c.zeros for c in certs]
    return _Claims(claims, verdicts, certs, None if any(z is None for z in zs) else zs)


def expected_claims(pf: ProblemFile, gs: list[Expr]) -> list[Claim]:
    """Pointwise claims implied by the problem and the surrogate(s); prover-free."""
    if isinstance(pf.family, EqualSlopes):
        return [Claim(diff(diff(f)), pf.domain, zeros_allowed=False) for f in pf.functions]
    if isinstance(pf.constraint, PairwiseSum):
        chain = list(pf.functions) + [gs[-1]]
        return [Claim(Sub(a, b), pf.domain) for a, b in zip(chain, chain[1:])]
    return [Claim(Sub(f, g), pf.domain) for f, g in zip(pf.functions, gs)]


# ----------------------------------------------------------------------------
# main entry


def _claim_summary(claim, verdict, cert) -> dict:
    return {
        "claim": str(claim),
        "verdict": str(verdict),
        "steps": [] if cert is None else cert.step_kinds(),
        "zeros": None if cert is None or cert.zeros is None else [_s(z) for z in cert.zeros],
    }


def _compose(pf: ProblemFile, surs: list[SolvedSurrogate]) -> ComposedVerdict:
    spec = pf.spec()
    con = pf.constraint
    if isinstance(con, SumOfC):
        return compose_sum(surs, spec)
    if isinstance(con, FreeIntercept):
        return compose_intercept(surs[0], spec)
    if isinstance(con, ProductAtLeast):
        if len({to_str(s.g) for s in surs}) != 1:
            raise MixedConstraintFunctions("product composition needs one common surrogate")
        return compose_product(surs[0], spec)
    return compose_holder(surs[-1], spec)


def _fallback(pf: ProblemFile, claimed, why: str) -> tuple[str, dict | None, str]:
    """Without a proof, a witness may still refute the claimed bound exactly."""
    w = pf.witness_values
    if w is None or claimed is None:
        return "unknown", None, why
    try:
        rep = check_optimality(pf.spec(), w, claimed)
    except (WitnessViolatesConstraint, NotExactlyRepresentable, DomainError, NumericsError) as exc:
        return "unknown", None, f"{why}; witness unusable: {exc}"
    o = {"lhs": _s(rep.lhs), "rhs": _s(rep.rhs), "margin": _s(rep.margin), "status": rep.status}
    if rep.status == "violated" or (rep.status == "equality" and pf.direction == "gt"):
        return "disproved", o, f"{why}; the witness violates the claimed bound exactly"
    return "unknown", o, why


def run_problem(pf: ProblemFile, strategy: str | None = None) -> tuple[Report, dict | None]:
    t0 = time.perf_counter()
    strategy = strategy or pf.strategy
    if isinstance(pf.family, EqualSlopes):
        rep, bundle = _run_equal_slopes(pf, strategy)
        rep.timing_s = time.perf_counter() - t0
        return rep, bundle
    claimed = pf.bound_value
    base = dict(name=pf.name, claimed_bound=None if claimed is None else _s(claimed), expect=pf.expect)

    def finish(verdict, **kw):
        kw.setdefault("surrogate", [])
        kw.setdefault("bound", None)
        kw.setdefault("strict", None)
        kw.setdefault("witnesses", [])
        kw.setdefault("certificates", [])
        kw.setdefault("classical_steps", [])
        kw.setdefault("optimality", None)
        rep = Report(verdict=verdict, as_expected=_matches(pf.expect, verdict),
                     timing_s=time.perf_counter() - t0, **base, **kw)
        return rep

    try:
        cand_lists = [_candidates(pf, f) for f in pf.functions]
    except SOLVE_ERRORS as exc:
        verdict, opt, why = _fallback(pf, claimed, f"surrogate not found: {type(exc).__name__}: {exc}")
        return finish(verdict, optimality=opt, reason=why), None
    # intercept conditions may admit several tangency points: first one that certifies wins
    chosen = None
    for idx in range(max(len(c) for c in cand_lists)):
        surs = [c[min(idx, len(c) - 1)] for c in cand_lists]
        res = _certify_claims(pf, surs, strategy)
        if chosen is None or all(v.proved for v in res.verdicts):
            chosen = (surs, res)
        if all(v.proved for v in res.verdicts):
            break
    surs, res = chosen
    sur_txt = list(dict.fromkeys(str(s) for s in surs))
    certs = [_claim_summary(c, v, ct) for c, v, ct in zip(res.claims, res.verdicts, res.certs)]
    if not all(v.proved for v in res.verdicts):
        bad = [f"{c} is {v}" for c, v in zip(res.claims, res.verdicts) if not v.proved]
        verdict, opt, why = _fallback(pf, claimed, "pointwise claim not proved: " + "; ".join(bad))
        return finish(verdict, surrogate=sur_txt, certificates=certs, optimality=opt, reason=why), None
    try:
        comp = _compose(pf, surs)
    except COMPOSE_ERRORS as exc:
        verdict, opt, why = _fallback(pf, claimed, f"composition failed: {type(exc).__name__}: {exc}")
        return finish(verdict, surrogate=sur_txt, certificates=certs, optimality=opt, reason=why), None
    bound = comp.bound
    steps = [asdict(s) for s in comp.classical_steps]
    strict, witnesses = None, []
    if res.zero_sets is not None:
        try:
            st = strictness_analysis(res.zero_sets, pf.spec(), bound)
            strict, witnesses = st.strict, [[_s(x) for x in w] for w in st.witnesses]
        except ZeroSetNotExact:
            pass
    opt = None
    if pf.witness_values is not None:
        try:
            r = check_optimality(pf.spec(), pf.witness_values, bound)
            opt = {"lhs": _s(r.lhs), "rhs": _s(r.rhs), "margin": _s(r.margin), "status": r.status}
        except (WitnessViolatesConstraint, NotExactlyRepresentable, DomainError, NumericsError):
            opt = None
    if not all(s.passed for s in comp.classical_steps):
        verdict, reason = "unknown", "a classical step failed its spot check"
    elif pf.bound is None:
        verdict, reason = "proved", ""
    elif claimed is None:
        verdict, reason = "unknown", "claimed bound is not exactly representable"
    elif isinstance(pf.constraint, FreeIntercept):
        verdict = "proved" if claimed == bound else "unknown"
        reason = "" if verdict == "proved" else f"certified parameter {_s(bound)} differs from {_s(claimed)}"
    else:
        d = sign(as_number(bound - claimed))
        ok = d > 0 or (d == 0 and (pf.direction == "ge" or strict is True))
        verdict = "proved" if ok else "unknown"
        reason = "" if ok else f"certified bound {_s(bound)} does not reach the claim {_s(claimed)}"
    if verdict != "proved":
        verdict, o2, reason = _fallback(pf, claimed, reason)
        opt = o2 or opt
    if opt and isinstance(pf.constraint, FreeIntercept) and opt["status"] == "equality" and verdict == "proved":
        reason = "parameter is extremal: equality at the witness"
    rep = finish(verdict, surrogate=sur_txt, bound=_s(bound), strict=strict, witnesses=witnesses,
                 certificates=certs, classical_steps=steps, optimality=opt, reason=reason)
    bundle = None
    if verdict == "proved":
        bundle = make_bundle(pf, [s.g for s in surs], [s.points for s in surs], res.claims, res.certs)
    return rep, bundle


def equal_slope_system(pf: ProblemFile) -> EqualSlopeSystem:
    """Read weights w_i and s from f_i = w_i*x/(s - x)."""
    con = pf.constraint
    if not isinstance(con, SumOfC) or con.c.p != 1:
        raise MixedConstraintFunctions("equal slopes need the constraint sum x_i = s")
    ws = []
    fs = pf.functions if len(pf.functions) == pf.n else pf.functions * pf.n
    for f in fs:
        rf = to_ratfunc(f)
        num, den = rf.num, rf.den
        if num.degree != 1 or num.coeffs[0] != 0 or den.degree != 1:
            raise MixedConstraintFunctions(f"{to_str(f)} is not w*x/(s-x)")
        s = -den.coeffs[0] / den.coeffs[1]
        if s != con.total:
            raise MixedConstraintFunctions(f"pole of {to_str(f)} is not at the constraint total")
        ws.append(-num.coeffs[1] / den.coeffs[1])
    return EqualSlopeSystem(tuple(ws), con.total)


def _run_equal_slopes(pf: ProblemFile, strategy: str) -> tuple[Report, dict | None]:
    claimed = pf.bound_value
    base = dict(name=pf.name, expect=pf.expect, numeric_only=True)
    try:
        system = equal_slope_system(pf)
    except (MixedConstraintFunctions, ValueError) as exc:
        rep = Report(surrogate=[], verdict="unknown", bound=None, claimed_bound=None, strict=None,
                     witnesses=[], certificates=[], classical_steps=[], optimality=None,
                     as_expected=_matches(pf.expect, "unknown"), reason=str(exc), **base)
        return rep, None
    sol = solve_equal_slopes(system)
    b = bound_from_equal_slopes(system, sol)
    tangents = equal_slope_tangents(system, sol)
    # convexity of every w*x/(s-x) on the domain: the tangent inequality at any point
    claims = expected_claims(pf, [])
    verdicts, certs = [], []
    for claim in claims:
        v, c = certify(claim, strategy)
        verdicts.append(v)
        certs.append(c)
    summaries = [_claim_summary(c, v, ct) for c, v, ct in zip(claims, verdicts, certs)]
    sur = [f"f_{i + 1} tangent at x_{i + 1} = {pt}" for i, pt in enumerate(sol.point_texts)]
    prec = Precision(Fraction(1, 10 ** 30))
    cb = None
    if pf.bound is not None:
        cb = eval_interval(pf.bound, RatInterval.point(0), prec)
    verdict, reason = "unknown", ""
    if not all(v.proved for v in verdicts):
        reason = "convexity not certified"
    elif cb is None:
        verdict = "proved"
    else:
        gap = cb.hi - b.enclosure.lo
        if gap <= Fraction(1, 10 ** 9):
            verdict = "proved"
            reason = (f"claimed bound enclosure {_s(cb)} agrees with the certified enclosure "
                      f"to {float(max(gap, 0)):.1e}; comparison is numeric")
        else:
            verdict = "unknown"
            reason = f"certified bound {_s(b.enclosure)} is below the claim {_s(cb)}"
        if verdict != "proved":
            verdict, _, reason = _fallback(pf, claimed, reason) if claimed is not None else (verdict, None, reason)
    witness = [[_s(RatInterval(p.lo, p.hi)) for p in sol.points]]
    rep = Report(surrogate=sur, verdict=verdict, bound=b.closed_form + " = " + _s(b.enclosure),
                 claimed_bound=None if pf.bound is None else to_str(pf.bound), strict=False,
                 witnesses=witness, certificates=summaries, classical_steps=[], optimality=None,
                 as_expected=_matches(pf.expect, verdict), reason=reason, **base)
    bundle = None
    if verdict == "proved":
        bundle = make_bundle(pf, [], [], claims, certs)
    return rep, bundle


# ----------------------------------------------------------------------------
# certificate bundles

BUNDLE_FORMAT = "tangentcert-bundle/1"


def make_bundle(pf: ProblemFile, gs, points, claims, certs) -> dict:
    return {
        "format": BUNDLE_FORMAT,
        "problem": pf.name,
        "surrogates": [{"g": to_str(g), "points": [number_to_json(p) for p in pts]}
                       for g, pts in zip(gs, points)],
        "claims": [{"claim": claim_to_json(c), "certificate": certificate_to_dict(ct)}
                   for c, ct in zip(claims, certs)],
    }


def replay_bundle(bundle: dict, pf: ProblemFile) -> tuple[bool, str]:
    """Cold check of a bundle against a problem file; no prover involvement."""
    try:
        if not isinstance(bundle, dict) or set(bundle) != {"format", "problem", "surrogates", "claims"}:
            return False, "malformed bundle"
        if bundle["format"] != BUNDLE_FORMAT:
            return False, "unknown bundle format"
        if bundle["problem"] != pf.name:
            return False, f"bundle is for {bundle['problem']!r}, problem is {pf.name!r}"
        gs = []
        for i, s in enumerate(bundle["surrogates"]):
            if set(s) != {"g", "points"}:
                return False, "malformed surrogate entry"
            g = parse(s["g"])
            f = pf.functions[i]
            conds = [c for c in pf.tangency if isinstance(c, (TangentAt, Through))]
            stored = [number_from_json(p) for p in s["points"]]
            if any(isinstance(c, InterceptSum) for c in pf.tangency):
                # the tangency point was solved for; the bundle names it
                conds += [TangentAt(p) for p in stored]
            elif stored != [c.x0 if isinstance(c, TangentAt) else c.x1 for c in conds]:
                return False, "stored points differ from the tangency conditions"
            verify_conditions(f, g, conds)
            for c in pf.tangency:
                if isinstance(c, InterceptSum) and c.n * eval_exact(g, 0) != c.a:
                    return False, "intercept condition fails"
            gs.append(g)
        expected = expected_claims(pf, gs)
        if len(bundle["claims"]) != len(expected):
            return False, "wrong number of claims"
        for entry, claim in zip(bundle["claims"], expected):
            if set(entry) != {"claim", "certificate"}:
                return False, "malformed claim entry"
            if claim_from_json(entry["claim"]) != claim:
                return False, f"claim mismatch: expected {claim}"
            cert = certificate_from_dict(entry["certificate"])
            ok, why = check_certificate_reason(cert, claim)
            if not ok:
                return False, why
        return True, "ok"
    except Exception as exc:  # any malformed content is a rejection
        return False, f"{type(exc).__name__}: {exc}"


# ----------------------------------------------------------------------------
# plot data


@dataclass
class PlotData:
    header: list
    rows: list  # list of (x: Fraction, [values: Fraction | None])
    tangency: list  # (x, column index of f, column index of g)


def _window(pf: ProblemFile, pts) -> tuple[Fraction, Fraction]:
    clip = Fraction(1, 1000)
    d = pf.domain
    fin = [quad_enclosure(as_number(p), Precision(Fraction(1, 10 ** 30))).mid for p in pts]
    if d.lo is None:
        lo = min(fin + [Fraction(0)]) - 2
    else:
        lo = quad_enclosure(d.lo, Precision(Fraction(1, 10 ** 30))).mid
        lo = lo + clip if d.lo_open else lo
    if d.hi is None:
        hi = max(fin + [lo]) + 2
    else:
        hi = quad_enclosure(d.hi, Precision(Fraction(1, 10 ** 30))).mid
        hi = hi - clip if d.hi_open else hi
    return lo, hi


def plot_data(pf: ProblemFile, samples: int) -> PlotData:
    if samples < 2:
        raise ValueError("need at least two samples")
    prec = Precision(Fraction(1, 10 ** 25))
    pairs = []  # (f, g) where g is an Expr or an (alpha, beta) enclosure pair
    tpoints = []  # (x, pair index)
    if isinstance(pf.family, EqualSlopes):
        system = equal_slope_system(pf)
        sol = solve_equal_slopes(system)
        for i, ((a, b), p) in enumerate(zip(equal_slope_tangents(system, sol), sol.points)):
            pairs.append((system.function(i), (a, b)))
            tpoints.append((p.mid, i))
    else:
        surs = [_candidates(pf, f)[0] for f in pf.functions]
        for i, (f, s) in enumerate(zip(pf.functions, surs)):
            pairs.append((f, s.g))
            for p in s.points:
                tpoints.append((p, i))
    lo, hi = _window(pf, [p for p, _ in tpoints])
    xs = {lo + (hi - lo) * Fraction(j, samples - 1): [] for j in range(samples)}
    exact_x = {}
    for p, i in tpoints:
        key = quad_enclosure(as_number(p), Precision(Fraction(1, 10 ** 40))).mid
        if lo <= key <= hi:
            xs.setdefault(key, [])
            exact_x[key] = p
    header = ["x"]
    for i in range(len(pairs)):
        sfx = "" if len(pairs) == 1 else str(i + 1)
        header += [f"f{sfx}", f"g{sfx}"]
    rows = []
    for x in sorted(xs):
        xv = exact_x.get(x, x)
        xi = quad_enclosure(as_number(xv), Precision(Fraction(1, 10 ** 40)))
        vals = []
        for f, g in pairs:
            vals.append(_eval_mid(f, xi, prec))
            if isinstance(g, tuple):
                a, b = g
                v = a + b * xi
                vals.append(v.mid if v.width <= Fraction(1, 10 ** 15) else None)
            else:
                vals.append(_eval_mid(g, xi, prec))
        rows.append((x, vals))
    tang = []
    for p, i in tpoints:
        key = quad_enclosure(as_number(p), Precision(Fraction(1, 10 ** 40))).mid
        if lo <= key <= hi:
            tang.append((key, 1 + 2 * i, 2 + 2 * i))
    return PlotData(header, rows, tang)


def _eval_mid(e: Expr, xi: RatInterval, prec: Precision):
    try:
        v = eval_interval(e, xi, prec)
    except Exception:
        return None
    return v.mid if v.width <= Fraction(1, 10 ** 15) else None


def plot_csv(data: PlotData, digits: int = 20) -> str:
    out = [",".join(data.header)]
    for x, vals in data.rows:
        cells = [to_decimal_str(x, digits)] + ["" if v is None else to_decimal_str(v, digits) for v in vals]
        out.append(",".join(cells))
    return "\n".join(out) + "\n"
