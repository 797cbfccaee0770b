"""Command line front end.

    rubancf floor -l 3 5/6
    rubancf expand -l 3 "(0+sqrt(37))/(1*3^0)" --branch 1 --json
    rubancf pure-periodic -l 3 13 --show-filtered
    rubancf scan --l-max 50 "x^2-13"
    rubancf verify report.json

Exit status: 0 on success, 1 on parse or domain errors (and failed
verification), 2 when an internal invariant is violated.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction

import sympy

from . import __version__
from .bounds import (
    ExpansionRecord,
    check_growth_bounds,
    check_height_bounds,
    check_ladic_approx,
    check_qn_bound,
)
from .convergents import convergents
from .padic import LRational, PartialQuotient, Prime, padic_floor
from .periodic import candidate_list, default_branch, determine_pure_periodic, pell_period1, ppp_filter
from .quadratic import (
    QuadraticSurd,
    aperiodicity_threshold,
    classify_quadratic,
    expand_surd,
    make_surd,
    roots_of,
    surd_floor,
)
from .rational import (
    Outcome,
    bound_b1,
    bound_b2,
    classify_rational,
    expand_rational,
    rational_threshold,
    scan_primes_rational,
)

_INT = r"[+-]?\d+"
SURD_RE = re.compile(
    rf"""^\s*\(?\s*
    (?:(?P<b>{_INT})\s*(?P<op>[+-])\s*|(?P<lead>[+-])?\s*)
    (?:(?P<u>\d+)\s*\*\s*)?sqrt\s*\(\s*(?P<D>{_INT})\s*\)
    \s*\)?
    (?:\s*/\s*\(?\s*(?P<c>{_INT})\s*(?:\*\s*(?P<l>\d+)\s*\^\s*(?P<f>{_INT}))?\s*\)?)?
    \s*$""",
    re.VERBOSE,
)


class InputError(ValueError):
    pass


def parse_surd(text: str, prime: int, branch: int | None) -> QuadraticSurd:
    """Parse (b+u*sqrt(D))/(c*l^f); u, the denominator and l^f are optional."""
    m = SURD_RE.match(text)
    if not m:
        raise InputError(f"cannot parse surd {text!r}")
    if branch is None:
        raise InputError("surd input needs --branch")
    b = int(m["b"]) if m["b"] is not None else 0
    op = m["op"] or m["lead"] or "+"
    u = int(m["u"]) if m["u"] else 1
    if op == "-":
        u = -u
    c = int(m["c"]) if m["c"] is not None else 1
    f = int(m["f"]) if m["f"] is not None else 0
    if m["l"] is not None and int(m["l"]) != prime:
        raise InputError(f"denominator prime {m['l']} differs from -l {prime}")
    return make_surd(int(m["D"]), b, c, f, prime, branch, u=u)


def parse_number(text: str, prime: int, branch: int | None):
    if "sqrt" in text:
        return parse_surd(text, prime, branch)
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse {text!r}: {exc}") from None
    return LRational(value, prime)


def parse_polynomial(text: str) -> tuple[int, int, int]:
    x = sympy.Symbol("x")
    try:
        expr = sympy.parse_expr(
            text.replace("^", "**"), local_dict={"x": x}, evaluate=True
        )
        poly = sympy.Poly(expr, x)
    except (sympy.SympifyError, SyntaxError, sympy.PolynomialError, TypeError) as exc:
        raise InputError(f"cannot parse polynomial {text!r}: {exc}") from None
    if poly.degree() != 2 or not all(cf.is_integer for cf in poly.all_coeffs()):
        raise InputError("expected an integer quadratic A*x^2+B*x+C")
    A, B, C = (int(cf) for cf in poly.all_coeffs())
    return A, B, C


def fmt_list(quotients) -> str:
    return "[" + ", ".join(str(a) for a in quotients) + "]"


def surd_json(x: QuadraticSurd) -> dict:
    d = x.to_dict()
    d["text"] = x.pretty()
    return d


def cq_json(x) -> object:
    if isinstance(x, QuadraticSurd):
        return surd_json(x)
    return str(Fraction(x))


def _trace_rows(quotients, cqs, prime) -> list[dict]:
    conv = convergents(quotients, prime)
    rows = []
    for n, alpha in enumerate(cqs):
        row = {"n": n, "alpha": cq_json(alpha), "p_tilde": conv.p_tilde[n], "q_tilde": conv.q_tilde[n], "s": conv.s[n]}
        if n < len(quotients):
            row["a"] = str(quotients[n])
        rows.append(row)
    return rows


def expand_report(args, x) -> dict:
    p = int(args.prime)
    report: dict = {"command": "expand", "input": {"text": args.number, "prime": p, "branch": args.branch}}
    extra = args.trace or 0
    if isinstance(x, LRational):
        exp = expand_rational(x)
        report["kind"] = "rational"
        report["outcome"] = exp.outcome.value
        cls = classify_rational(x)
        report["bounds"] = {"B1": bound_b1(x), "B2": bound_b2(x), "decided_at": cls.index}
        if exp.outcome is Outcome.FINITE:
            report["preperiod"], report["period"] = [str(a) for a in exp.quotients], []
        else:
            report["preperiod"] = [str(a) for a in exp.quotients]
            report["period"] = [str(a) for a in exp.period]
        periods = 0 if exp.outcome is Outcome.FINITE else max(extra - len(exp.quotients), 0)
        quotients = exp.all_quotients(periods)
        cqs = exp.complete_quotients_extended(periods)
        report["preperiod_length"] = exp.preperiod_len
    else:
        cls = classify_quadratic(x, improved=args.improved_bound, max_steps=args.max_steps)
        report["kind"] = "quadratic"
        report["standard_input"] = surd_json(x)
        report["outcome"] = cls.outcome.value
        report["bounds"] = {"N_alpha": cls.bound_used, "improved": bool(args.improved_bound), "steps_used": cls.steps_used}
        report["preperiod"] = [str(a) for a in cls.preperiod]
        report["period"] = [str(a) for a in cls.period]
        if cls.witness is not None:
            report["witness"] = {"index": cls.witness_index, "surd": surd_json(cls.witness)}
        quotients, cqs = cls.quotients, cls.complete_quotients
        if x.Delta > 0 and extra > len(quotients):
            quotients, cqs = expand_surd(x, extra)
    report["quotients"] = [str(a) for a in quotients]
    report["complete_quotients"] = [cq_json(a) for a in cqs]
    if args.trace is not None:
        report["trace"] = _trace_rows(quotients, cqs, p)
    return report


def render_expand(report: dict) -> str:
    lines = []
    outcome = report["outcome"]
    if outcome == "finite":
        lines.append(f"finite: {fmt_list(report['preperiod'])}")
    elif outcome == "periodic":
        lines.append(f"periodic: preperiod {fmt_list(report['preperiod'])}, period {fmt_list(report['period'])}")
    else:
        w = report.get("witness")
        if w:
            lines.append(f"aperiodic; witness step {w['index']}: {w['surd']['text']}")
            lines.append(f"prefix {fmt_list(report['quotients'][: w['index']])}")
        else:
            lines.append("aperiodic; no real embedding")
    lines.append("bounds: " + ", ".join(f"{k}={v}" for k, v in report["bounds"].items()))
    for row in report.get("trace", []):
        alpha = row["alpha"]["text"] if isinstance(row["alpha"], dict) else row["alpha"]
        a = row.get("a", "")
        lines.append(f"  n={row['n']:<3} a={a:<8} alpha={alpha}  p~={row['p_tilde']} q~={row['q_tilde']} s={row['s']}")
    return "\n".join(lines)


def emit(args, report: dict, text: str) -> None:
    if args.json:
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        print(text)


def cmd_floor(args) -> int:
    x = parse_number(args.number, args.prime, args.branch)
    a = padic_floor(x) if isinstance(x, LRational) else surd_floor(x)
    report = {"command": "floor", "input": {"text": args.number, "prime": int(args.prime)}, "floor": str(a), "r": a.r, "e": a.e}
    emit(args, report, str(a))
    return 0


def cmd_expand(args) -> int:
    x = parse_number(args.number, args.prime, args.branch)
    report = expand_report(args, x)
    emit(args, report, render_expand(report))
    return 0


def cmd_classify(args) -> int:
    x = parse_number(args.number, args.prime, args.branch)
    report = expand_report(args, x)
    report["command"] = "classify"
    for key in ("complete_quotients", "trace"):
        report.pop(key, None)
    emit(args, report, render_expand(report))
    return 0


def cmd_pure_periodic(args) -> int:
    D, p = args.Delta, args.prime
    if D % p == 0:
        raise InputError(f"{p} divides {D}: remove the square l-power factors from Delta first")
    branch = args.branch if args.branch is not None else default_branch(D, p)
    report: dict = {"command": "pure-periodic", "input": {"Delta": D, "prime": int(p), "branch": branch}}
    lines = []
    if args.pell is not None:
        table = pell_period1(D, p, args.pell, branch)
        rows = []
        for h, sols in table.items():
            if not sols:
                lines.append(f"h={h}: none")
            for s in sols:
                rows.append({"h": h, "t": s.t, "u": s.u, "quotient": str(s.quotient), "surd": s.describe(D)})
                lines.append(f"h={h}: t={s.t} u={s.u}  {s.describe(D)} = [{s.quotient}] repeated")
        report["pell"] = rows
        report["pell_h_max"] = args.pell
    else:
        cands = candidate_list(D, p, branch)
        kept = ppp_filter(list(cands))
        found = determine_pure_periodic(D, p, branch)
        report["counts"] = {"candidates": len(cands), "filtered": len(kept), "confirmed": len(found)}
        report["surds"] = [{"surd": surd_json(x), "period": [str(a) for a in per]} for x, per in found]
        if args.show_filtered:
            report["filtered"] = [surd_json(c.surd) for c in kept]
            lines.append(f"candidates: {len(cands)} -> after filters: {len(kept)} -> confirmed: {len(found)}")
            lines.extend(f"  filtered: {c.surd.pretty()}" for c in kept)
        for x, per in found:
            lines.append(f"{x.pretty()}  period {fmt_list(per)}")
        if not found:
            lines.append("no purely periodic surds")
    emit(args, report, "\n".join(lines))
    return 0


def cmd_scan(args) -> int:
    text, l_max = args.number, args.l_max
    report: dict = {"command": "scan", "input": {"text": text, "l_max": l_max}}
    lines = []
    if "x" in text:
        A, B, C = parse_polynomial(text)
        rows = []
        for p in sympy.primerange(2, l_max + 1):
            p = int(p)
            roots = roots_of(A, B, C, p)
            if not roots:
                rows.append({"prime": p, "roots": "none in Q_l"})
                lines.append(f"l={p:<4} no root in Q_l")
                continue
            outcomes = [classify_quadratic(r).outcome.value for r in roots]
            try:
                threshold = aperiodicity_threshold(A, B, C, p)
            except ValueError:
                threshold = None
            rows.append({"prime": p, "outcomes": outcomes, "threshold": threshold})
            lines.append(f"l={p:<4} {' '.join(outcomes)}  threshold={threshold}")
        report["rows"] = rows
    else:
        x = Fraction(text)
        T, outcome = rational_threshold(x)
        rows = [{"prime": p, "outcome": o.value} for p, o in scan_primes_rational(x, l_max)]
        report["rows"] = rows
        report["threshold"] = {"beyond": T, "outcome": outcome.value}
        lines = [f"l={r['prime']:<4} {r['outcome']}" for r in rows]
        lines.append(f"every prime l > {T}: {outcome.value}")
    emit(args, report, "\n".join(lines))
    return 0


def _load_cq(obj, prime: int):
    if isinstance(obj, dict):
        return QuadraticSurd(obj["Delta"], obj["b"], obj["c"], obj["f"], prime, obj["branch"])
    return Fraction(obj)


def verify_report(report: dict) -> list[tuple[str, bool | None]]:
    """Run every checker on the stored data; None marks a check that does not apply."""
    try:
        inp = report["input"]
        p = Prime(inp["prime"])
        quotients = [PartialQuotient.from_fraction(Fraction(a), p) for a in report["quotients"]]
        cqs = [_load_cq(c, p) for c in report["complete_quotients"]]
        kind = report["kind"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"report does not match the expansion schema: {exc}") from None
    results: list[tuple[str, bool | None]] = []
    x = parse_number(inp["text"], p, inp.get("branch"))
    if kind == "rational":
        fresh = expand_rational(x)
        ref_q = fresh.all_quotients(max(len(quotients) - len(fresh.quotients), 0))
        ref_c = fresh.complete_quotients_extended(max(len(cqs) - len(fresh.complete_quotients), 0))
        consistent = ref_q == quotients and [Fraction(c) for c in ref_c] == cqs
        finite = fresh.outcome is Outcome.FINITE
        alpha = x.value
    else:
        ref_q, ref_c = expand_surd(x, len(quotients))
        consistent = ref_q == quotients and [c.key() for c in ref_c[: len(cqs)]] == [c.key() for c in cqs]
        finite = False
        alpha = x
    results.append(("expansion matches input", consistent))
    if not cqs or not quotients:
        return results
    rec = ExpansionRecord(int(p), quotients, cqs, finite=finite, alpha=alpha)
    results.append(("convergent bound", check_qn_bound(rec)))
    results.append(("l-adic approximation", check_ladic_approx(rec)))
    try:
        results.append(("complete quotient heights", check_height_bounds(rec)))
    except ValueError:
        results.append(("complete quotient heights", None))
    if kind == "quadratic":
        results.append(("growth of (b, c l^f, f)", check_growth_bounds(rec)))
    return results


def cmd_verify(args) -> int:
    try:
        with open(args.report) as fh:
            report = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read report: {exc}") from None
    results = verify_report(report)
    ok = all(r is not False for _, r in results)
    out = {"command": "verify", "checks": {name: r for name, r in results}, "ok": ok}
    text = "\n".join(f"{'n/a ' if r is None else ('pass' if r else 'FAIL')}  {name}" for name, r in results)
    emit(args, out, text)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rubancf", description="Ruban l-adic continued fractions")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, number=True):
        sp.add_argument("-l", "--prime", type=Prime, required=True)
        if number:
            sp.add_argument("number", help='rational "p/q" or surd "(b+u*sqrt(D))/(c*l^f)"')
        sp.add_argument("--branch", type=int, help="residue of the l-free root mod l (mod 8 for l=2)")
        sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("floor", help="l-adic integral part")
    common(sp)
    sp.set_defaults(func=cmd_floor)

    for name, func in (("expand", cmd_expand), ("classify", cmd_classify)):
        sp = sub.add_parser(name, help=f"{name} a rational or quadratic surd")
        common(sp)
        sp.add_argument("--max-steps", type=int)
        sp.add_argument("--improved-bound", action="store_true")
        sp.add_argument("--trace", type=int, nargs="?", const=0, metavar="STEPS",
                        help="include per-step complete quotients and convergents (at least STEPS steps)")
        sp.set_defaults(func=func)

    sp = sub.add_parser("pure-periodic", help="purely periodic surds of ordinate Delta")
    common(sp, number=False)
    sp.add_argument("Delta", type=int)
    sp.add_argument("--pell", type=int, metavar="H_MAX", help="period-1 search for h = 1..H_MAX instead")
    sp.add_argument("--show-filtered", action="store_true")
    sp.set_defaults(func=cmd_pure_periodic)

    sp = sub.add_parser("scan", help="classify for every prime up to a bound")
    sp.add_argument("--l-max", "-l-max", dest="l_max", type=int, required=True)
    sp.add_argument("number", help='rational "p/q" or polynomial "A*x^2+B*x+C"')
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_scan)

    sp = sub.add_parser("verify", help="re-check bounds on a stored expand --json report")
    sp.add_argument("report")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_verify)
    return ap


NEGATIVE_RE = re.compile(r"^-\d+(/\d+)?$")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    # argparse reads "-7/3" as an option; a leading space keeps it positional
    argv = [" " + a if NEGATIVE_RE.match(a) else a for a in argv]
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        return args.func(args)
    except AssertionError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ZeroDivisionError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
