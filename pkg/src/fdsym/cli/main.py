"""``fdsym`` command line: generate, stability, dispersion, render, catalog.

Exit status 0 on success, 1 on diagnostics (bad input, missing values),
2 on internal errors.  Reports are ``key: value`` lines.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path

from .. import approx, dispersion, render, scheme, stability
from ..approx import TIME, DerivativeSymbol
from ..poly import format_poly
from .parser import ParseError, ProblemFile, parse_problem, parse_value


class Diagnostic(Exception):
    pass


def _load(path: str, overrides: list[str]) -> ProblemFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise Diagnostic(f"{path}: {exc}") from None
    try:
        pf = parse_problem(text)
    except ParseError as exc:
        raise Diagnostic(f"{path}:{exc.line}:{exc.col}: {exc.message}") from None
    for item in overrides:
        name, eq, value = item.partition("=")
        if not eq:
            raise Diagnostic(f"--param expects name=value, got {item!r}")
        name = name.strip()
        if name not in pf.assumptions:
            raise Diagnostic(f"--param: undeclared parameter {name!r}")
        try:
            pf.values[name] = parse_value(value)
        except ParseError as exc:
            raise Diagnostic(f"--param {name}: {exc.message}") from None
    return pf


def _scheme(pf: ProblemFile) -> tuple[scheme.Scheme, list[str]]:
    """Scheme polynomial (unaliased) and report lines."""
    lines = []
    if pf.matrix is not None:
        u = DerivativeSymbol()
        if u not in pf.unknowns:
            raise Diagnostic("[matrix] unknowns must include u")
        s = scheme.scheme_from_matrix(pf.matrix, pf.unknowns.index(u), ["source: matrix"])
        lines.append("source: matrix")
        return s, lines
    prob = pf.problem()
    s = scheme.generate_via_elimination(prob)
    lines.append("source: pde")
    lines.append("unknowns: " + ", ".join(b.token(pf.spatial + (TIME,)) for b in prob.unknowns()))
    return s, lines


def _aliased(pf: ProblemFile, p):
    return scheme.apply_aliases(p, pf.aliases) if pf.aliases else p


def _markers(pf: ProblemFile) -> list[str]:
    out = pf.alias_names()
    for a in pf.spatial + (TIME,):
        if pf.axes[a] not in out:
            out.append(pf.axes[a])
    return out


def cmd_generate(pf: ProblemFile, args) -> str:
    s, lines = _scheme(pf)
    lines.append(f"scheme: {format_poly(s.polynomial)}")
    if pf.matrix is None:
        prob = pf.problem()
        rep = scheme.check_equivalence(prob)
        lines.append(f"equivalence: {'ok' if rep else 'MISMATCH'}")
        extra = scheme.rule_entries(prob)
    else:
        extra = [x for row in pf.matrix for x in row if x]
    steps = [pf.axes[a] for a in pf.spatial + (TIME,)]
    form = scheme.semi_factorize(s.polynomial, steps, extra)
    lines.append(f"semi-factorized: {form}")
    lines.append(f"semi-factorized-complete: {'yes' if form.complete else 'no'}")
    if pf.aliases:
        p = _aliased(pf, s.polynomial)
        lines.append(f"aliased: {format_poly(p)}")
        pool = [scheme.apply_aliases(f, pf.aliases) for f in extra]
        form = scheme.semi_factorize(p, _markers(pf), pool)
        lines.append(f"semi-factorized-aliased: {form}")
    return "\n".join(lines)


def _ranges(pf: ProblemFile, names) -> dict:
    missing = sorted(n for n in names if n not in pf.values)
    if missing:
        raise Diagnostic("no value for " + ", ".join(missing) + " (use --param name=value)")
    return {n: pf.values[n] for n in names}


def cmd_stability(pf: ProblemFile, args) -> str:
    s, lines = _scheme(pf)
    p = _aliased(pf, s.polynomial)
    lines.append(f"scheme: {format_poly(p)}")
    sp = stability.chi(p, symbol=args.symbol)
    lines.append(f"stability-polynomial: {sp}")
    st = stability.strip_unimodular_factors(sp, detect_g=args.detect_g)
    lines.append(f"stripped: {st}")
    if st.unit_factors:
        lines.append("unit-factors: " + ", ".join(format_poly(f) for f in st.unit_factors))
    lines.append(f"degree: {st.degree}")
    if args.symbol == "standard":
        lines.append(f"half-angle: {stability.half_angle_text(st)}")
    pos, nonneg = pf.sign_assumptions()
    condition = None
    try:
        rep = stability.closed_form_conditions(st, pos, nonneg)
    except stability.DegreeUnsupported as exc:
        lines.append(f"conditions: unavailable ({exc})")
        rep = None
    if rep is not None:
        lines.append(f"condition-kind: {rep.kind}")
        if rep.eliminated is not None:
            condition = rep.text()
            lines.append(f"conditions: {condition}")
        else:
            lines.append("conditions: " + (" && ".join(c.text() for c in rep.conditions) or "unavailable"))
        if args.cad_dir and rep.conditions:
            assumptions = [f"{n} > 0" for n in pos if n in st.free_params()]
            assumptions += [f"{n} >= 0" for n in nonneg if n in st.free_params()]
            cad = stability.export_cad_formula(rep, assumptions)
            out = Path(args.cad_dir)
            out.mkdir(parents=True, exist_ok=True)
            (out / "stability.m").write_text(cad["mathematica"] + "\n", encoding="utf-8")
            (out / "stability.qepcad").write_text(cad["qepcad"] + "\n", encoding="utf-8")
            lines.append(f"cad-files: {out / 'stability.m'}, {out / 'stability.qepcad'}")
    names = [n for n in st.ring.params.names if n in st.free_params()]
    verdict = stability.numeric_certify(st, _ranges(pf, names), beta_samples=args.beta_samples,
                                        tol=args.tol, condition=condition)
    lines.append(verdict.report())
    return "\n".join(lines)


def cmd_dispersion(pf: ProblemFile, args) -> str:
    lines = []
    cont = None
    if pf.pde is not None:
        cont = dispersion.continuous_dispersion(pf.pde)
        lines.append(cont.text())
    s, _ = _scheme(pf)
    p = _aliased(pf, s.polynomial)
    disc = dispersion.discrete_dispersion(p, dict(pf.axes))
    lines.append(disc.text())
    if args.limit:
        if cont is None:
            raise Diagnostic("--limit needs a [pde] section for the continuous reference")
        limit = {}
        for item in args.limit:
            name, eq, value = item.partition("=")
            if not eq:
                raise Diagnostic(f"--limit expects name=value, got {item!r}")
            try:
                limit[name.strip()] = parse_value(value)
            except ParseError as exc:
                raise Diagnostic(f"--limit {name}: {exc.message}") from None
        needed = set(pf.params.names) - set(limit)
        values = {n: float(v) for n, v in _ranges(pf, sorted(needed)).items() if not isinstance(v, tuple)}
        for name, expr in pf.aliases:
            if name in limit and expr.free_symbols() <= set(values):
                got = float(expr.eval({n: pf.values[n] for n in expr.free_symbols()}))
                if abs(got - float(limit[name])) > 1e-12:
                    raise Diagnostic(f"--limit {name}={limit[name]} disagrees with the parameter values "
                                     f"({name} = {expr} evaluates to {got:g}); adjust them with --param")
        if not disc.solved:
            raise Diagnostic("discrete relation could not be solved for the time angle")
        rep = dispersion.dispersion_limit_check(disc, limit, cont, values,
                                                samples=args.k_samples, tol=args.tol)
        lines.append(f"limit-check: {'ok' if rep.ok else 'mismatch'}")
        lines.append(f"limit-max-error: {rep.max_error:.3e}")
    return "\n".join(lines)


def cmd_render(pf: ProblemFile, args) -> str:
    s, _ = _scheme(pf)
    p = _aliased(pf, s.polynomial) if args.aliased else s.polynomial
    if args.text:
        return render.to_nodal_text(p)
    marker = args.marker or pf.axes[TIME]
    parts = [q for q in scheme.decoef(p, marker) if q]
    return render.to_nodal_latex(parts, args.pull_out or [])


def cmd_catalog(args) -> str:
    lines = []
    for r in approx.catalog():
        high, low = r.pattern()
        flags = []
        if r.temporal:
            flags.append("time-only")
        if r.uses_neighbor:
            flags.append("neighbor")
        lines.append(f"{r.name}: drop={r.drop} error-order={r.error_order} "
                     f"high={format_poly(high)} low={format_poly(low)}"
                     + (f" [{', '.join(flags)}]" if flags else ""))
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fdsym", description="Symbolic finite difference schemes.")
    sub = ap.add_subparsers(dest="command", required=True)

    def problem_cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("problem", help="problem file")
        p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                       help="override a parameter value (rational or lo..hi)")
        return p

    problem_cmd("generate", "scheme, semi-factorized form, equivalence check")
    st = problem_cmd("stability", "von Neumann analysis")
    st.add_argument("--beta-samples", type=int, default=64)
    st.add_argument("--tol", type=float, default=1e-9)
    st.add_argument("--symbol", choices=stability.SYMBOLS, default="standard")
    st.add_argument("--detect-g", action="store_true", help="also strip factors g-1, g+1")
    st.add_argument("--cad-dir", help="write Mathematica and QEPCAD formulas here")
    dp = problem_cmd("dispersion", "continuous and discrete dispersion relations")
    dp.add_argument("--limit", action="append", default=[], metavar="NAME=VALUE")
    dp.add_argument("--k-samples", type=int, default=32)
    dp.add_argument("--tol", type=float, default=1e-9)
    rp = problem_cmd("render", "nodal LaTeX (or text) form")
    rp.add_argument("--marker", help="parameter splitting the scheme into parts (default: time step)")
    rp.add_argument("--pull-out", action="append", metavar="PARAM", help="keep PARAM in numerators")
    rp.add_argument("--text", action="store_true", help="plain-text nodal form")
    rp.add_argument("--aliased", action="store_true", help="render the scheme after alias substitution")
    sub.add_parser("catalog", help="list the approximation rules")
    return ap


COMMANDS = {"generate": cmd_generate, "stability": cmd_stability,
            "dispersion": cmd_dispersion, "render": cmd_render}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "catalog":
            out = cmd_catalog(args)
        else:
            pf = _load(args.problem, args.param)
            out = COMMANDS[args.command](pf, args)
    except Diagnostic as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (scheme.InvalidAssignment, scheme.EliminationEmpty, stability.RangeMissing) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:  # noqa: BLE001 - report and signal an internal error
        traceback.print_exc()
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
