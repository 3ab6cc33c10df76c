"""Von Neumann stability analysis of difference schemes.

The stability morphism sends ``Tt -> g`` and each spatial shift to a point on
the unit circle written with ``sin``/``cos`` variables of the trig quotient
ring.  Two conventions are supported for that point:

``standard``  ``Tx -> cos + i*sin``
``singular``  ``Tx -> sin + i*cos`` (the map used in classic Singular sessions)

Both describe ``e^{iφ}`` for some phase, so the stability verdict does not
depend on the choice; only the printed forms differ.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np
import sympy

from .kernel import RationalFunction
from .poly import RingContext, RingMorphism, ShiftPolynomial, apply_morphism, exact_quotient
from .trig import (
    IMAG,
    coefficients_in,
    conj,
    cos_name,
    evaluate_numeric,
    reduce_J,
    sin_name,
    to_sympy,
    trig_ring,
)

SYMBOLS = ("standard", "singular")


class DegreeUnsupported(ValueError):
    pass


class RangeMissing(KeyError):
    pass


def spatial_axes(ring: RingContext) -> list[str]:
    return [v[1:] for v in ring.variables if v.startswith("T") and v != "Tt"]


@dataclass
class StabilityPolynomial:
    """``χ(P)`` reduced modulo the trig relations, possibly with unit factors removed."""

    poly: ShiftPolynomial
    axes: tuple[str, ...]
    symbol: str = "standard"
    unit_factors: list[ShiftPolynomial] = field(default_factory=list)

    @property
    def ring(self) -> RingContext:
        return self.poly.ring

    @property
    def degree(self) -> int:
        return self.poly.degree("g")

    def coefficients(self) -> list[ShiftPolynomial]:
        """``[d_0, d_1, ...]`` with ``poly = Σ d_a g^a``."""
        return coefficients_in(self.poly, "g")

    def free_params(self) -> set[str]:
        out: set[str] = set()
        for _, c in self.poly.terms:
            out |= c.free_symbols()
        return out

    def __str__(self):
        return str(self.poly)


def chi(scheme, axes: Sequence[str] | None = None, symbol: str = "standard") -> StabilityPolynomial:
    """Apply the stability morphism and reduce modulo the trig relations."""
    p = getattr(scheme, "polynomial", scheme)
    if symbol not in SYMBOLS:
        raise ValueError(f"symbol must be one of {SYMBOLS}")
    axes = tuple(axes if axes is not None else spatial_axes(p.ring))
    target = trig_ring(p.ring.params, axes)
    i = target.var(IMAG)
    images = []
    for v in p.ring.variables:
        if v == "Tt":
            images.append(target.var("g"))
        else:
            a = v[1:]
            s, c = target.var(sin_name(a)), target.var(cos_name(a))
            images.append(c + i * s if symbol == "standard" else s + i * c)
    phi = RingMorphism(p.ring, target, images)
    return StabilityPolynomial(reduce_J(apply_morphism(phi, p)), axes, symbol)


def unit_pool(ring: RingContext, axes: Sequence[str]) -> list[ShiftPolynomial]:
    i = ring.var(IMAG)
    pool = []
    for a in axes:
        s, c = ring.var(sin_name(a)), ring.var(cos_name(a))
        pool += [c + i * s, c - i * s, s + i * c, s - i * c]
    pool.append(i)
    return pool


def _size(p: ShiftPolynomial) -> tuple[int, int]:
    return (len(p), p.degree())


def strip_unimodular_factors(sp: StabilityPolynomial, detect_g: bool = False) -> StabilityPolynomial:
    """Remove factors ``f`` with ``f*conj(f) = 1`` modulo the relations.

    Division by such an ``f`` is multiplication by ``conj(f)``; a factor is
    accepted when the quotient has fewer terms than the current polynomial.
    With ``detect_g`` the factors ``g - 1`` and ``g + 1`` are split off too
    (they are reported in ``unit_factors`` with the others).
    """
    cur = sp.poly
    found = list(sp.unit_factors)
    pool = unit_pool(cur.ring, sp.axes)
    while cur:
        best = None
        for f in pool:
            q = exact_quotient(cur, f)
            cand = reduce_J(q) if q is not None else reduce_J(conj(f) * cur)
            if _size(cand) < _size(cur) and (best is None or _size(cand) < _size(best[1])):
                best = (f, cand)
        if best is None:
            break
        found.append(best[0])
        cur = best[1]
    if detect_g:
        g = cur.ring.var("g")
        for f in (g - 1, g + 1):
            while cur.degree("g") > 0:
                q = exact_quotient(cur, f)
                if q is None:
                    break
                found.append(f)
                cur = q
    return StabilityPolynomial(_positive_lead(cur), sp.axes, sp.symbol, found)


def _positive_lead(p: ShiftPolynomial) -> ShiftPolynomial:
    """Multiply by -1 if needed so the top g-coefficient has a positive leading number."""
    if not p:
        return p
    top = coefficients_in(p, "g")[-1]
    return -p if top.terms[0][1].num.LC < 0 else p


# -- symbolic conditions ---------------------------------------------------------


@dataclass
class SignContext:
    positive: frozenset[str] = frozenset()
    nonnegative: frozenset[str] = frozenset()
    bounded: frozenset[str] = frozenset()          # trig variables in [-1, 1]

    def symbols(self, names: Iterable[str]) -> set:
        return {sympy.Symbol(n) for n in names}


def _monomial_sign(monom: dict, ctx: SignContext) -> bool:
    """True if the monomial is nonnegative on the domain (given nonnegative σ variables)."""
    for s, k in monom.items():
        name = str(s)
        if name.startswith("_sigma") or name in ctx.positive or name in ctx.nonnegative:
            continue
        if k % 2:
            return False
    return True


def factor_sign(f, ctx: SignContext) -> str | None:
    """Known sign of a polynomial on the domain: ``pos``, ``nonneg``, ``neg``, ``nonpos`` or None.

    Each bounded trig variable ``t`` is tried as ``1 - σ`` and ``σ - 1`` with
    ``σ >= 0``; the sign is known when every monomial is then nonnegative.
    """
    f = sympy.expand(f)
    if f.is_number:
        return "pos" if f > 0 else ("neg" if f < 0 else "nonneg")
    trig = sorted((s for s in f.free_symbols if str(s) in ctx.bounded), key=str)
    options = [{}]
    for t in trig:
        sig = sympy.Symbol(f"_sigma_{t}")
        options = [{**o, t: 1 - sig} for o in options] + [{**o, t: sig - 1} for o in options]
    for flip in (1, -1):
        for subs in options:
            g = sympy.expand(flip * f.subs(subs))
            if g.is_number:
                if g > 0:
                    return "pos" if flip == 1 else "neg"
                continue
            poly = sympy.Poly(g, *sorted(g.free_symbols, key=str))
            terms = poly.terms()
            if any(c < 0 or not _monomial_sign(dict(zip(poly.gens, m)), ctx) for m, c in terms):
                continue
            strict = any(all(k == 0 or str(v) in ctx.positive for v, k in zip(poly.gens, m))
                         for m, _ in terms)
            if flip == 1:
                return "pos" if strict else "nonneg"
            return "neg" if strict else "nonpos"
    return None


@dataclass
class Condition:
    """``expr >= 0`` (sympy), or a constant truth value."""

    expr: object = None
    truth: bool | None = None

    @property
    def trivial(self) -> bool:
        return self.truth is not None

    def text(self) -> str:
        if self.truth is True:
            return "1 <= 1"
        if self.truth is False:
            return "1 <= 0"
        return f"{_fmt(sympy.factor(self.expr))} >= 0"

    def holds(self, point: Mapping[str, object]) -> bool:
        if self.truth is not None:
            return self.truth
        val = self.expr.subs({sympy.Symbol(k): sympy.Rational(str(Fraction(v))) for k, v in point.items()})
        val = sympy.nsimplify(val)
        if val.free_symbols:
            raise RangeMissing(f"no value for {sorted(map(str, val.free_symbols))}")
        return bool(val >= 0)


def _fmt(expr) -> str:
    return str(expr).replace("**", "^")


def simplify_condition(expr, ctx: SignContext) -> Condition:
    """Drop factors of known sign from ``expr >= 0``."""
    expr = sympy.expand(expr)
    if expr == 0:
        return Condition(truth=True)
    coeff, factors = sympy.factor_list(expr)
    sign = 1 if coeff > 0 else -1
    kept = []
    for f, k in factors:
        if k % 2 == 0:
            continue                # even power: nonnegative, may vanish
        s = factor_sign(f, ctx)
        if s is None:
            kept.append(f)
        elif s in ("neg", "nonpos"):
            sign = -sign
    if not kept:
        return Condition(truth=sign > 0)
    body = sympy.Mul(*kept) * sign
    s = factor_sign(body, ctx)
    if s in ("pos", "nonneg"):
        return Condition(truth=True)
    if s == "neg":
        return Condition(truth=False)
    return Condition(expr=sympy.expand(body))


def eliminate_trig(cond: Condition, trig: Sequence[str], ctx: SignContext) -> list[Condition] | None:
    """∀ t ∈ [-1,1]: expr >= 0, when expr is multilinear in the trig variables."""
    if cond.trivial:
        return [cond]
    syms = [sympy.Symbol(t) for t in trig if sympy.Symbol(t) in cond.expr.free_symbols]
    if not syms:
        return [cond]
    poly = sympy.Poly(cond.expr, *syms)
    if any(poly.degree(s) > 1 for s in syms):
        return None
    out: list[Condition] = []
    for corner in itertools.product((1, -1), repeat=len(syms)):
        c = simplify_condition(cond.expr.subs(dict(zip(syms, corner))), ctx)
        if c.truth is True:
            continue
        if c.truth is False:
            return [c]
        if not any(sympy.expand(c.expr - o.expr) == 0 for o in out):
            out.append(c)
    return out or [Condition(truth=True)]


@dataclass
class ConditionReport:
    degree: int
    kind: str
    raw: list = field(default_factory=list)                 # sympy exprs, each >= 0
    conditions: list[Condition] = field(default_factory=list)
    eliminated: list[Condition] | None = None
    trig: tuple[str, ...] = ()

    def holds(self, point: Mapping[str, object]) -> bool | None:
        if self.eliminated is None:
            return None
        return all(c.holds(point) for c in self.eliminated)

    def text(self) -> str:
        conds = self.eliminated if self.eliminated is not None else self.conditions
        real = [c for c in conds if c.truth is not True]
        if not real:
            return "1 <= 1"
        return " && ".join(c.text() for c in real)


def _trig_vars(sp: StabilityPolynomial) -> list[str]:
    out = []
    for a in sp.axes:
        out += [sin_name(a), cos_name(a)]
    return out


def _real_form(p: ShiftPolynomial, axes: Sequence[str]) -> ShiftPolynomial:
    """Keep a single trig variable per axis when possible, else the full normal form."""
    for a in axes:
        s, c = sin_name(a), cos_name(a)
        used = p.variables_used()
        if s in used and c in used:
            return reduce_J(p)
    return p


def closed_form_conditions(sp: StabilityPolynomial, positive: Iterable[str] = (),
                           nonnegative: Iterable[str] = ()) -> ConditionReport:
    """Root-modulus conditions for stability polynomials of degree at most two."""
    ctx = SignContext(frozenset(positive), frozenset(nonnegative), frozenset(_trig_vars(sp)))
    trig = _trig_vars(sp)
    coeffs = sp.coefficients()
    deg = len(coeffs) - 1
    syms = None
    if deg <= 0:
        return ConditionReport(max(deg, 0), "constant", [], [Condition(truth=True)], [Condition(truth=True)], tuple(trig))
    if deg > 2:
        raise DegreeUnsupported(f"degree {deg} in g: use numeric_certify or export_cad_formula")
    ring = sp.ring
    ii = ring.variables.index(IMAG)

    def sym(p):
        return to_sympy(p)

    if deg == 1:
        d0, d1 = coeffs
        m0 = reduce_J(d0 * conj(d0), sin_squares=False)
        m1 = reduce_J(d1 * conj(d1), sin_squares=False)
        F = _real_form(m1 - m0, sp.axes)
        raw = [sym(F)]
        kind = "degree-1"
    else:
        a0, a1, a2 = coeffs
        if any(e[ii] for c in coeffs for e, _ in c.terms):
            return ConditionReport(2, "degree-2-complex", [], [], None, tuple(trig))
        a0, a1, a2 = (sym(c) for c in (a0, a1, a2))
        if factor_sign(a2, ctx) == "pos":
            raw = [a2 - a0, a2 + a0, a2 + a0 - a1, a2 + a0 + a1]
        else:
            raw = [a2 ** 2 - a0 ** 2, a2 ** 2 + a0 * a2 - a1 * a2, a2 ** 2 + a0 * a2 + a1 * a2]
        kind = "degree-2-real"
    conds = [simplify_condition(r, ctx) for r in raw]
    eliminated: list[Condition] | None = []
    for c in conds:
        e = eliminate_trig(c, trig, ctx)
        if e is None:
            eliminated = None
            break
        eliminated.extend(e)
    if eliminated is not None:
        if any(c.truth is False for c in eliminated):
            eliminated = [Condition(truth=False)]
        else:
            uniq: list[Condition] = []
            for c in eliminated:
                if c.truth is True:
                    continue
                if not any(sympy.expand(c.expr - u.expr) == 0 for u in uniq):
                    uniq.append(c)
            eliminated = uniq or [Condition(truth=True)]
    return ConditionReport(deg, kind, raw, conds, eliminated, tuple(trig))


def half_angle_form(sp: StabilityPolynomial) -> list:
    """Coefficients ``[d_0, d_1, ...]`` with ``cos -> 1 - 2*sin(β/2)^2`` (display only)."""
    out = []
    for c in sp.coefficients():
        e = to_sympy(c)
        for a in sp.axes:
            h = sympy.Symbol(f"sin(b{a}/2)")
            e = e.subs(sympy.Symbol(cos_name(a)), 1 - 2 * h ** 2)
        out.append(sympy.expand(e))
    return out


def half_angle_text(sp: StabilityPolynomial) -> str:
    parts = []
    coeffs = half_angle_form(sp)
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if c == 0:
            continue
        mono = "" if k == 0 else ("g" if k == 1 else f"g^{k}")
        if not mono:
            parts.append(_fmt(c))
        elif c == 1:
            parts.append(mono)
        else:
            parts.append(f"({_fmt(c)})*{mono}")
    return "+".join(parts).replace("+-", "-") or "0"


# -- numeric certification -------------------------------------------------------


@dataclass
class Witness:
    params: dict[str, Fraction]
    phases: tuple[float, ...]
    modulus: float
    grid_index: tuple[int, ...]


@dataclass
class StabilityVerdict:
    classification: str
    witnesses: list[Witness] = field(default_factory=list)
    marginal: list[Witness] = field(default_factory=list)
    boundary_max: float = 0.0
    points: int = 0
    violating_points: int = 0
    max_modulus: float = 0.0
    condition: str | None = None

    @property
    def stable(self) -> bool:
        return not self.witnesses

    def report(self) -> str:
        lines = [f"verdict: {self.classification}", f"parameter-points: {self.points}",
                 f"violating-points: {self.violating_points}", f"max-modulus: {self.max_modulus:.12g}",
                 f"boundary-max-modulus: {self.boundary_max:.12g}", f"marginal: {len(self.marginal)}"]
        if self.condition:
            lines.append(f"condition: {self.condition}")
        for w in self.witnesses:
            ps = ",".join(f"{k}={v}" for k, v in w.params.items())
            ph = ",".join(f"{x:.6f}" for x in w.phases)
            lines.append(f"witness: params[{ps}] phase[{ph}] modulus={w.modulus:.12g}")
        return "\n".join(lines)


def _param_grid(names: Sequence[str], ranges: Mapping[str, object]) -> list[list[Fraction]]:
    out = []
    for n in names:
        if n not in ranges:
            raise RangeMissing(f"no range for parameter {n}")
        r = ranges[n]
        if isinstance(r, tuple) and len(r) == 3 and isinstance(r[2], int):
            lo, hi, k = Fraction(r[0]), Fraction(r[1]), r[2]
            vals = [lo] if k == 1 else [lo + (hi - lo) * j / (k - 1) for j in range(k)]
        elif isinstance(r, (list, tuple)):
            vals = [Fraction(v) for v in r]
        else:
            vals = [Fraction(r)]
        out.append(vals)
    return out


def _trig_values(sp: StabilityPolynomial, phases: Sequence[np.ndarray]) -> dict[str, np.ndarray]:
    """sin/cos variable values making each spatial image equal to ``e^{iφ}``."""
    vals = {}
    for a, ph in zip(sp.axes, phases):
        if sp.symbol == "standard":
            vals[sin_name(a)], vals[cos_name(a)] = np.sin(ph), np.cos(ph)
        else:
            vals[sin_name(a)], vals[cos_name(a)] = np.cos(ph), np.sin(ph)
    return vals


def _roots(coeffs: np.ndarray, polish: int = 3) -> np.ndarray:
    """All roots for a batch of polynomials; ``coeffs[:, k]`` is the coefficient of g^k."""
    n, m = coeffs.shape
    deg = m - 1
    if deg == 0:
        return np.zeros((n, 0), dtype=np.clongdouble)
    lead = coeffs[:, -1]
    scale = np.max(np.abs(coeffs), axis=1)
    degenerate = np.abs(lead) <= 1e-14 * np.where(scale > 0, scale, 1)
    roots = np.full((n, deg), np.nan + 0j, dtype=np.clongdouble)
    ok = ~degenerate
    if ok.any():
        c = (coeffs[ok] / lead[ok, None]).astype(np.complex128)
        comp = np.zeros((c.shape[0], deg, deg), dtype=np.complex128)
        comp[:, 0, :] = -c[:, -2::-1]
        if deg > 1:
            comp[:, np.arange(1, deg), np.arange(deg - 1)] = 1
        r = np.linalg.eigvals(comp).astype(np.clongdouble)
        cl = coeffs[ok].astype(np.clongdouble)
        for _ in range(polish):
            p = np.zeros_like(r)
            dp = np.zeros_like(r)
            for k in range(deg, -1, -1):
                dp = dp * r + p
                p = p * r + cl[:, k, None]
            step = np.where(np.abs(dp) > 0, p / np.where(np.abs(dp) > 0, dp, 1), 0)
            r = r - step
        roots[ok] = r
    for idx in np.nonzero(degenerate)[0]:
        poly = coeffs[idx].astype(np.complex128)[::-1]
        nz = np.nonzero(np.abs(poly) > 1e-14 * max(scale[idx], 1e-300))[0]
        if nz.size == 0:
            continue
        rr = np.roots(poly[nz[0]:])
        roots[idx, :rr.size] = rr
    return roots


def numeric_certify(sp: StabilityPolynomial, param_ranges: Mapping[str, object],
                    beta_samples: int = 64, tol: float = 1e-9, max_witnesses: int = 25,
                    condition: str | None = None) -> StabilityVerdict:
    """Sample phases in (0, π) per axis and parameters over a grid; flag roots outside the unit disk."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    names = [n for n in sp.ring.params.names if n in sp.free_params()]
    grid = _param_grid(names, param_ranges)
    coeffs = sp.coefficients()
    m = len(sp.axes)
    base = np.pi * np.arange(1, beta_samples + 1, dtype=np.longdouble) / (beta_samples + 1)
    mesh = np.meshgrid(*([base] * m), indexing="ij") if m else []
    phases = [g.ravel() for g in mesh]
    bmesh = np.meshgrid(*([np.array([0, np.pi], dtype=np.longdouble)] * m), indexing="ij") if m else []
    bphases = [g.ravel() for g in bmesh]

    witnesses, marginal = [], []
    violating, max_mod, bmax = 0, 0.0, 0.0
    pidx_all = list(itertools.product(*[range(len(v)) for v in grid]))
    for pidx in pidx_all:
        point = {n: grid[k][j] for k, (n, j) in enumerate(zip(names, pidx))}
        for which, ph in (("interior", phases), ("boundary", bphases)):
            trig = _trig_values(sp, ph)
            size = ph[0].size if m else 1
            cols = []
            for c in coeffs:
                v = evaluate_numeric(c, point, trig, dtype=np.clongdouble)
                cols.append(np.broadcast_to(v, (size,)) if np.ndim(v) else np.full(size, v, dtype=np.clongdouble))
            C = np.stack(cols, axis=1)
            R = _roots(C)
            mod = np.abs(R).astype(np.float64)
            if mod.size == 0:
                continue
            # rows without finite roots (identically vanishing coefficients) count as 0
            worst = np.nan_to_num(np.fmax.reduce(mod, axis=1), nan=0.0)
            if which == "boundary":
                bmax = max(bmax, float(worst.max()))
                continue
            max_mod = max(max_mod, float(worst.max()))
            bad = np.nonzero(worst > 1 + tol)[0]
            if bad.size:
                violating += 1
                for b in bad[: max(0, max_witnesses - len(witnesses))]:
                    bidx = np.unravel_index(b, (beta_samples,) * m) if m else ()
                    witnesses.append(Witness(dict(point), tuple(float(p[b]) for p in ph), float(worst[b]),
                                             tuple(pidx) + tuple(int(x) for x in bidx)))
            if R.shape[1] > 1:
                d = np.abs(R[:, :, None] - R[:, None, :]).astype(np.float64)
                d[:, np.arange(R.shape[1]), np.arange(R.shape[1])] = np.inf
                rep = np.nonzero((np.nanmin(d, axis=(1, 2)) < 1e-6) & (worst >= 1 - tol))[0]
                for b in rep[:max_witnesses]:
                    bidx = np.unravel_index(b, (beta_samples,) * m) if m else ()
                    marginal.append(Witness(dict(point), tuple(float(p[b]) for p in ph), float(worst[b]),
                                            tuple(pidx) + tuple(int(x) for x in bidx)))
    witnesses.sort(key=lambda w: w.grid_index)
    marginal.sort(key=lambda w: w.grid_index)
    if violating == 0:
        cls = "stable-sampled" if not marginal else "marginal-sampled"
    elif violating < len(pidx_all):
        cls = "conditionally-stable-sampled"
    else:
        cls = "violation"
    return StabilityVerdict(cls, witnesses, marginal, bmax, len(pidx_all), violating, max_mod, condition)


def verify_witness(sp: StabilityPolynomial, w: Witness) -> float:
    """Recompute the largest root modulus at a witness with numpy's polynomial roots."""
    trig = _trig_values(sp, [np.array([p], dtype=np.float64) for p in w.phases])
    coeffs = [complex(np.asarray(evaluate_numeric(c, w.params, trig)).ravel()[0]) for c in sp.coefficients()]
    return float(max(abs(r) for r in np.roots(coeffs[::-1])))


# -- CAD export --------------------------------------------------------------------


def _cad_text(expr, svar: sympy.Symbol | None) -> str:
    expr = sympy.expand(expr)
    if svar is not None and svar in expr.free_symbols and sympy.Poly(expr, svar).degree() == 1:
        f1 = expr.subs(svar, 1)
        q = sympy.factor(-sympy.diff(expr, svar))
        head = f"{_fmt(q)}*(1-{svar})" if q != 1 else f"(1-{svar})"
        if f1 == 0:
            return head
        tail = _fmt(sympy.factor(f1))
        return f"{head} - {tail[1:]}" if tail.startswith("-") else f"{head} + {tail}"
    return _fmt(sympy.factor(expr))


def export_cad_formula(report: ConditionReport, assumptions: Sequence[str] = (),
                       solve_for: Sequence[str] | None = None) -> dict[str, str]:
    """Quantified formula in Mathematica ``Reduce`` and QEPCAD syntax.

    The trig variable of each axis (at most one per axis) is renamed to ``s``
    (one axis) or ``s<axis>``.
    """
    conds = [c for c in report.conditions if c.truth is not True]
    if any(c.truth is False for c in conds):
        bodies = ["1 <= 0"]
        used_trig: list[str] = []
    else:
        used_trig = sorted({str(s) for c in conds for s in c.expr.free_symbols if str(s) in report.trig},
                           key=report.trig.index)
        bodies = []
    if len(used_trig) == 1:
        rename = {used_trig[0]: sympy.Symbol("s")}
    else:
        rename = {t: sympy.Symbol("s" + t[3:]) for t in used_trig}
    svars = [rename[t] for t in used_trig]
    for c in conds:
        if c.truth is False:
            continue
        e = c.expr.subs({sympy.Symbol(k): v for k, v in rename.items()})
        bodies.append(f"{_cad_text(e, svars[0] if len(svars) == 1 else None)} >= 0")
    if not bodies:
        bodies = ["1 <= 1"]
    body = " && ".join(bodies)
    free = sorted({str(s) for c in conds if c.expr is not None for s in c.expr.free_symbols} - set(used_trig))
    solve = list(solve_for) if solve_for is not None else free
    pre = " && ".join(list(assumptions))
    if svars:
        qv = str(svars[0]) if len(svars) == 1 else "{" + ", ".join(map(str, svars)) + "}"
        rng = " && ".join(f"-1 <= {s} <= 1" for s in svars)
        formula = f"ForAll[{qv}, {rng}, {body}]"
    else:
        formula = body
    mma = "Reduce[" + (pre + " && " if pre else "") + formula + ", {" + ", ".join(solve) + "}]"

    def qe(text: str) -> str:
        return text.replace("*", " ").replace("&&", "/\\")

    allvars = solve + [v for v in free if v not in solve] + [str(s) for s in svars]
    quant = "".join(f"(A {s})" for s in svars)
    guard = " /\\ ".join(f"{s} >= -1 /\\ {s} <= 1" for s in svars)
    inner = f"[{qe(body)}]"
    matrix = f"{quant}[[{guard}] ==> {inner}]" if svars else inner
    qepcad = "\n".join([
        "[stability]",
        "(" + ",".join(allvars) + ")",
        str(len(allvars) - len(svars)),
        matrix + ".",
        *([f"assume [{qe(pre)}]."] if pre else []),
        "finish",
    ])
    return {"mathematica": mma, "qepcad": qepcad}
