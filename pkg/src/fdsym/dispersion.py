"""Continuous and discrete dispersion relations.

For the PDE a Fourier node ``e^{i(<k,x> - ωt)}`` turns ``∂_t`` into ``-iω`` and
``∂_{x_j}`` into ``i k_j``.  For a scheme the shifts act by
``Tt -> cos_t - i sin_t`` and ``Tx_j -> cos_j + i sin_j`` with
``cos_t = cos(ωΔt)`` and ``cos_j = cos(k_j Δx_j)``; everything stays inside the
trig quotient ring.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import sympy

from .approx import TIME
from .poly import RingMorphism, ShiftPolynomial, apply_morphism, primitive
from .trig import IMAG, conj, cos_name, reduce_J, sin_name, to_sympy, trig_ring

OMEGA = sympy.Symbol("w")


def wavenumber(axis: str) -> sympy.Symbol:
    return sympy.Symbol(f"k{axis}", positive=True)


@dataclass
class SolvedForm:
    """``lhs = rhs``; ``lhs`` is ``w``, ``cost`` or ``cost - i*sint``."""

    lhs: str
    rhs: object

    def text(self) -> str:
        return f"{self.lhs} = {str(self.rhs).replace('**', '^')}"


@dataclass
class DispersionRelation:
    kind: str                                    # "continuous" or "discrete"
    equation: object                             # sympy expression (= 0)
    solved: list[SolvedForm] = field(default_factory=list)
    axes: tuple[str, ...] = ()
    steps: dict[str, str] = field(default_factory=dict)
    polynomial: ShiftPolynomial | None = None    # discrete: reduced ring element

    def text(self) -> str:
        lines = [f"{self.kind}-equation: {str(self.equation).replace('**', '^')} = 0"]
        lines += [f"solved: {s.text()}" for s in self.solved]
        return "\n".join(lines)

    # numeric branches --------------------------------------------------------
    def omegas(self, k: Mapping[str, float], values: Mapping[str, float]) -> list[complex]:
        """All ω branches (principal) at wavenumbers ``k`` and numeric parameter values."""
        subs = {sympy.Symbol(n): v for n, v in values.items()}
        subs.update({sympy.Symbol(n, positive=True): v for n, v in values.items()})
        out = []
        if self.kind == "continuous":
            subs.update({wavenumber(a): k[a] for a in self.axes})
            for s in self.solved:
                out.append(complex(sympy.N(s.rhs.subs(subs), 30)))
            return out
        dt = float(values[self.steps[TIME]])
        for a in self.axes:
            dx = float(values[self.steps[a]])
            subs[sympy.Symbol(cos_name(a))] = math.cos(k[a] * dx)
            subs[sympy.Symbol(sin_name(a))] = math.sin(k[a] * dx)
        for s in self.solved:
            val = complex(sympy.N(s.rhs.subs(subs), 30))
            if s.lhs == "cost":
                w = complex(np.arccos(np.clip(val.real, -1, 1))) if abs(val.imag) < 1e-15 else \
                    complex(cmath.acos(val))
                out += [w / dt, -w / dt]
            else:
                # e^{-iωΔt} = val
                out.append(1j * cmath.log(val) / dt)
        return out


def continuous_dispersion(pde, solve: bool = True) -> DispersionRelation:
    """CDE of a constant-coefficient PDE and, for degree <= 2 in ω, its solutions."""
    axes = tuple(pde.spatial)
    ctx = pde.params
    psyms = [sympy.Symbol(n, positive=True) for n in ctx.names]
    eq = sympy.Integer(0)
    for beta, c in pde.coefficients.items():
        coeff = c.num.as_expr(*psyms) / c.den.as_expr(*psyms)
        term = (-sympy.I * OMEGA) ** beta.order(TIME)
        for a in axes:
            term *= (sympy.I * wavenumber(a)) ** beta.order(a)
        eq += coeff * term
    eq = sympy.expand(eq)
    solved = []
    if solve:
        deg = sympy.Poly(eq, OMEGA).degree()
        if 1 <= deg <= 2:
            roots = sympy.solve(eq, OMEGA)
            roots = sorted(roots, key=lambda r: sympy.default_sort_key(r))
            solved = [SolvedForm("w", sympy.simplify(r)) for r in roots]
    return DispersionRelation("continuous", eq, solved, axes)


def _units(ring, axes: Sequence[str]) -> list[ShiftPolynomial]:
    i = ring.var(IMAG)
    out = []
    for a in axes:
        s, c = ring.var(sin_name(a)), ring.var(cos_name(a))
        out += [c + i * s, c - i * s]
    out.append(i)
    return out


def discrete_dispersion(scheme, steps: Mapping[str, str] | None = None) -> DispersionRelation:
    """DDE of a scheme, reduced, stripped of unit factors and made primitive."""
    p = getattr(scheme, "polynomial", scheme)
    axes = [v[1:] for v in p.ring.variables if v != "Tt"]
    ring = trig_ring(p.ring.params, [TIME] + axes, lead=())
    i = ring.var(IMAG)
    images = []
    for v in p.ring.variables:
        a = v[1:]
        s, c = ring.var(sin_name(a)), ring.var(cos_name(a))
        images.append(c - i * s if a == TIME else c + i * s)
    cur = reduce_J(apply_morphism(RingMorphism(p.ring, ring, images), p))
    pool = _units(ring, [TIME] + axes)
    while cur:
        best = None
        for f in pool:
            cand = reduce_J(conj(f) * cur)
            if len(cand) < len(cur) and (best is None or len(cand) < len(best)):
                best = cand
        if best is None:
            break
        cur = best
    cur = primitive(cur)[1]
    expr = sympy.expand(to_sympy(cur))
    rel = DispersionRelation("discrete", expr, [], tuple(axes), dict(steps or {}), cur)
    rel.solved = _solve_discrete(cur)
    return rel


def _solve_discrete(p: ShiftPolynomial) -> list[SolvedForm]:
    ring = p.ring
    syms = {n: sympy.Symbol(n) for n in ring.variables}
    expr = to_sympy(p)
    ct, st, I = syms[cos_name(TIME)], syms[sin_name(TIME)], syms[IMAG]
    poly = sympy.Poly(expr, ct, st, I)
    if poly.total_degree() == 0:
        return []
    # cos_t isolation: linear in cost, no sint
    if poly.degree(st) == 0 and poly.degree(ct) == 1 and poly.degree(I) == 0:
        a = poly.coeff_monomial(ct)
        b = sympy.expand(expr - a * ct)
        return [SolvedForm("cost", sympy.cancel(-b / a))]
    # α(cost - i sint) + β with α, β free of the time angle
    a = poly.coeff_monomial(ct)
    if a != 0 and sympy.expand(poly.coeff_monomial(st * I) + a) == 0:
        b = sympy.expand(expr - a * (ct - I * st))
        if not (b.free_symbols & {ct, st}):
            rhs = sympy.cancel((-b / a).subs(I, sympy.I))
            return [SolvedForm("cost - i*sint", rhs)]
    return []


def back_substitute(rel: DispersionRelation, form: SolvedForm) -> object:
    """Residual of the equation after substituting a solved form (0 when consistent)."""
    if rel.kind == "continuous":
        return sympy.simplify(rel.equation.subs(OMEGA, form.rhs))
    ct = sympy.Symbol(cos_name(TIME))
    st = sympy.Symbol(sin_name(TIME))
    I = sympy.Symbol(IMAG)
    eq = rel.equation
    if form.lhs == "cost":
        return sympy.simplify(eq.subs(ct, form.rhs))
    # cost - i sint = rhs  ->  cost = rhs + i sint
    return sympy.simplify(sympy.expand(eq.subs(I, sympy.I).subs(ct, form.rhs + sympy.I * st)))


@dataclass
class LimitReport:
    ok: bool
    max_error: float
    samples: int
    worst_k: dict[str, float] = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def _fold(x: complex, period: float) -> complex:
    re = (x.real + period / 2) % period - period / 2
    return complex(re, x.imag)


def dispersion_limit_check(rel: DispersionRelation, limit: Mapping[str, object],
                           reference: DispersionRelation, values: Mapping[str, float],
                           samples: int = 32, tol: float = 1e-9) -> LimitReport:
    """Compare ω(k) of ``rel`` at ``limit`` with the reference relation on sampled k.

    ``values`` supplies numbers for the remaining parameters and step sizes.
    Differences are folded modulo ``2π/Δt``.
    """
    if rel.kind != "discrete" or not rel.solved:
        raise ValueError("limit check needs a solved discrete relation")
    vals = dict(values)
    vals.update({k: float(v) for k, v in limit.items()})
    dt = float(vals[rel.steps[TIME]])
    period = 2 * math.pi / dt
    worst, worst_k = 0.0, {}
    for j in range(1, samples + 1):
        k = {}
        for a in rel.axes:
            dx = float(vals[rel.steps[a]])
            k[a] = math.pi / dx * j / (samples + 1)
        disc = rel.omegas(k, vals)
        ref = reference.omegas(k, vals)
        err = min(abs(_fold(d - r, period)) for d in disc for r in ref) if disc and ref else math.inf
        if err > worst:
            worst, worst_k = err, dict(k)
    return LimitReport(worst < tol, worst, samples, worst_k)
