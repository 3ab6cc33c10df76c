"""The trigonometric quotient ring ``K[g, i, sin_s, cos_s] / <i^2+1, sin_s^2+cos_s^2-1>``.

Normal forms use the rewrite rules ``i^2 -> -1`` and ``sin^2 -> 1 - cos^2``, so a
reduced element has degree at most one in ``i`` and in every ``sin``.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Mapping, Sequence

import numpy as np
import sympy

from .kernel import ParamContext
from .poly import LEX, RingContext, ShiftPolynomial

IMAG = "i"


def sin_name(axis: str) -> str:
    return f"sin{axis}"


def cos_name(axis: str) -> str:
    return f"cos{axis}"


def trig_ring(params: ParamContext, axes: Sequence[str], lead: Sequence[str] = ("g",)) -> RingContext:
    """Ring with variables ``lead..., i, sin<a>, cos<a>...`` under lex."""
    names = list(lead) + [IMAG]
    for a in axes:
        names += [sin_name(a), cos_name(a)]
    return RingContext(names, params, LEX)


def trig_pairs(ring: RingContext) -> list[tuple[int, int]]:
    """Index pairs ``(sin, cos)`` present in the ring."""
    out = []
    for k, v in enumerate(ring.variables):
        if v.startswith("sin"):
            c = "cos" + v[3:]
            if c in ring.variables:
                out.append((k, ring.variables.index(c)))
    return out


def reduce_J(p: ShiftPolynomial, sin_squares: bool = True) -> ShiftPolynomial:
    """Normal form modulo the trig relations (``sin_squares=False`` only applies ``i^2 -> -1``)."""
    ring = p.ring
    ii = ring.variables.index(IMAG) if IMAG in ring.variables else None
    pairs = trig_pairs(ring) if sin_squares else []
    acc: dict = {}

    def add(e, c):
        old = acc.get(e)
        s = c if old is None else old + c
        if s:
            acc[e] = s
        else:
            acc.pop(e, None)

    for e, c in p.terms:
        e = list(e)
        if ii is not None and e[ii] >= 2:
            if (e[ii] // 2) % 2:
                c = -c
            e[ii] %= 2
        partial = [(tuple(e), c)]
        for si, ci in pairs:
            nxt = []
            for ee, cc in partial:
                k = ee[si] // 2
                if not k:
                    nxt.append((ee, cc))
                    continue
                # sin^(2k) = (1 - cos^2)^k
                for j in range(k + 1):
                    coef = cc * (comb(k, j) * (-1) ** j)
                    ne = list(ee)
                    ne[si] = ee[si] % 2
                    ne[ci] = ee[ci] + 2 * j
                    nxt.append((tuple(ne), coef))
            partial = nxt
        for ee, cc in partial:
            add(ee, cc)
    return ShiftPolynomial(ring, acc)


def conj(p: ShiftPolynomial) -> ShiftPolynomial:
    """The involution ``i -> -i``."""
    ii = p.ring.variables.index(IMAG)
    return ShiftPolynomial(p.ring, {e: (-c if e[ii] % 2 else c) for e, c in p.terms})


def modulus_squared(p: ShiftPolynomial, sin_squares: bool = True) -> ShiftPolynomial:
    return reduce_J(p * conj(p), sin_squares)


def real_imag(p: ShiftPolynomial) -> tuple[ShiftPolynomial, ShiftPolynomial]:
    """Split a reduced element as ``re + i*im``."""
    ii = p.ring.variables.index(IMAG)
    re, im = {}, {}
    for e, c in reduce_J(p, sin_squares=False).terms:
        if e[ii]:
            ne = list(e)
            ne[ii] = 0
            im[tuple(ne)] = c
        else:
            re[e] = c
    return ShiftPolynomial(p.ring, re), ShiftPolynomial(p.ring, im)


def coefficients_in(p: ShiftPolynomial, var: str) -> list[ShiftPolynomial]:
    """Coefficients of ``p`` as a polynomial in ``var`` (index = power)."""
    k = p.ring.variables.index(var)
    deg = max((e[k] for e in p.as_dict()), default=-1)
    parts: list[dict] = [{} for _ in range(deg + 1)]
    for e, c in p.terms:
        ne = list(e)
        ne[k] = 0
        parts[e[k]][tuple(ne)] = c
    return [ShiftPolynomial(p.ring, d) for d in parts]


def symbols_for(ring: RingContext) -> dict[str, sympy.Symbol]:
    return {n: sympy.Symbol(n) for n in list(ring.params.names) + list(ring.variables)}


def to_sympy(p: ShiftPolynomial, syms: Mapping[str, sympy.Symbol] | None = None):
    """Sympy expression with ``i`` kept as an ordinary symbol."""
    syms = syms or symbols_for(p.ring)
    psyms = [syms[n] for n in p.ring.params.names]
    vsyms = [syms[n] for n in p.ring.variables]
    expr = sympy.Integer(0)
    for e, c in p.terms:
        coeff = c.num.as_expr(*psyms) / c.den.as_expr(*psyms)
        mono = sympy.Integer(1)
        for s, k in zip(vsyms, e):
            if k:
                mono *= s ** k
        expr += coeff * mono
    return expr


def rf_from_sympy(expr, ctx: ParamContext):
    """Rational function in ``ctx`` from a sympy expression in its parameters."""
    from .kernel import RationalFunction

    psyms = [sympy.Symbol(n) for n in ctx.names]
    num, den = sympy.fraction(sympy.together(sympy.sympify(expr)))

    def poly(e):
        terms = sympy.Poly(sympy.expand(e), *psyms).terms() if psyms else [((), sympy.Rational(e))]
        return ctx.poly({m: Fraction(int(c.p), int(c.q)) for m, c in terms})

    return RationalFunction(ctx, poly(num), poly(den))


def from_sympy(expr, ring: RingContext) -> ShiftPolynomial:
    """Inverse of :func:`to_sympy` for expressions polynomial in the ring variables."""
    gens = [sympy.Symbol(v) for v in ring.variables]
    num, den = sympy.fraction(sympy.together(sympy.expand(expr)))
    if den.free_symbols & set(gens):
        raise ValueError("denominator involves ring variables")
    d = rf_from_sympy(den, ring.params)
    out = {}
    for monom, coeff in sympy.Poly(sympy.expand(num), *gens).terms():
        out[tuple(monom)] = rf_from_sympy(coeff, ring.params) / d
    return ShiftPolynomial(ring, out)


def evaluate_numeric(p: ShiftPolynomial, params: Mapping[str, object],
                     trig: Mapping[str, np.ndarray], dtype=np.complex128) -> np.ndarray | complex:
    """Evaluate ``p`` (no ``g``) with ``i = 1j`` and arrays for the sin/cos variables."""
    ring = p.ring
    shape = np.broadcast(*trig.values()).shape if trig else ()
    total = np.zeros(shape, dtype=dtype)
    for e, c in p.terms:
        val = c.eval(params)
        term = np.full(shape, complex(float(val)), dtype=dtype)
        for name, k in zip(ring.variables, e):
            if not k:
                continue
            if name == IMAG:
                term = term * (1j ** k)
            elif name in trig:
                term = term * np.asarray(trig[name], dtype=dtype) ** k
            else:
                raise ValueError(f"variable {name} has no numeric value")
        total = total + term
    return total
