"""Nodal presentation of schemes as LaTeX and as plain text.

A monomial ``Tt^a Tx^b Ty^c`` acting on ``u`` is the grid value
``u^{n+a}_{j+b,k+c}``.  The LaTeX renderer pulls a common coefficient out of
every part, keeping chosen parameters in numerators; the text form round-trips
through :func:`parse_nodal_text`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Mapping, Sequence

import sympy

from .kernel import RationalFunction, pp_gcd, to_fraction
from .poly import RingContext, ShiftPolynomial
from .trig import rf_from_sympy

TEX_NAMES: dict[str, str] = {
    "dt": r" \tri t",
    "dh": r" \tri h",
    "dx": r" \tri x",
    "dy": r" \tri y",
    "dz": r" \tri z",
    "V": r" \nu",
    "ro": r" \rho",
    "theta": r" \theta",
    "lambda": r" \lambda",
}

SPATIAL_INDICES = "jklm"
TIME_VAR = "Tt"


@dataclass(frozen=True)
class NodalTerm:
    label: str
    time: int
    space: tuple[int, ...]
    coefficient: RationalFunction

    def node_tex(self) -> str:
        return f"{self.label}^{{{_offset('n', self.time)}}}_{{{_space_sub(self.space)}}}"

    def node_text(self) -> str:
        return f"{self.label}[{_offset('n', self.time)}]" + "".join(
            f"[{_offset(SPATIAL_INDICES[k], s)}]" for k, s in enumerate(self.space))


def _offset(base: str, k: int) -> str:
    if k > 0:
        return f"{base}+{k}"
    if k < 0:
        return f"{base}{k}"
    return base


def _space_sub(space: Sequence[int]) -> str:
    return ",".join(_offset(SPATIAL_INDICES[k], s) for k, s in enumerate(space))


def _split_axes(ring: RingContext) -> tuple[int | None, list[int]]:
    t = ring.variables.index(TIME_VAR) if TIME_VAR in ring.variables else None
    return t, [k for k, v in enumerate(ring.variables) if k != t]


def nodal_terms(p: ShiftPolynomial, label: str = "u") -> list[NodalTerm]:
    """Terms of ``p`` in ring order (largest first)."""
    t, space = _split_axes(p.ring)
    return [NodalTerm(label, e[t] if t is not None else 0, tuple(e[k] for k in space), c)
            for e, c in p.terms]


# -- LaTeX of parameter expressions ------------------------------------------


def _tex_name(name: str, names: Mapping[str, str]) -> str:
    return names.get(name, name)


def _tex_monomial(ctx, m, coeff: int, names: Mapping[str, str]) -> str:
    out = ""
    mag = abs(coeff)
    if mag != 1 or not any(m):
        out = str(mag)
    for name, k in zip(ctx.names, m):
        if not k:
            continue
        tok = _tex_name(name, names)
        if out and not tok.startswith(" "):
            out += " "
        out += tok
        if k > 1:
            out += (" " if tok.startswith(" ") else "") + f"^{{{k}}}"
    return ("-" if coeff < 0 else "") + out


def _tex_poly(ctx, p, names: Mapping[str, str]) -> str:
    """Integer-coefficient parameter polynomial as TeX."""
    out = ""
    for m, c in p.terms():
        s = _tex_monomial(ctx, m, int(to_fraction(c)), names)
        if out and not s.startswith("-"):
            s = "+" + s
        out += s
    return out or "0"


def _integer_pair(f: RationalFunction):
    """``(num, den)`` with integer coefficients and positive leading ``den``."""
    scale = 1
    for p in (f.num, f.den):
        for _, c in p.terms():
            scale = lcm(scale, to_fraction(c).denominator)
    num, den = f.num * scale, f.den * scale
    g = 0
    for p in (num, den):
        for _, c in p.terms():
            g = gcd(g, int(to_fraction(c)))
    if g > 1:
        num, den = num.quo_ground(g), den.quo_ground(g)
    return num, den


def tex_fraction(f: RationalFunction, names: Mapping[str, str] = TEX_NAMES) -> str:
    num, den = _integer_pair(f)
    return rf"\frac{{{_tex_poly(f.ctx, num, names)}}}{{{_tex_poly(f.ctx, den, names)}}}"


def _tex_coefficient(c: RationalFunction, names: Mapping[str, str]) -> str:
    """Coefficient in front of a node, including its leading sign."""
    if c.is_constant():
        v = c.constant_value()
        if v == 1:
            return "+"
        if v == -1:
            return "-"
        if v.denominator == 1:
            return f"{v.numerator:+d} "
    num, den = _integer_pair(c)
    if den == 1:
        body = _tex_poly(c.ctx, num, names)
        if len(num.terms()) > 1:
            body = f"({body})"
        return ("" if body.startswith("-") else "+") + body + " "
    return "+" + tex_fraction(c, names) + " "


def _tex_sum(terms: Sequence[NodalTerm], names: Mapping[str, str]) -> str:
    out = ""
    for term in terms:
        out += _tex_coefficient(term.coefficient, names) + term.node_tex()
    return out[1:] if out.startswith("+") else out


def _strip_params(poly, ctx, names: Sequence[str]):
    """Divide out every power of the given parameters dividing ``poly``."""
    for name in names:
        if name not in ctx.names:
            continue
        x = ctx.ring.gens[ctx.names.index(name)]
        while poly and poly.degree(x) > 0:
            q, r = poly.div(x)
            if r:
                break
            poly = q
    return poly


def to_nodal_latex(parts: Sequence[ShiftPolynomial], pull_out: Sequence[str] = (),
                   second: Sequence[ShiftPolynomial] = (), labels: tuple[str, str] = ("u", "p"),
                   names: Mapping[str, str] = TEX_NAMES) -> str:
    """LaTeX nodal form of ``sum(parts) (+ sum(second))``.

    Every part is printed as ``\\frac{..}{..}\\cdot (nodes)``: the part divided by its
    leading coefficient, times that coefficient over a common normalizer built
    from all parts.  Parameters in ``pull_out`` never enter the normalizer, so
    they stay in numerators.  ``second`` parts are written in the function ``labels[1]``.
    """
    tagged = [(p, labels[0]) for p in parts if p] + [(p, labels[1]) for p in second if p]
    if not tagged:
        return "0"
    ctx = tagged[0][0].ring.params
    # fold N <- N * lc / gcd(N, lc), the gcd taken integer-primitive
    norm = ctx.ring.one
    for p, _ in tagged:
        lc = p.lc()
        g = pp_gcd(norm, lc.num)
        norm = (norm * lc.num).quo(g)
    norm = _strip_params(norm, ctx, pull_out)
    N = RationalFunction(ctx, norm)
    chunks = []
    for p, label in tagged:
        lc = p.lc()
        inner = p.scale(lc.inverse())
        chunks.append(tex_fraction(lc / N, names) + r"\cdot (" + _tex_sum(nodal_terms(inner, label), names) + ")")
    return "+ ".join(chunks)


def normalize_whitespace(tex: str) -> str:
    """Join wrapped output lines: drop each newline together with the indentation after it."""
    return re.sub(r"\n[ \t]*", "", tex).strip()


# -- plain text ---------------------------------------------------------------


def _text_coefficient(c: RationalFunction) -> tuple[str, str]:
    """Sign and magnitude text (empty magnitude for ±1)."""
    from .kernel import format_rf

    if c.is_constant():
        v = c.constant_value()
        mag = abs(v)
        sign = "-" if v < 0 else "+"
        return sign, "" if mag == 1 else (str(mag.numerator) if mag.denominator == 1 else f"{mag}")
    lead = to_fraction(c.num.LC)
    if lead < 0:
        return "-", f"({format_rf(-c)})"
    return "+", f"({format_rf(c)})"


def to_nodal_text(p: ShiftPolynomial, label: str = "u") -> str:
    """ASCII nodal form, e.g. ``u[n+1][j] - u[n][j]``."""
    if not p:
        return "0"
    out = []
    for term in nodal_terms(p, label):
        sign, mag = _text_coefficient(term.coefficient)
        body = (mag + "*" if mag else "") + term.node_text()
        if not out:
            out.append(("-" if sign == "-" else "") + body)
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


_NODE = re.compile(r"([A-Za-z]+)((?:\[[a-z][+-]?\d*\])+)")
_INDEX = re.compile(r"\[([a-z])([+-]\d+)?\]")


def parse_nodal_text(text: str, ring: RingContext) -> ShiftPolynomial:
    """Inverse of :func:`to_nodal_text` for the given ring."""
    t, space = _split_axes(ring)
    ctx = ring.params
    out: dict = {}
    pos = 0
    src = text.strip()
    if src == "0":
        return ring.zero()
    pattern = re.compile(r"\s*([+-])?\s*(?:(\([^()]*(?:\([^()]*\)[^()]*)*\)|\d+(?:/\d+)?)\*)?" + _NODE.pattern)
    while pos < len(src):
        m = pattern.match(src, pos)
        if not m:
            raise ValueError(f"cannot parse nodal text at column {pos + 1}")
        sign, mag = m.group(1), m.group(2)
        idx = [(k, int(off or 0)) for k, off in _INDEX.findall(m.group(4))]
        e = [0] * len(ring.variables)
        if t is not None:
            e[t] = idx[0][1]
        for slot, (_, off) in zip(space, idx[1:]):
            e[slot] = off
        if mag is None:
            c = ctx.one
        elif mag.startswith("("):
            c = rf_from_sympy(sympy.sympify(mag.replace("^", "**"), locals={n: sympy.Symbol(n) for n in ctx.names}), ctx)
        else:
            c = ctx.const(Fraction(mag))
        if sign == "-":
            c = -c
        key = tuple(e)
        out[key] = out[key] + c if key in out else c
        pos = m.end()
    return ShiftPolynomial(ring, {k: v for k, v in out.items() if v})
