"""Difference scheme generation for linear constant-coefficient PDEs.

Two independent routes produce the scheme polynomial:

* elimination: the PDE row and one row per approximation rule generate a
  submodule of ``K[T]^r``; its intersection with the ``u`` component is
  generated by the scheme;
* rewriting: each rule is solved for its higher derivative over ``K(T)`` and
  substituted into the PDE, highest derivative first.

Both results are normalized to be integer-primitive over Z[params] with a
positive leading integer, so they can be compared for exact equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import sympy

from .approx import (
    TIME,
    DerivativeSymbol,
    RuleRow,
    RuleSpec,
    get_rule,
    instantiate,
    shift_var,
    validate_assignment,
)
from .groebner import ModuleVector, eliminate_components, eliminate_variables
from .kernel import ParamContext, RationalFunction
from .poly import (
    MonomialOrdering,
    RingContext,
    ShiftPolynomial,
    exact_quotient,
    format_poly,
    primitive,
    sp_gcd,
)


class InvalidAssignment(ValueError):
    pass


class EliminationEmpty(RuntimeError):
    pass


class NonInvertibleLead(ZeroDivisionError):
    pass


class FactorizationIncomplete(ArithmeticError):
    def __init__(self, form: "SemiFactorizedForm"):
        super().__init__("semi-factorization left an unfactored residual")
        self.form = form


@dataclass
class PDESpec:
    """``Σ c_β u_{x^β} = 0`` over spatial axes plus time."""

    spatial: tuple[str, ...]
    coefficients: dict[DerivativeSymbol, RationalFunction]

    def __post_init__(self):
        self.spatial = tuple(self.spatial)
        self.coefficients = {b: c for b, c in self.coefficients.items() if c}
        if not self.coefficients:
            raise InvalidAssignment("PDE has no nonzero coefficient")
        bad = {a for b in self.coefficients for a in b.axes()} - set(self.spatial) - {TIME}
        if bad:
            raise InvalidAssignment(f"derivative along undeclared axes {sorted(bad)}")

    @property
    def params(self) -> ParamContext:
        return next(iter(self.coefficients.values())).ctx

    @property
    def axes(self) -> tuple[str, ...]:
        return self.spatial + (TIME,)

    def derivatives(self) -> list[DerivativeSymbol]:
        return list(self.coefficients)


@dataclass
class DiscretizationProblem:
    pde: PDESpec
    assignment: list[tuple[DerivativeSymbol, RuleSpec]]
    steps: dict[str, str]                     # axis -> step parameter name

    def __post_init__(self):
        if isinstance(self.assignment, Mapping):
            self.assignment = list(self.assignment.items())
        report = validate_assignment(self.pde.derivatives(), self.assignment)
        if not report.ok:
            raise InvalidAssignment("; ".join(report.diagnostics))
        if all(b.is_zero for b in self.pde.coefficients):
            raise InvalidAssignment("PDE involves no derivative; nothing to approximate")
        for _, spec in self.assignment:
            if spec.axis not in self.steps:
                raise InvalidAssignment(f"no step parameter for axis {spec.axis}")
            if spec.axis not in self.pde.axes:
                raise InvalidAssignment(f"rule along undeclared axis {spec.axis}")
        self._chain = report.chain

    @property
    def params(self) -> ParamContext:
        return self.pde.params

    def ring(self) -> RingContext:
        return RingContext([shift_var(a) for a in self.pde.axes], self.params)

    def rule_for(self, beta: DerivativeSymbol) -> RuleSpec:
        for b, spec in self.assignment:
            if b == beta:
                return spec
        raise KeyError(beta)

    def unknowns(self) -> list[DerivativeSymbol]:
        """Every derivative reached from the PDE, ``u`` included, highest first."""
        seen: set[DerivativeSymbol] = set()
        for b in self.pde.coefficients:
            while True:
                seen.add(b)
                if b.is_zero:
                    break
                b = self._chain[b]
        axes = self.pde.axes

        def key(b: DerivativeSymbol):
            return (b.order(), tuple(b.order(a) for a in axes))

        return sorted(seen, key=key, reverse=True)

    def rows(self) -> list[RuleRow]:
        ring = self.ring()
        out = []
        for beta in self.unknowns():
            if beta.is_zero:
                continue
            spec = self.rule_for(beta)
            out.append(instantiate(spec.rule, ring, spec.axis, self.steps[spec.axis], beta,
                                   theta=spec.theta, neighbor=spec.neighbor))
        return out


@dataclass
class Scheme:
    polynomial: ShiftPolynomial
    trace: list[str] = field(default_factory=list)

    def __str__(self):
        return format_poly(self.polynomial)

    def __eq__(self, other):
        return isinstance(other, Scheme) and self.polynomial == other.polynomial


def normalize(p: ShiftPolynomial) -> ShiftPolynomial:
    return primitive(p)[1]


def build_system_matrix(problem: DiscretizationProblem,
                        order: Sequence[DerivativeSymbol] | None = None
                        ) -> tuple[list[DerivativeSymbol], list[list[ShiftPolynomial]]]:
    """``(U, M)`` with ``M • U = 0``: the PDE row, then one row per rule."""
    U = problem.unknowns()
    if order is not None:
        if sorted(order) != sorted(U):
            raise InvalidAssignment("custom order must be a permutation of the unknowns")
        U = list(order)
    ring = problem.ring()
    pde = [ring.const(problem.pde.coefficients.get(b, ring.params.zero)) for b in U]
    M = [pde] + [r.as_vector(U) for r in problem.rows()]
    return U, M


def scheme_from_matrix(rows: Sequence[Sequence[ShiftPolynomial]], keep: int | None = None,
                       trace: list[str] | None = None) -> Scheme:
    """Eliminate every component but ``keep`` (default: the last one)."""
    rank = len(rows[0])
    keep = rank - 1 if keep is None else keep
    vecs = [ModuleVector.from_components(list(r)) for r in rows]
    kept = eliminate_components(vecs, [keep])
    if not kept:
        raise EliminationEmpty("no generator supported on the u component")
    if len(kept) > 1:
        raise EliminationEmpty(f"elimination left {len(kept)} generators; expected a principal ideal")
    poly = normalize(kept[0].component(keep))
    return Scheme(poly, (trace or []) + ["path: elimination", f"rank: {rank}"])


def generate_via_elimination(problem: DiscretizationProblem) -> Scheme:
    U, M = build_system_matrix(problem)
    return scheme_from_matrix(M, U.index(DerivativeSymbol()),
                              [f"unknowns: {', '.join(b.token(problem.pde.axes) for b in U)}"])


def _reduce_fraction(n: ShiftPolynomial, d: ShiftPolynomial) -> tuple[ShiftPolynomial, ShiftPolynomial]:
    if not n:
        return n, n.ring.one()
    g = sp_gcd(n, d)
    if not g.is_constant():
        n = exact_quotient(n, g)
        d = exact_quotient(d, g)
    return n, d


def generate_via_rewriting(problem: DiscretizationProblem) -> Scheme:
    ring = problem.ring()
    one = ring.one()
    frac: dict[DerivativeSymbol, tuple[ShiftPolynomial, ShiftPolynomial]] = {
        b: (ring.const(c), one) for b, c in problem.pde.coefficients.items()
    }
    rows = {r.source: r for r in problem.rows()}
    trace = ["path: rewriting"]
    for beta in problem.unknowns():
        if beta.is_zero or beta not in frac:
            continue
        row = rows[beta]
        if not row.high:
            raise NonInvertibleLead(f"rule for {beta} has zero high-order operator")
        n, d = frac.pop(beta)
        # u_β = -(low/high) u_γ
        add_n, add_d = -(n * row.low), d * row.high
        if row.target in frac:
            n0, d0 = frac[row.target]
            add_n, add_d = n0 * add_d + add_n * d0, d0 * add_d
        frac[row.target] = _reduce_fraction(add_n, add_d)
        trace.append(f"rewrite: {beta.token(problem.pde.axes)} -> {row.target.token(problem.pde.axes)}")
    n, d = frac.get(DerivativeSymbol(), (ring.zero(), one))
    if not n:
        raise EliminationEmpty("rewriting produced the zero operator")
    trace.append(f"multiplier: {format_poly(normalize(d))}")
    return Scheme(normalize(n), trace)


def generate_via_difference_algebra(problem: DiscretizationProblem) -> Scheme:
    """Proxy-variable formulation: unknowns become ring variables, then eliminated."""
    U, M = build_system_matrix(problem)
    base = problem.ring()
    proxies = [f"u{i}" for i in range(len(U))]
    zero_idx = U.index(DerivativeSymbol())
    big = RingContext(list(base.variables) + proxies, base.params)
    polys = []
    for row in M:
        acc = big.zero()
        for i, entry in enumerate(row):
            if entry:
                acc = acc + entry.to_ring(big) * big.var(proxies[i])
        if acc:
            polys.append(acc)
    drop = [p for i, p in enumerate(proxies) if i != zero_idx]
    kept = eliminate_variables(polys, drop)
    u_exp = len(base.variables)
    linear = [g for g in kept if g.degree(proxies[zero_idx]) == 1
              and all(e[u_exp] == 1 for e, _ in g.terms)]
    if not linear:
        raise EliminationEmpty("no linear element in the elimination ideal")
    g = min(linear, key=lambda q: (len(q), q.degree()))
    poly = ShiftPolynomial(base, {e[:u_exp]: c for e, c in g.terms})
    return Scheme(normalize(poly), ["path: difference algebra"])


@dataclass
class EquivalenceReport:
    ok: bool
    elimination: Scheme
    rewriting: Scheme

    def __bool__(self):
        return self.ok


def check_equivalence(problem: DiscretizationProblem) -> EquivalenceReport:
    a = generate_via_elimination(problem)
    b = generate_via_rewriting(problem)
    return EquivalenceReport(a.polynomial == b.polynomial, a, b)


# -- aliases -------------------------------------------------------------------


def solve_alias(ctx: ParamContext, alias: str, expr: RationalFunction,
                avoid: Iterable[str] = ()) -> tuple[str, RationalFunction, ParamContext]:
    """Pick the first parameter occurring linearly in ``expr`` and solve ``alias = expr`` for it.

    Parameters in ``avoid`` (typically used by later aliases) are only chosen
    when nothing else works.

    Returns ``(eliminated name, its value, new parameter context)``; the new
    context drops the eliminated name and appends ``alias``.
    """
    if alias in ctx.names:
        raise ValueError(f"alias {alias} clashes with a parameter")
    avoid = set(avoid)
    candidates = [n for n in ctx.names if n not in avoid] + [n for n in ctx.names if n in avoid]
    for name in candidates:
        if not expr.involves(name):
            continue
        num = RationalFunction(ctx, expr.num)
        den = RationalFunction(ctx, expr.den)
        idx = ctx.names.index(name)
        if num.num.degree(idx) > 1 or den.num.degree(idx) > 1:
            continue
        zero = ctx.zero
        p = ctx.param(name)
        n0, d0 = num.subs(name, zero), den.subs(name, zero)
        n1, d1 = (num - n0) / p, (den - d0) / p
        new = ParamContext([x for x in ctx.names if x != name] + [alias])
        big = ctx.extend([alias])
        a = big.param(alias)
        value = (n0.convert(big) - a * d0.convert(big)) / (a * d1.convert(big) - n1.convert(big))
        if value.involves(name):
            continue
        return name, value.convert(new), new
    raise ValueError(f"cannot solve alias {alias} for any parameter")


def apply_alias(p: ShiftPolynomial, alias: str, expr: RationalFunction,
                avoid: Iterable[str] = ()) -> ShiftPolynomial:
    """Rewrite ``p`` in terms of ``alias = expr`` and renormalize."""
    name, value, new = solve_alias(p.ring.params, alias, expr.convert(p.ring.params), avoid)
    big = p.ring.params.extend([alias])
    val_big = value.convert(big)
    ring = p.ring.with_params(new)
    terms = {}
    for e, c in p.terms:
        terms[e] = c.convert(big).subs(name, val_big).convert(new)
    return normalize(ShiftPolynomial(ring, terms))


def apply_aliases(p: ShiftPolynomial, aliases: Sequence[tuple[str, RationalFunction]]) -> ShiftPolynomial:
    """Apply aliases in order; each eliminates a parameter later aliases do not need."""
    for k, (alias, expr) in enumerate(aliases):
        later = set()
        for _, e in aliases[k + 1:]:
            later |= e.free_symbols()
        p = apply_alias(p, alias, expr, later)
    return p


# -- decoef and semi-factorized presentation --------------------------------------


def decoef(p: ShiftPolynomial, marker: str) -> tuple[ShiftPolynomial, ShiftPolynomial]:
    """Split ``p`` into the parts whose coefficients do not / do involve ``marker``."""
    ctx = p.ring.params
    if marker not in ctx.names:
        return p, p.ring.zero()
    idx = ctx.names.index(marker)
    without, with_ = {}, {}
    for e, c in p.terms:
        if c.den.degree(idx) > 0:
            with_[e] = c
            continue
        a = {m: v for m, v in c.num.terms() if m[idx] == 0}
        b = {m: v for m, v in c.num.terms() if m[idx] > 0}
        den = RationalFunction(ctx, c.den)
        if a:
            without[e] = RationalFunction(ctx, ctx.ring(a)) / den
        if b:
            with_[e] = RationalFunction(ctx, ctx.ring(b)) / den
    return ShiftPolynomial(p.ring, without), ShiftPolynomial(p.ring, with_)


@dataclass
class Summand:
    scalar: RationalFunction
    monomial: tuple[int, ...]
    factors: list[tuple[ShiftPolynomial, int]]
    residual: ShiftPolynomial | None = None

    def expand(self, ring: RingContext) -> ShiftPolynomial:
        out = ring.monomial(self.monomial, self.scalar)
        for f, k in self.factors:
            out = out * f ** k
        if self.residual is not None:
            out = out * self.residual
        return out

    def text(self, ring: RingContext) -> str:
        parts = []
        mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(ring.variables, self.monomial) if k)
        if mono:
            parts.append(mono)
        for f, k in self.factors:
            parts.append(f"({format_poly(f)})" + (f"^{k}" if k > 1 else ""))
        if self.residual is not None:
            parts.append(f"[{format_poly(self.residual)}]")
        return "*".join(parts) or "1"


@dataclass
class SemiFactorizedForm:
    ring: RingContext
    sign: int
    summands: list[Summand]

    def expand(self) -> ShiftPolynomial:
        total = self.ring.zero()
        for s in self.summands:
            total = total + s.expand(self.ring)
        return total

    @property
    def complete(self) -> bool:
        return all(s.residual is None for s in self.summands)

    def __str__(self):
        from .kernel import format_rf

        out = []
        for s in self.summands:
            c = s.scalar
            neg = c.is_constant() and c.constant_value() < 0 or (not c.is_constant() and
                                                                 c.num.LC < 0 and c.den == 1 and len(c.num.terms()) == 1)
            mag = -c if neg else c
            body = s.text(self.ring)
            coef = "" if mag.is_one() else (format_rf(mag) if len(mag.num.terms()) == 1 and mag.den == 1
                                             else f"({format_rf(mag)})")
            term = f"{coef}*{body}" if coef and body != "1" else (coef or body)
            out.append(("- " if neg else "+ ") + term)
        text = " ".join(out)
        return text[2:] if text.startswith("+ ") else "-" + text[1:]


def factor_pool(ring: RingContext, polys: Iterable[ShiftPolynomial] = ()) -> list[ShiftPolynomial]:
    """``v - 1`` and ``v + 1`` per variable, then the irreducible factors of ``polys``."""
    pool: list[ShiftPolynomial] = []
    for v in ring.variables:
        pool.append(ring.var(v) - 1)
        pool.append(ring.var(v) + 1)
    for p in polys:
        for f in irreducible_factors(p):
            if f not in pool:
                pool.append(f)
    return pool


def irreducible_factors(p: ShiftPolynomial) -> list[ShiftPolynomial]:
    """Non-monomial irreducible factors over Q(params), integer-primitive."""
    if not p or p.is_constant():
        return []
    ring = p.ring
    names = list(ring.params.names) + list(ring.variables)
    syms = sympy.symbols(names)
    _, pp = primitive(p)
    expr = 0
    for e, c in pp.terms:
        coeff = c.num.as_expr(*syms[:len(ring.params.names)])
        mono = 1
        for s, k in zip(syms[len(ring.params.names):], e):
            mono *= s ** k
        expr += coeff * mono
    _, facs = sympy.factor_list(sympy.expand(expr), *syms)
    out = []
    nvar_syms = syms[len(ring.params.names):]
    for f, _ in facs:
        fp = sympy.Poly(f, *syms)
        if not any(fp.degree(s) > 0 for s in nvar_syms):
            continue
        terms = {}
        for monom, coeff in fp.terms():
            pe, ve = monom[:len(ring.params.names)], monom[len(ring.params.names):]
            terms.setdefault(tuple(ve), {})[tuple(pe)] = coeff
        poly = ShiftPolynomial(ring, {e: RationalFunction(ring.params, ring.params.ring(d)) for e, d in terms.items()})
        if len(poly) == 1:
            continue
        out.append(normalize(poly))
    return out


def _factor_summand(p: ShiftPolynomial, pool: Sequence[ShiftPolynomial]) -> Summand:
    ring = p.ring
    content, pp = primitive(p)
    low = tuple(min(e[i] for e, _ in pp.terms) for i in range(ring.nvars))
    if any(low):
        pp = ShiftPolynomial(ring, {tuple(a - b for a, b in zip(e, low)): c for e, c in pp.terms})
    factors = []
    for f in pool:
        if pp.is_constant():
            break
        k = 0
        while True:
            q = exact_quotient(pp, f)
            if q is None:
                break
            pp, k = q, k + 1
        if k:
            factors.append((f, k))
    residual = None
    if not pp.is_constant():
        residual = pp
    else:
        content = content * pp.coeff((0,) * ring.nvars)
    return Summand(content, low, factors, residual)


def semi_factorize(p: ShiftPolynomial | Scheme, markers: Sequence[str],
                   extra_factors: Iterable[ShiftPolynomial] = (), strict: bool = False) -> SemiFactorizedForm:
    """Group ``p`` by the step markers and factor each group over a finite pool."""
    if isinstance(p, Scheme):
        p = p.polynomial
    ring = p.ring
    pool = factor_pool(ring, extra_factors)
    groups = []
    rest = p
    for m in markers:
        rest, with_ = decoef(rest, m)
        if with_:
            groups.append(with_)
    if rest:
        groups.insert(0, rest)
    summands = [_factor_summand(g, pool) for g in groups]
    sign = 1
    first = summands[0].scalar if summands else None
    if first is not None and _leading_sign(first) < 0:
        sign = -1
        for s in summands:
            s.scalar = -s.scalar
    form = SemiFactorizedForm(ring, sign, summands)
    if strict and not form.complete:
        raise FactorizationIncomplete(form)
    return form


def _leading_sign(c: RationalFunction) -> int:
    if not c:
        return 0
    lc = c.num.LC
    return 1 if lc > 0 else -1


def scheme_markers(problem: DiscretizationProblem, aliases: Sequence[str] = ()) -> list[str]:
    """Aliases first, then step parameters with spatial axes before time."""
    out = list(aliases)
    for a in problem.pde.axes:
        s = problem.steps.get(a)
        if s and s not in out:
            out.append(s)
    return out


def rule_entries(problem: DiscretizationProblem) -> list[ShiftPolynomial]:
    out = []
    for r in problem.rows():
        out.extend([r.high, r.low])
    return out
