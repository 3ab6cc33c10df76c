"""Approximation rules: operator pairs relating a derivative to a lower one.

A rule row ``(high, low)`` states ``high • u_β + low • u_γ = 0`` where ``u_β`` is
the approximated derivative and ``u_γ`` the lower one.  Patterns are written in
an abstract shift ``T`` along the rule's axis, a step ``D``, the time shift
``S`` (used by ``lax`` and by θ-weighting) and an optional weight ``theta``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .kernel import RationalFunction
from .poly import RingContext, ShiftPolynomial

TIME = "t"


class AxisMismatch(ValueError):
    pass


class OrderMismatch(ValueError):
    pass


class UnknownRule(KeyError):
    pass


@dataclass(frozen=True, order=True)
class DerivativeSymbol:
    """``u_{x^β}`` with ``β`` stored as sorted ``(axis, order)`` pairs, orders positive."""

    orders: tuple[tuple[str, int], ...] = ()

    @classmethod
    def of(cls, orders: Mapping[str, int] | Iterable[tuple[str, int]] = ()) -> "DerivativeSymbol":
        items = orders.items() if isinstance(orders, Mapping) else orders
        acc: dict[str, int] = {}
        for a, k in items:
            if k < 0:
                raise ValueError("negative differentiation order")
            acc[a] = acc.get(a, 0) + k
        return cls(tuple(sorted((a, k) for a, k in acc.items() if k)))

    @classmethod
    def parse(cls, token: str) -> "DerivativeSymbol":
        """``u`` -> u; ``u_xxt`` -> x², t; single-letter axis names."""
        m = re.fullmatch(r"u(?:_([A-Za-z]+))?", token.strip())
        if not m:
            raise ValueError(f"not a derivative token: {token!r}")
        counts: dict[str, int] = {}
        for ch in m.group(1) or "":
            counts[ch] = counts.get(ch, 0) + 1
        return cls.of(counts)

    def order(self, axis: str | None = None) -> int:
        if axis is None:
            return sum(k for _, k in self.orders)
        return dict(self.orders).get(axis, 0)

    def axes(self) -> set[str]:
        return {a for a, _ in self.orders}

    def lower(self, axis: str, k: int) -> "DerivativeSymbol":
        d = dict(self.orders)
        if d.get(axis, 0) < k:
            raise OrderMismatch(f"{self} has no order {k} in {axis}")
        d[axis] -= k
        return DerivativeSymbol.of(d)

    @property
    def is_zero(self) -> bool:
        return not self.orders

    def token(self, axis_order: Sequence[str] | None = None) -> str:
        if not self.orders:
            return "u"
        d = dict(self.orders)
        names = list(axis_order) if axis_order else sorted(d, key=lambda a: (a == TIME, a))
        names += [a for a in d if a not in names]
        return "u_" + "".join(a * d.get(a, 0) for a in names)

    def __str__(self):
        return self.token()


def shift_var(axis: str) -> str:
    return f"T{axis}"


@dataclass(frozen=True)
class ApproximationRule:
    name: str
    drop: int                      # source order minus target order along the axis
    error_order: int
    high: Callable                 # (T, S, D, theta, one) -> ShiftPolynomial
    low: Callable
    temporal: bool = False         # axis must be time
    uses_neighbor: bool = False    # lax: T is the spatial neighbor shift, D the time step
    description: str = ""

    def pattern(self) -> tuple[ShiftPolynomial, ShiftPolynomial]:
        """The operator pair in the abstract ring ``K(D, theta)[T, S]``."""
        A = _abstract_ring()
        args = (A.var("T"), A.var("S"), A.param("D"), A.param("theta"), A.one())
        return self.high(*args), self.low(*args)


def _abstract_ring() -> RingContext:
    return RingContext(["T", "S"], ["D", "theta"])


_HALF = Fraction(1, 2)
_THIRD = Fraction(1, 3)

_CATALOG: tuple[ApproximationRule, ...] = (
    ApproximationRule("forward", 1, 1, lambda T, S, D, th, one: D, lambda T, S, D, th, one: one - T,
                      description="forward difference"),
    ApproximationRule("backward", 1, 1, lambda T, S, D, th, one: D * T, lambda T, S, D, th, one: one - T,
                      description="backward difference"),
    ApproximationRule("central1", 1, 2, lambda T, S, D, th, one: 2 * D * T,
                      lambda T, S, D, th, one: one - T * T, description="first order central difference"),
    ApproximationRule("central2", 2, 2, lambda T, S, D, th, one: -(D * D * T),
                      lambda T, S, D, th, one: (one - T) ** 2, description="second order central difference"),
    ApproximationRule("trapezoid", 1, 2, lambda T, S, D, th, one: (D * (T + one)) * _HALF,
                      lambda T, S, D, th, one: one - T, description="trapezoidal rule"),
    ApproximationRule("midpoint", 1, 2, lambda T, S, D, th, one: 2 * D * T,
                      lambda T, S, D, th, one: one - T * T, description="midpoint rule"),
    ApproximationRule("pyramid", 1, 4, lambda T, S, D, th, one: (D * (T * T + 4 * T + one)) * _THIRD,
                      lambda T, S, D, th, one: one - T * T, description="pyramid (Simpson) rule"),
    ApproximationRule("lax", 1, 1, lambda T, S, D, th, one: 2 * D * T,
                      lambda T, S, D, th, one: T * T - 2 * S * T + one, temporal=True, uses_neighbor=True,
                      description="Lax approximation of the time derivative"),
    ApproximationRule("theta-time", 1, 1, lambda T, S, D, th, one: D * (th * T + (one - th)),
                      lambda T, S, D, th, one: one - T, temporal=True,
                      description="parametric temporal difference"),
)

_BY_NAME = {r.name: r for r in _CATALOG}


def catalog() -> list[ApproximationRule]:
    return list(_CATALOG)


def get_rule(name: str) -> ApproximationRule:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise UnknownRule(f"unknown rule {name!r}; known: {', '.join(_BY_NAME)}") from None


@dataclass(frozen=True)
class RuleSpec:
    """One assignment entry: apply ``rule`` along ``axis``.

    ``theta`` names the weight parameter for ``theta-time`` or, on a spatial
    rule, requests θ-weighting in time.  ``neighbor`` is the spatial axis of ``lax``.
    """

    rule: str
    axis: str
    theta: str | None = None
    neighbor: str | None = None

    def target(self, source: DerivativeSymbol) -> DerivativeSymbol:
        return source.lower(self.axis, get_rule(self.rule).drop)


@dataclass(frozen=True)
class RuleRow:
    source: DerivativeSymbol
    target: DerivativeSymbol
    high: ShiftPolynomial
    low: ShiftPolynomial
    spec: RuleSpec | None = None

    def as_vector(self, unknowns: Sequence[DerivativeSymbol]) -> list[ShiftPolynomial]:
        ring = self.high.ring
        row = [ring.zero() for _ in unknowns]
        row[unknowns.index(self.source)] = self.high
        row[unknowns.index(self.target)] = self.low
        return row


def instantiate(rule: ApproximationRule | str, ring: RingContext, axis: str, step: str,
                source: DerivativeSymbol, target: DerivativeSymbol | None = None, *,
                theta: str | None = None, neighbor: str | None = None,
                neighbor_step: str | None = None) -> RuleRow:
    """Concrete row ``high • u_source + low • u_target = 0`` in ``ring``."""
    if isinstance(rule, str):
        rule = get_rule(rule)
    if rule.temporal and axis != TIME:
        raise AxisMismatch(f"rule {rule.name} applies to the time axis only")
    if rule.uses_neighbor and neighbor is None:
        raise AxisMismatch(f"rule {rule.name} needs a spatial neighbor axis")
    expected = source.lower(axis, rule.drop) if source.order(axis) >= rule.drop else None
    if expected is None:
        raise OrderMismatch(f"{source} has order < {rule.drop} along {axis}")
    if target is not None and target != expected:
        raise OrderMismatch(f"rule {rule.name} maps {source} to {expected}, not {target}")
    one = ring.one()
    time_var = shift_var(TIME)
    S = ring.var(time_var) if time_var in ring.variables else None
    T = ring.var(shift_var(neighbor if rule.uses_neighbor else axis))
    D = ring.param(step)
    th = ring.param(theta) if theta is not None else ring.param("theta") if rule.name == "theta-time" else None
    high = rule.high(T, S, D, th, one)
    low = rule.low(T, S, D, th, one)
    if theta is not None and not rule.temporal:
        if S is None:
            raise AxisMismatch("θ-weighting needs a time axis")
        low = low * (th * S + (one - th))
        high = high * S
    if not high:
        raise OrderMismatch("rule instantiates to a zero high-order operator")
    return RuleRow(source, expected, high, low,
                   RuleSpec(rule.name, axis, theta, neighbor))


@dataclass
class AssignmentReport:
    ok: bool
    diagnostics: list[str] = field(default_factory=list)
    chain: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def validate_assignment(derivatives: Iterable[DerivativeSymbol],
                        assignment: Iterable[tuple[DerivativeSymbol, RuleSpec]]) -> AssignmentReport:
    """Check that every nonzero derivative reaches ``u`` through a unique chain of rules."""
    entries = list(assignment.items()) if isinstance(assignment, Mapping) else list(assignment)
    diags: list[str] = []
    table: dict[DerivativeSymbol, RuleSpec] = {}
    for beta, spec in entries:
        if beta in table and table[beta] != spec:
            diags.append(f"duplicate: {beta} has rules {table[beta].rule} and {spec.rule}")
            continue
        table[beta] = spec
    chain: dict[DerivativeSymbol, DerivativeSymbol] = {}
    for beta, spec in table.items():
        try:
            rule = get_rule(spec.rule)
        except UnknownRule as exc:
            diags.append(str(exc.args[0]))
            continue
        if beta.order(spec.axis) < rule.drop:
            diags.append(f"axis: rule {spec.rule} along {spec.axis} cannot lower {beta}")
            continue
        if rule.temporal and spec.axis != TIME:
            diags.append(f"axis: rule {spec.rule} is temporal but assigned to {spec.axis}")
            continue
        chain[beta] = spec.target(beta)
    seen_missing = set()
    for beta in derivatives:
        cur, path = beta, []
        while not cur.is_zero:
            if cur in path:
                diags.append(f"cycle at {cur}")
                break
            path.append(cur)
            if cur not in chain:
                if cur not in seen_missing and not any(d.startswith(f"axis: rule") and str(cur) in d for d in diags):
                    diags.append(f"missing: no rule for {cur}")
                    seen_missing.add(cur)
                break
            cur = chain[cur]
    return AssignmentReport(not diags, diags, chain)
