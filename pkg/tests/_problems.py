"""Problem builders shared by the test modules."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from fdsym.approx import TIME, DerivativeSymbol as D, RuleSpec, get_rule
from fdsym.cli.parser import parse_operator
from fdsym.kernel import ParamContext
from fdsym.poly import RingContext
from fdsym.scheme import DiscretizationProblem, PDESpec


def op(text: str, variables, params) -> "ShiftPolynomial":
    """Parse a polynomial in Singular print syntax."""
    ring = variables if isinstance(variables, RingContext) else RingContext(variables, params)
    return parse_operator(text, ring)


def heat(rule_t="backward", theta=True):
    P = ParamContext(["a", "dx", "dt", "theta"])
    pde = PDESpec(("x",), {D.parse("u_t"): P.one, D.parse("u_xx"): -P.param("a") ** 2})
    asg = [(D.parse("u_t"), RuleSpec(rule_t, "t")),
           (D.parse("u_xx"), RuleSpec("central2", "x", theta="theta" if theta else None))]
    return DiscretizationProblem(pde, asg, {"x": "dx", "t": "dt"})


def wave(axes="x"):
    """``u_tt = Σ l_a^2 u_aa`` with central differences; steps ``dt`` and ``d<a>``."""
    names = [f"l{a}" for a in axes] + ["dt"] + [f"d{a}" for a in axes]
    P = ParamContext(names)
    co = {D.parse("u_tt"): P.one}
    asg = [(D.parse("u_tt"), RuleSpec("central2", "t"))]
    for a in axes:
        co[D.parse(f"u_{a}{a}")] = -P.param(f"l{a}") ** 2
        asg.append((D.parse(f"u_{a}{a}"), RuleSpec("central2", a)))
    steps = {a: f"d{a}" for a in axes}
    steps["t"] = "dt"
    return DiscretizationProblem(PDESpec(tuple(axes), co), asg, steps)


def wave_aliases(axes="x"):
    """Courant numbers ``c<a> = l_a dt / d<a>``."""
    P = wave(axes).params
    return [(f"c{a}", P.param(f"l{a}") * P.param("dt") / P.param(f"d{a}")) for a in axes]


def advection():
    P = ParamContext(["a", "dx", "dt", "theta"])
    pde = PDESpec(("x",), {D.parse("u_t"): P.one, D.parse("u_x"): P.param("a")})
    asg = [(D.parse("u_t"), RuleSpec("theta-time", "t", theta="theta")),
           (D.parse("u_x"), RuleSpec("trapezoid", "x"))]
    return DiscretizationProblem(pde, asg, {"x": "dx", "t": "dt"})


# -- random problems -------------------------------------------------------------

# explicit rules: the high-order operator is a shift monomial (a unit over Laurent polynomials)
EXPLICIT_RULES = ["forward", "backward", "central1", "central2", "midpoint"]
# implicit rules: the high-order operator has several terms
IMPLICIT_RULES = ["trapezoid", "pyramid"]


@st.composite
def derivative_sets(draw, axes):
    """A few distinct derivatives of total order 1..3 over ``axes``."""
    def one():
        order = draw(st.integers(1, 3))
        counts: dict[str, int] = {}
        for _ in range(order):
            a = draw(st.sampled_from(axes))
            counts[a] = counts.get(a, 0) + 1
        return D.of(counts)

    out = []
    for _ in range(draw(st.integers(1, 3))):
        b = one()
        if b not in out:
            out.append(b)
    return out


@st.composite
def random_problems(draw, max_spatial=2, with_kappa=False, implicit=False):
    """Random consistent problems: at most three axes, derivative order at most three.

    With ``implicit`` the rule pool also contains trapezoid, pyramid and theta-time.
    """
    spatial_rules = EXPLICIT_RULES + (IMPLICIT_RULES if implicit else [])
    time_rules = spatial_rules + (["theta-time"] if implicit else [])
    spatial = tuple("xyz"[: draw(st.integers(1, max_spatial))])
    axes = list(spatial) + [TIME]
    names = ["a", "b"] + [f"d{a}" for a in spatial] + ["dt", "theta"]
    if with_kappa:
        names.append("kappa")
    P = ParamContext(names)
    derivs = draw(derivative_sets(axes))
    coeffs = {}
    for b in derivs:
        kind = draw(st.sampled_from(["int", "a", "b", "ab"]))
        c = {"int": P.const(draw(st.sampled_from([-3, -2, -1, 1, 2, 3]))),
             "a": P.param("a"), "b": -P.param("b") ** 2, "ab": P.param("a") * P.param("b") + 1}[kind]
        coeffs[b] = c
    if draw(st.booleans()):
        coeffs[D()] = P.const(draw(st.sampled_from([-1, 1, 2])))
    if with_kappa:
        coeffs[D()] = coeffs.get(D(), P.zero) + P.param("kappa")
    steps = {a: f"d{a}" for a in spatial}
    steps[TIME] = "dt"
    assignment: dict = {}
    todo = [b for b in derivs if not b.is_zero]
    while todo:
        b = todo.pop()
        if b in assignment or b.is_zero:
            continue
        axis = draw(st.sampled_from(sorted(b.axes())))
        pool = time_rules if axis == TIME else spatial_rules
        pool = [r for r in pool if get_rule(r).drop <= b.order(axis)]
        rule = draw(st.sampled_from(pool))
        theta = None
        if rule == "theta-time":
            theta = "theta"
        elif axis != TIME and draw(st.integers(0, 4)) == 0:
            theta = "theta"
        spec = RuleSpec(rule, axis, theta)
        assignment[b] = spec
        todo.append(spec.target(b))
    return DiscretizationProblem(PDESpec(spatial, coeffs), list(assignment.items()), steps)


def rational_point(names, draw_int, lo=1, hi=9):
    return {n: Fraction(draw_int(lo, hi), draw_int(lo, hi)) for n in names}
