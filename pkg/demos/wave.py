"""Wave equation with central differences in one, two and three dimensions.

The Courant numbers c_a = l_a dt / d_a replace the step sizes; the sampled
root moduli then depend on the c_a alone.
"""

from fractions import Fraction

from fdsym.approx import DerivativeSymbol as D, RuleSpec
from fdsym.kernel import ParamContext
from fdsym.scheme import (DiscretizationProblem, PDESpec, apply_aliases, generate_via_elimination,
                          rule_entries, scheme_markers, semi_factorize)
from fdsym.stability import chi, closed_form_conditions, numeric_certify, strip_unimodular_factors


def wave(axes):
    P = ParamContext([f"l{a}" for a in axes] + ["dt"] + [f"d{a}" for a in axes])
    co = {D.parse("u_tt"): P.one}
    rules = [(D.parse("u_tt"), RuleSpec("central2", "t"))]
    for a in axes:
        co[D.parse(f"u_{a}{a}")] = -P.param(f"l{a}") ** 2
        rules.append((D.parse(f"u_{a}{a}"), RuleSpec("central2", a)))
    steps = {a: f"d{a}" for a in axes} | {"t": "dt"}
    prob = DiscretizationProblem(PDESpec(tuple(axes), co), rules, steps)
    aliases = [(f"c{a}", P.param(f"l{a}") * P.param("dt") / P.param(f"d{a}")) for a in axes]
    return prob, aliases


# rational Courant numbers on either side of sum(c^2) = 1
F = Fraction
POINTS = {
    "x": [(F(9, 10),), (F(11, 10),)],
    "xy": [(F(3, 10), F(9, 10)), (F(33, 50), F(22, 25))],
    "xyz": [(F(1, 10), F(1, 2), F(4, 5)), (F(1, 5), F(3, 5), F(9, 10))],
}

for axes in ("x", "xy", "xyz"):
    prob, aliases = wave(axes)
    p = apply_aliases(generate_via_elimination(prob).polynomial, aliases)
    pool = [apply_aliases(f, aliases) for f in rule_entries(prob)]
    form = semi_factorize(p, scheme_markers(prob, [n for n, _ in aliases]), pool)
    sp = strip_unimodular_factors(chi(p))
    print(f"--- {len(axes)}D")
    print("scheme:    ", form)
    if len(axes) <= 2:
        print("condition: ", closed_form_conditions(sp, [n for n, _ in aliases]).text())
    for c in POINTS[axes]:
        v = numeric_certify(sp, {n: x for (n, _), x in zip(aliases, c)},
                            beta_samples=64 if len(axes) < 3 else 24)
        total = sum(x * x for x in c)
        print(f"sum c^2 = {total}: {v.classification} (max |g| = {v.max_modulus:.6f})")
