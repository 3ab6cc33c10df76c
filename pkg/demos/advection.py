"""Advection u_t + a u_x = 0 with the theta method in time and trapezoid in space.

The amplification factor has modulus at most one exactly when theta >= 1/2;
below that every positive Courant number produces growth.
"""

from fractions import Fraction

from fdsym.approx import DerivativeSymbol as D, RuleSpec
from fdsym.kernel import ParamContext
from fdsym.scheme import DiscretizationProblem, PDESpec, apply_aliases, generate_via_elimination
from fdsym.stability import chi, closed_form_conditions, numeric_certify, strip_unimodular_factors

P = ParamContext(["a", "dx", "dt", "theta"])
pde = PDESpec(("x",), {D.parse("u_t"): P.one, D.parse("u_x"): P.param("a")})
prob = DiscretizationProblem(
    pde,
    [(D.parse("u_t"), RuleSpec("theta-time", "t", theta="theta")),
     (D.parse("u_x"), RuleSpec("trapezoid", "x"))],
    {"x": "dx", "t": "dt"},
)
p = apply_aliases(generate_via_elimination(prob).polynomial,
                  [("c", P.param("a") * P.param("dt") / P.param("dx"))])
print("scheme:   ", p)
sp = strip_unimodular_factors(chi(p))
print("condition:", closed_form_conditions(sp, ["c"], ["theta"]).text())
for theta in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
    v = numeric_certify(sp, {"c": (Fraction(1, 10), Fraction(2), 5), "theta": theta})
    print(f"theta = {theta}: {v.classification}, max |g| = {v.max_modulus:.6f}")
