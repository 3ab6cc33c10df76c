"""Heat equation u_t = a^2 u_xx: backward time, theta-weighted central space.

Builds the scheme by module elimination, cross-checks it against rewriting,
shows the semi-factorized form and the von Neumann condition.
"""

from fractions import Fraction

from fdsym.approx import DerivativeSymbol as D, RuleSpec
from fdsym.kernel import ParamContext
from fdsym.poly import format_poly
from fdsym.scheme import (DiscretizationProblem, PDESpec, apply_aliases, check_equivalence,
                          rule_entries, semi_factorize)
from fdsym.stability import chi, closed_form_conditions, numeric_certify, strip_unimodular_factors

P = ParamContext(["a", "dx", "dt", "theta"])
pde = PDESpec(("x",), {D.parse("u_t"): P.one, D.parse("u_xx"): -P.param("a") ** 2})
problem = DiscretizationProblem(
    pde,
    [(D.parse("u_t"), RuleSpec("backward", "t")),
     (D.parse("u_xx"), RuleSpec("central2", "x", theta="theta"))],
    {"x": "dx", "t": "dt"},
)

rep = check_equivalence(problem)
p = rep.elimination.polynomial
print("scheme:         ", format_poly(p))
print("rewriting agrees:", bool(rep))
print("semi-factorized:", semi_factorize(p, ["dx", "dt"], rule_entries(problem)))

# the von Neumann analysis only sees d = dt/dx^2
q = apply_aliases(p, [("d", P.param("dt") / P.param("dx") ** 2)])
sp = strip_unimodular_factors(chi(q))
print("amplification:  ", sp)
cond = closed_form_conditions(sp, positive=["a", "d"], nonnegative=["theta"])
print("stable iff      ", cond.text())

for d in (Fraction(2, 5), Fraction(3, 5)):
    v = numeric_certify(sp, {"a": 1, "d": d, "theta": 0})
    print(f"explicit Euler, d = {d}: {v.classification}, max |g| = {v.max_modulus:.6f}")
