"""Continuous versus discrete dispersion for the 1D wave equation.

At d = 1 the leapfrog scheme is exact on the grid: omega(k) matches
+-lambda*k at every sampled wavenumber.  At d = 1/2 it lags.
"""

from pathlib import Path

from fdsym.cli.parser import parse_problem
from fdsym.dispersion import continuous_dispersion, discrete_dispersion, dispersion_limit_check
from fdsym.scheme import apply_aliases, generate_via_elimination

pf = parse_problem((Path(__file__).parent.parent / "problems" / "wave.prob").read_text())
cont = continuous_dispersion(pf.pde)
print(cont.text())
p = apply_aliases(generate_via_elimination(pf.problem()).polynomial, pf.aliases)
disc = discrete_dispersion(p, dict(pf.axes))
print(disc.text())

for d, dt in ((1.0, 0.1), (0.5, 0.05)):
    rep = dispersion_limit_check(disc, {"d": d}, cont, {"lambda": 1.0, "dx": 0.1, "dt": dt})
    print(f"d = {d}: max |omega_h - omega| = {rep.max_error:.3e} ({'exact' if rep.ok else 'dispersive'})")
