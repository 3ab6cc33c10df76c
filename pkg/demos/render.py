"""Nodal LaTeX and text forms of a scheme."""

from fdsym.cli.parser import parse_operator
from fdsym.poly import RingContext
from fdsym.render import to_nodal_latex, to_nodal_text
from fdsym.scheme import decoef

R = RingContext(["Tx", "Tt"], ["dh", "dt", "V"])
M = parse_operator("(2*dh*Tx+dt)^2*(Tt-1) + V*Tt*Tx", R)
print("operator:", M)

# split by the time step, keep the viscosity in the numerators
parts = decoef(M, "dt")
print(to_nodal_latex(parts, ["V"]))
print()
print(to_nodal_text(M))

# coupled system: velocity u and pressure p
S = RingContext(["Tx", "Tt"], ["K", "ro", "dh", "dt"])
u = parse_operator("(K*dt)*Tx^2*Tt-(K*dt)*Tt", S)
p = parse_operator("(2*ro*dh)*Tx*Tt-(2*ro*dh)*Tx", S)
print()
print(to_nodal_latex([u], ["K", "ro"], second=[p]))
