"""fdsym: symbolic generation and analysis of finite difference schemes.

Linear PDEs with constant coefficients are discretized by approximation rules
written as shift-operator pairs; Gröbner-basis elimination turns the system
into a single scheme polynomial.  The scheme can then be checked for von
Neumann stability, analysed for dispersion and printed in nodal form.
"""

from .approx import DerivativeSymbol, RuleSpec, catalog, get_rule
from .dispersion import continuous_dispersion, discrete_dispersion, dispersion_limit_check
from .groebner import ModuleVector, buchberger, eliminate_components, eliminate_variables, normal_form
from .kernel import ParamContext, RationalFunction
from .poly import DEGREVLEX, LEX, MonomialOrdering, RingContext, ShiftPolynomial, format_poly
from .render import to_nodal_latex, to_nodal_text
from .scheme import (
    DiscretizationProblem,
    PDESpec,
    Scheme,
    apply_aliases,
    build_system_matrix,
    check_equivalence,
    decoef,
    generate_via_difference_algebra,
    generate_via_elimination,
    generate_via_rewriting,
    semi_factorize,
)
from .stability import chi, closed_form_conditions, export_cad_formula, numeric_certify, strip_unimodular_factors

__version__ = "0.1.0"

__all__ = [
    "DEGREVLEX", "LEX", "DerivativeSymbol", "DiscretizationProblem", "ModuleVector",
    "MonomialOrdering", "PDESpec", "ParamContext", "RationalFunction", "RingContext", "RuleSpec",
    "Scheme", "ShiftPolynomial", "apply_aliases", "buchberger", "build_system_matrix", "catalog",
    "check_equivalence", "chi", "closed_form_conditions", "continuous_dispersion", "decoef",
    "discrete_dispersion", "dispersion_limit_check", "eliminate_components", "eliminate_variables",
    "export_cad_formula", "format_poly", "generate_via_difference_algebra", "generate_via_elimination",
    "generate_via_rewriting", "get_rule", "normal_form", "numeric_certify", "semi_factorize",
    "strip_unimodular_factors", "to_nodal_latex", "to_nodal_text",
]
