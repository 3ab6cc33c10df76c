from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from _problems import heat, op
from fdsym.poly import RingContext, format_poly
from fdsym.scheme import generate_via_elimination
from fdsym.stability import (
    DegreeUnsupported,
    RangeMissing,
    chi,
    closed_form_conditions,
    export_cad_formula,
    numeric_certify,
    strip_unimodular_factors,
    verify_witness,
)

R = RingContext(["Tx", "Tt"], ["p0", "p1", "p2"])
HR = RingContext(["Tx", "Tt"], ["a", "d", "theta"])
FTCS = "Tx*(Tt-1) - a^2*d*(Tx-1)^2"


def test_chi_reduces_modulo_trig_relations():
    sp = chi(op("Tx^2", HR, None))
    # (c + i s)^2 = c^2 - s^2 + 2 i s c, with s^2 -> 1 - c^2
    assert format_poly(sp.poly) == "2*i*sinx*cosx+2*cosx^2-1"
    with pytest.raises(ValueError):
        chi(op("Tx", HR, None), symbol="other")


def test_unit_factors_are_stripped_in_both_symbols():
    for symbol, unit in (("standard", "i*sinx+cosx"), ("singular", "i*cosx+sinx")):
        st_ = strip_unimodular_factors(chi(op(FTCS, HR, None), symbol=symbol))
        assert [format_poly(f) for f in st_.unit_factors] == [unit]
        assert st_.degree == 1


def test_detect_g_splits_off_unit_roots():
    sp = strip_unimodular_factors(chi(op("(Tt-1)*(Tt-a)", HR, None)), detect_g=True)
    assert [format_poly(f) for f in sp.unit_factors] == ["g-1"]
    assert format_poly(sp.poly) == "g+(-a)"


def test_ftcs_condition_and_certification():
    sp = strip_unimodular_factors(chi(op(FTCS, HR, None)))
    rep = closed_form_conditions(sp, positive=["a", "d"])
    assert rep.kind == "degree-1"
    assert rep.text() == "-2*a^2*d + 1 >= 0"
    assert rep.holds({"a": 1, "d": Fraction(1, 2)})
    assert not rep.holds({"a": 1, "d": Fraction(3, 5)})
    good = numeric_certify(sp, {"a": 1, "d": Fraction(2, 5)})
    bad = numeric_certify(sp, {"a": 1, "d": Fraction(3, 5)}, max_witnesses=3)
    assert good.stable and good.classification == "stable-sampled"
    assert not bad.stable and len(bad.witnesses) == 3
    for w in bad.witnesses:
        assert verify_witness(sp, w) == pytest.approx(w.modulus, rel=1e-9)
        assert w.modulus > 1


def test_parameter_grids_and_errors():
    sp = strip_unimodular_factors(chi(op(FTCS, HR, None)))
    v = numeric_certify(sp, {"a": 1, "d": (Fraction(1, 10), Fraction(1), 4)}, beta_samples=16)
    assert v.points == 4 and v.classification == "conditionally-stable-sampled"
    with pytest.raises(RangeMissing):
        numeric_certify(sp, {"a": 1})
    with pytest.raises(ValueError):
        numeric_certify(sp, {"a": 1, "d": 1}, tol=0)


def test_repeated_unit_root_is_marginal_not_stable():
    sp = chi(op("(Tt-1)^2", HR, None))
    v = numeric_certify(sp, {}, beta_samples=8)
    assert v.classification == "marginal-sampled"


def test_degree_three_needs_numeric_or_cad():
    sp = chi(op("Tt^3 - a*Tt + 1", HR, None))
    with pytest.raises(DegreeUnsupported):
        closed_form_conditions(sp)


def test_cad_export():
    sp = strip_unimodular_factors(chi(op(FTCS, HR, None)))
    rep = closed_form_conditions(sp, positive=["a", "d"])
    cad = export_cad_formula(rep, ["a > 0", "d > 0"])
    assert cad["mathematica"].startswith("Reduce[a > 0 && d > 0 && ForAll[s, -1 <= s <= 1, ")
    assert "(A s)" in cad["qepcad"]


def test_heat_condition_matches_textbook_form():
    p = generate_via_elimination(heat()).polynomial
    sp = strip_unimodular_factors(chi(p))
    assert sp.degree == 1
    rep = closed_form_conditions(sp, positive=["a", "dx", "dt"], nonnegative=["theta"])
    # 2 a^2 dt (1 - 2 theta) <= dx^2
    assert rep.holds({"a": 1, "dx": 1, "dt": Fraction(1, 2), "theta": 0})
    assert not rep.holds({"a": 1, "dx": 1, "dt": Fraction(51, 100), "theta": 0})
    assert rep.holds({"a": 1, "dx": 1, "dt": 100, "theta": Fraction(1, 2)})


coef = st.fractions(min_value=-3, max_value=3, max_denominator=5)


@settings(max_examples=80, deadline=None)
@given(coef, coef, coef.filter(lambda c: c != 0))
def test_quadratic_conditions_agree_with_roots(c0, c1, c2):
    """Closed-form root-modulus conditions versus numpy on constant quadratics."""
    sp = chi(op("p2*Tt^2+p1*Tt+p0", R, None))
    rep = closed_form_conditions(sp)
    roots = np.roots([float(c2), float(c1), float(c0)])
    modulus = max(abs(r) for r in roots)
    assume(abs(modulus - 1) > 1e-9)
    assert rep.holds({"p0": c0, "p1": c1, "p2": c2}) == (modulus <= 1)
