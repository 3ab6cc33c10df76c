from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from _problems import op
from fdsym.poly import (
    DEGREVLEX,
    LEX,
    MonomialOrdering,
    RingContext,
    RingMismatch,
    RingMorphism,
    apply_morphism,
    divide,
    exact_quotient,
    format_poly,
    laurent_normalize,
    primitive,
    sp_gcd,
)

R = RingContext(["Tx", "Tt"], ["a", "dt"])
Tx, Tt = R.gens()
a, dt = R.param("a"), R.param("dt")


@st.composite
def shift_polys(draw, ring=R):
    out = ring.zero()
    for _ in range(draw(st.integers(0, 4))):
        e = (draw(st.integers(0, 2)), draw(st.integers(0, 2)))
        c = ring.params.const(draw(st.integers(-3, 3)))
        if draw(st.booleans()):
            c = c * ring.params.param("a")
        out = out + ring.monomial(e, c)
    return out


points = st.fixed_dictionaries({"Tx": st.integers(-3, 3), "Tt": st.integers(-3, 3)})
param_points = st.fixed_dictionaries({"a": st.integers(-3, 3), "dt": st.integers(1, 3)})


def test_orderings():
    assert DEGREVLEX.compare((1, 2), (2, 0)) == 1
    assert LEX.compare((1, 2), (2, 0)) == -1
    # degrevlex: equal degree, smaller last exponent wins
    assert DEGREVLEX.compare((2, 1, 0), (2, 0, 1)) == 1
    block = MonomialOrdering("block", 1)
    assert block.compare((1, 0), (0, 5)) == 1
    with pytest.raises(ValueError):
        MonomialOrdering("weird")


def test_ring_validation():
    with pytest.raises(ValueError):
        RingContext(["Tx", "Tx"])
    with pytest.raises(ValueError):
        RingContext(["a"], ["a"])
    with pytest.raises(RingMismatch):
        Tx + RingContext(["Tx"], ["a"]).var("Tx")


def test_singular_format_round_trip():
    text = "(-a^2*dt)*Tx^2*Tt+(a^2*dt-1)*Tx+Tt-1/2"
    p = op(text, R, None)
    assert format_poly(p) == text
    assert op(format_poly(p), R, None) == p


def test_terms_are_sorted_by_ring_order():
    p = Tt + Tx**2 + Tx * Tt
    assert [e for e, _ in p.terms] == [(2, 0), (1, 1), (0, 1)]


def test_primitive_part():
    p = (a * Fraction(2, 3)) * Tx - (a * 4) * Tt
    content, pp = primitive(p)
    assert pp.scale(content) == p
    assert format_poly(pp) == "Tx-6*Tt"
    assert primitive(-pp)[1] == pp


def test_division_and_gcd():
    f = Tx - 1
    g = (Tx - 1) * (Tt + a) * (Tx + dt)
    q, r = divide(g, f)
    assert not r and q * f == g
    assert exact_quotient(Tx * Tt + 1, Tx) is None
    assert sp_gcd(g, (Tx - 1) * (Tx + 2)) == Tx - 1
    assert sp_gcd(R.zero(), a * (Tt - 1)) == Tt - 1


def test_laurent_normalize():
    p = laurent_normalize(R, [((-1, 2), 1), ((1, 1), 3)])
    assert format_poly(p) == "3*Tx^2+Tt"


def test_morphism_respects_parameters():
    S = RingContext(["g", "c"], ["a", "dt", "w"])
    phi = RingMorphism(R, S, [S.var("c") + 1, S.var("g")])
    assert apply_morphism(phi, a * Tx * Tt) == S.param("a") * (S.var("c") + 1) * S.var("g")
    with pytest.raises(ValueError):
        RingMorphism(S, R, [Tx, Tt])


@settings(max_examples=60, deadline=None)
@given(shift_polys(), shift_polys(), shift_polys())
def test_ring_axioms(p, q, r):
    assert p * (q + r) == p * q + p * r
    assert (p * q) * r == p * (q * r)
    assert p - p == R.zero()


@settings(max_examples=60, deadline=None)
@given(shift_polys(), shift_polys(), points, param_points)
def test_evaluation_is_a_homomorphism(p, q, pt, pp):
    assert (p * q).evaluate(pt, pp) == p.evaluate(pt, pp) * q.evaluate(pt, pp)


@settings(max_examples=40, deadline=None)
@given(shift_polys(), shift_polys().filter(bool))
def test_division_identity(p, f):
    q, r = divide(p, f)
    assert q * f + r == p
    lead = f.lm()
    for e, _ in r.terms:
        assert not all(x >= y for x, y in zip(e, lead))


@settings(max_examples=40, deadline=None)
@given(shift_polys().filter(bool), shift_polys().filter(bool), shift_polys().filter(bool))
def test_gcd_divides_both(p, q, h):
    g = sp_gcd(p * h, q * h)
    assert exact_quotient(p * h, g) is not None
    assert exact_quotient(q * h, g) is not None
    assert exact_quotient(g, primitive(h)[1]) is not None
