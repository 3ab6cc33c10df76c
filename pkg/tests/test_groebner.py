import pytest

from _problems import heat, op
from fdsym.groebner import (
    POT,
    ModuleOrdering,
    ModuleVector,
    buchberger,
    eliminate_components,
    eliminate_variables,
    groebner_ideal,
    normal_form,
    reduce,
    s_vector,
)
from fdsym.poly import LEX, RingContext, format_poly
from fdsym.scheme import build_system_matrix

R = RingContext(["Tx", "Tt"], ["a", "dt", "theta"])
Tx, Tt = R.gens()


def vec(*ps):
    return ModuleVector.from_components(list(ps))


def test_coprime_leading_terms_are_already_a_basis():
    G = groebner_ideal([Tx - 1, Tt - 1])
    assert sorted(map(format_poly, G)) == ["Tt-1", "Tx-1"]


def test_ideal_basis_matches_textbook_example():
    S = RingContext(["x", "y"], [], LEX)
    x, y = S.gens()
    G = groebner_ideal([x * x - y, x * y - 1])
    assert [format_poly(g) for g in G] == ["x-y^2", "y^3-1"]


def test_parametric_coefficients_divide_through():
    a = R.param("a")
    G = groebner_ideal([a * Tx - 1, Tt * Tx])
    assert [format_poly(g) for g in G] == ["Tx+(-1/a)", "Tt"]


def test_eliminate_variables():
    S = RingContext(["x", "y", "z"], [])
    x, y, z = S.gens()
    out = eliminate_variables([x - y * y, z - y], ["y"])
    assert [format_poly(g) for g in out] == ["z^2-x"]


def test_s_vector_of_different_components_is_zero():
    assert not s_vector(vec(Tx, R.zero()), vec(R.zero(), Tt))


def test_module_orderings():
    top = ModuleOrdering(mode="top")
    v = vec(Tx, Tt**2)
    assert v.leading(POT)[0] == (0, (1, 0))
    assert v.leading(top)[0] == (1, (0, 2))
    with pytest.raises(ValueError):
        ModuleOrdering(mode="diagonal")


def test_heat_module_elimination_matches_session():
    U, M = build_system_matrix(heat())
    assert [str(b) for b in U] == ["u_xx", "u_t", "u"]
    kept = eliminate_components([vec(*row) for row in M], [2])
    assert len(kept) == 1
    p = kept[0].component(2)
    session = op("(-a^2*dt*theta)*Tx^2*Tt+(a^2*dt*theta-a^2*dt)*Tx^2+(2*a^2*dt*theta+dx^2)*Tx*Tt"
                 "+(-2*a^2*dt*theta+2*a^2*dt-dx^2)*Tx+(-a^2*dt*theta)*Tt+(a^2*dt*theta-a^2*dt)",
                 p.ring, None)
    assert p.scale(session.lc() / p.lc()) == session


def test_normal_form_of_members_and_non_members():
    gens = [vec(Tx - 1, Tt), vec(R.zero(), Tt - 1)]
    G = buchberger(gens)
    member = gens[0].mul_poly(Tx * Tt + 3) - gens[1].mul_poly(Tx)
    assert not normal_form(member, G)
    r = normal_form(vec(Tx, R.zero()), G)
    assert r and not normal_form(r - vec(Tx, R.zero()), G)


def test_reduced_basis_is_monic_and_interreduced():
    G = reduce(buchberger([Tx * Tx - Tt, Tx * Tt - 1, Tt * Tt * R.param("a") - Tx]))
    for i, g in enumerate(G):
        k, c = g.leading(G.ordering)
        assert c.is_one()
        for j, h in enumerate(G):
            if i != j:
                lk = h.leading(G.ordering)[0]
                assert not any(kk[0] == lk[0] and all(x >= y for x, y in zip(kk[1], lk[1]))
                               for kk in g.data)


def test_buchberger_rejects_empty_input():
    with pytest.raises(ValueError):
        buchberger([R.zero()])
