import warnings
from fractions import Fraction
from itertools import combinations_with_replacement

import mpmath
import pytest

from lieduflo.duflo import (
    PRINTED_C6, TruncationError, build_upsilon, check_forms_agree, check_graded_identity,
    check_invariance, check_j_half, check_multiplicative, duflo_operator_form, duflo_pairing,
    j_half_operator, j_half_via_det, pairing_coproduct_form, wheel_coefficients,
)
from lieduflo.enveloping import UElement, format_u, parse_u, symmetrize
from lieduflo.exactalg import DUAL, PRIMAL, SymPoly, format_poly, invariants_basis, parse_poly
from lieduflo.liealg import preset
from oracles import ALL_PRESETS, bernoulli_wheel_coefficient, sympy_wheel_coefficients

SL2 = ("h", "e", "f")
HEIS = ("x", "y", "z")


def casimir():
    return parse_poly("h^2 + 4*e*f", SL2)


# --- wheel coefficients ------------------------------------------------------------------


def test_published_coefficients():
    c = wheel_coefficients(6).coeffs
    assert c[2] == Fraction(1, 96)
    assert c[4] == Fraction(-1, 11520)


def test_c6_from_independent_oracles():
    c6 = wheel_coefficients(6).coeffs[6]
    assert c6 == sympy_wheel_coefficients(6)[6] == bernoulli_wheel_coefficient(6)
    assert c6 == Fraction(1, 725760)
    # the printed value is not the Taylor coefficient
    assert c6 != PRINTED_C6


@pytest.mark.parametrize("N", [2, 4, 8, 12])
def test_coefficients_match_sympy_and_bernoulli(N):
    c = wheel_coefficients(N).coeffs
    assert c == sympy_wheel_coefficients(N)
    assert all(c[k] == bernoulli_wheel_coefficient(k) for k in c)


def test_c6_numerically():
    mpmath.mp.dps = 40
    f = lambda x: mpmath.log(mpmath.sinh(x / 2) / (x / 2)) / 4  # noqa: E731
    # Cauchy integral over |x| = 1/10 for the x^6 coefficient
    r = mpmath.mpf(1) / 10
    num = mpmath.quad(lambda t: f(r * mpmath.expj(t)) * mpmath.expj(-6 * t), [0, 2 * mpmath.pi]) / (2 * mpmath.pi * r ** 6)
    c6 = wheel_coefficients(6).coeffs[6]
    exact = mpmath.mpf(c6.numerator) / c6.denominator
    assert abs(num.real - exact) / abs(exact) < 1e-12
    # the full series agrees with the closed form at a small point
    series = wheel_coefficients(24).coeffs
    x = mpmath.mpf(1) / 10
    total = sum(mpmath.mpf(c.numerator) / c.denominator * x ** k for k, c in series.items())
    assert abs(total - f(x)) / abs(f(x)) < 1e-12
    mpmath.mp.dps = 15


def test_wheel_series_text():
    assert str(wheel_coefficients(4)) == "c_2 = 1/96\nc_4 = -1/11520"


@pytest.mark.parametrize("bad", [0, 3, -2, 2.0, True])
def test_wheel_order_errors(bad):
    with pytest.raises(ValueError):
        wheel_coefficients(bad)


# --- j^(1/2) -------------------------------------------------------------------------------


def test_j_half_sl2_order_two():
    op = j_half_operator(preset("sl2"), 2)
    assert format_poly(op.delta[2], SL2) == "1/6*h*^2 + 1/6*e**f*"
    assert op.delta[0] == SymPoly.one(DUAL, 3)


@pytest.mark.parametrize("name", ["abelian1", "abelian3", "heisenberg3"])
def test_j_half_trivial(name):
    L = preset(name)
    for N in (0, 2, 6):
        assert j_half_operator(L, N).delta == {0: SymPoly.one(DUAL, L.dim)}
        assert j_half_via_det(L, N).delta == {0: SymPoly.one(DUAL, L.dim)}


@pytest.mark.parametrize("name", ALL_PRESETS)
@pytest.mark.parametrize("N", [2, 4, 6])
def test_j_half_two_constructions_agree(name, N):
    L = preset(name)
    assert j_half_operator(L, N) == j_half_via_det(L, N)
    assert check_j_half(L, N).passed


def test_j_half_axb2_nonzero():
    op = j_half_operator(preset("axb2"), 2)
    assert 2 in op.delta and not op.delta[2].is_zero()


def test_j_half_has_no_odd_parts():
    for name in ("sl2", "gl2", "axb2"):
        assert all(r % 2 == 0 for r in j_half_operator(preset(name), 6).delta)


def test_wheels_disabled_operator():
    assert j_half_operator(preset("sl2"), 6, wheels=False).delta == {0: SymPoly.one(DUAL, 3)}


# --- Upsilon and the two forms ---------------------------------------------------------------


def test_upsilon_degree_zero():
    L = preset("sl2")
    ups = build_upsilon(L, 0)
    assert len(ups.terms) == 1
    dual, u = ups.terms[0]
    assert dual == SymPoly.one(DUAL, 3) and u == UElement.one(L)


def test_upsilon_rank_one_abelian():
    L = preset("abelian1")
    ups = build_upsilon(L, 2)
    got = {tuple(d.terms.items()): u for d, u in ups.terms}
    assert got == {
        (((), 1),): UElement.one(L),
        (((0,), 1),): UElement.gen(L, 0),
        (((0, 0), Fraction(1, 2)),): UElement(L, {(0, 0): 1}),
    }


def test_upsilon_degrees_bounded_and_threads_deterministic():
    L = preset("gl2")
    a = build_upsilon(L, 4)
    assert all(d.degree() <= 4 for d, _ in a.terms)
    b = build_upsilon(L, 4, threads=4)
    assert [(d, u) for d, u in a.terms] == [(d, u) for d, u in b.terms]


def test_duflo_of_one():
    for name in ("sl2", "gl2", "abelian2"):
        L = preset(name)
        one = SymPoly.one(PRIMAL, L.dim)
        assert duflo_pairing(L, one) == UElement.one(L) == duflo_operator_form(L, one)


def test_duflo_casimir_sl2():
    L = preset("sl2")
    u = duflo_pairing(L, casimir())
    assert format_u(u) == "1 − 2*h + 4*e·f + h·h"
    assert u == symmetrize(casimir(), L) + UElement.one(L)
    assert u == duflo_operator_form(L, casimir())


@pytest.mark.parametrize("k", range(1, 7))
def test_heisenberg_central_powers(k):
    L = preset("heisenberg3")
    P = parse_poly(f"z^{k}", HEIS)
    assert duflo_pairing(L, P) == UElement(L, {(2,) * k: 1})


def test_abelian_is_symmetrization():
    L = preset("abelian3")
    P = parse_poly("b1^2*b3 + 5*b2", ("b1", "b2", "b3"))
    assert duflo_pairing(L, P) == symmetrize(P, L) == duflo_operator_form(L, P)


def test_truncation_errors():
    L = preset("sl2")
    Q = casimir()
    with pytest.raises(TruncationError):
        duflo_pairing(L, Q * Q, d=2)
    with pytest.raises(TruncationError):
        duflo_pairing(L, Q * Q, upsilon=build_upsilon(L, 2))
    with pytest.raises(TruncationError):
        duflo_operator_form(L, Q * Q, N=2)
    with pytest.raises(TruncationError):
        check_multiplicative(L, Q * Q, Q, order=4)


def test_non_invariant_input_warns():
    L = preset("sl2")
    with pytest.warns(UserWarning):
        duflo_pairing(L, parse_poly("e", SL2))


@pytest.mark.parametrize("name,cap", [("sl2", 6), ("heisenberg3", 6), ("abelian3", 6), ("gl2", 4), ("axb2", 4)])
def test_forms_agree_on_invariant_basis(name, cap):
    L = preset(name)
    count = 0
    for d in range(cap + 1):
        for P in invariants_basis(L, PRIMAL, d):
            assert duflo_pairing(L, P) == duflo_operator_form(L, P), (d, P)
            assert check_forms_agree(L, P).passed
            count += 1
    assert count > 0


# --- property checks ------------------------------------------------------------------------


def test_multiplicative_casimir():
    L = preset("sl2")
    rep = check_multiplicative(L, casimir(), casimir())
    assert rep.passed and len(rep.steps) == 3 and all(s.passed for s in rep.steps)
    assert rep.text().startswith("PASS multiplicative")
    assert check_multiplicative(L, casimir() * casimir(), casimir()).passed


def test_multiplicative_control_fails_without_wheels():
    L = preset("sl2")
    rep = check_multiplicative(L, casimir(), casimir(), wheels=False)
    assert not rep.passed and rep.difference
    # the tensor statement itself still holds; the failure is in splitting Upsilon
    assert [s.passed for s in rep.steps] == [True, False, True]
    assert "FAIL" in rep.text()


@pytest.mark.parametrize("a,b", [(a, b) for a in range(4) for b in range(4) if 0 < a + b <= 6])
def test_multiplicative_heisenberg(a, b):
    L = preset("heisenberg3")
    z = lambda k: parse_poly(f"z^{k}", HEIS) if k else SymPoly.one(PRIMAL, 3)  # noqa: E731
    assert check_multiplicative(L, z(a), z(b)).passed


def test_multiplicative_abelian_monomials():
    L = preset("abelian2")
    monos = [SymPoly(PRIMAL, 2, {m: 1}) for d in range(4) for m in combinations_with_replacement(range(2), d)]
    for P in monos[:6]:
        for Q in monos[:6]:
            if P.degree() + Q.degree() <= 6:
                assert check_multiplicative(L, P, Q).passed


def test_tensor_statement_on_gl2():
    L = preset("gl2")
    basis = [p for d in (1, 2) for p in invariants_basis(L, PRIMAL, d)]
    ups = build_upsilon(L, 4)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for P in basis:
            for Q in basis:
                assert pairing_coproduct_form(ups, P, Q) == duflo_pairing(L, P * Q, 4, upsilon=ups)


def test_invariance_examples():
    L = preset("sl2")
    assert check_invariance(L, UElement.one(L)).passed
    assert check_invariance(L, duflo_pairing(L, casimir())).passed
    rep = check_invariance(L, parse_u("e", L))
    assert not rep.passed and rep.witness == "h"


@pytest.mark.parametrize("name,cap", [("sl2", 6), ("heisenberg3", 4), ("gl2", 4), ("axb2", 4)])
def test_images_are_invariant_and_graded_identity(name, cap):
    L = preset(name)
    for d in range(cap + 1):
        for P in invariants_basis(L, PRIMAL, d):
            assert check_invariance(L, duflo_pairing(L, P)).passed
            assert check_graded_identity(L, P).passed


def test_graded_identity_examples():
    assert check_graded_identity(preset("sl2"), casimir()).passed
    assert check_graded_identity(preset("heisenberg3"), parse_poly("z^3", HEIS)).passed
    ab = preset("abelian2")
    assert check_graded_identity(ab, parse_poly("b1^2*b2", ("b1", "b2"))).passed
    with pytest.raises(ValueError):
        check_graded_identity(ab, parse_poly("b1^2 + b2", ("b1", "b2")))


def test_report_serialization():
    rep = check_multiplicative(preset("sl2"), casimir(), casimir())
    d = rep.as_dict()
    assert d["passed"] is True and len(d["steps"]) == 3
    assert '"passed": true' in rep.json()
