from fractions import Fraction
from itertools import combinations_with_replacement

import pytest
from hypothesis import given, settings, strategies as st

from lieduflo.exactalg import (
    DUAL, PRIMAL, SymPoly, adjoint_action_sym, apply_diff_operator, coinvariants_reducer, coproduct,
    format_poly, invariants_basis, monomials_of_degree, pair, pair_by_permutations,
    pair_monomials_by_permutations, pair_tensor, parse_poly, poly_exp, reduce_coinvariants,
)
from lieduflo.liealg import preset
from oracles import NONABELIAN, dense_mul

coeffs = st.fractions(min_value=-4, max_value=4, max_denominator=5)


def polys(variance, dim, max_degree=4, max_terms=5):
    mono = st.lists(st.integers(0, dim - 1), max_size=max_degree).map(lambda l: tuple(sorted(l)))
    return st.dictionaries(mono, coeffs, max_size=max_terms).map(lambda d: SymPoly(variance, dim, d))


def homogeneous(variance, dim, d, max_terms=4):
    mono = st.lists(st.integers(0, dim - 1), min_size=d, max_size=d).map(lambda l: tuple(sorted(l)))
    return st.dictionaries(mono, coeffs, min_size=1, max_size=max_terms).map(lambda t: SymPoly(variance, dim, t))


def P(text, names=("b1", "b2", "b3"), variance=PRIMAL):
    return parse_poly(text, list(names), variance)


SL2 = ("h", "e", "f")


def test_multiplication_examples():
    b1 = SymPoly.gen(PRIMAL, 3, 0)
    b2 = SymPoly.gen(PRIMAL, 3, 1)
    assert b1 * b1 == P("b1^2")
    assert (b1 + b2) * (b1 - b2) == P("b1^2 - b2^2")


@settings(max_examples=100, deadline=None)
@given(polys(PRIMAL, 3), polys(PRIMAL, 3))
def test_multiplication_matches_dense_oracle(a, b):
    assert (a * b).terms == dense_mul(a.terms, b.terms, 3)


@settings(max_examples=50, deadline=None)
@given(polys(PRIMAL, 3), polys(PRIMAL, 3), polys(PRIMAL, 3))
def test_ring_axioms(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


def test_truncated_multiplication_and_exp():
    x = SymPoly.gen(DUAL, 1, 0)
    e = poly_exp(x, 4)
    assert [e.coefficient((0,) * k) for k in range(5)] == [1, 1, Fraction(1, 2), Fraction(1, 6), Fraction(1, 24)]
    assert x.mul(x * x, max_degree=2).is_zero()


def _split(pairs):
    """Coproduct terms as ``{(left monomial, right monomial): coefficient}``."""
    out = {}
    for a, b in pairs:
        ((ma, c),) = a.terms.items()
        ((mb, _),) = b.terms.items()
        out[(ma, mb)] = c
    return out


def test_coproduct_examples():
    b1 = SymPoly.gen(DUAL, 2, 0)
    assert _split(coproduct(b1)) == {((), (0,)): 1, ((0,), ()): 1}
    assert _split(coproduct(SymPoly.one(DUAL, 2))) == {((), ()): 1}
    assert _split(coproduct(b1 * b1)) == {((), (0, 0)): 1, ((0,), (0,)): 2, ((0, 0), ()): 1}


def test_pair_examples():
    d = lambda t: P(t, ("b1", "b2"), DUAL)  # noqa: E731
    p = lambda t: P(t, ("b1", "b2"))  # noqa: E731
    assert pair(d("b1*"), p("b1")) == 1
    assert pair(d("b1*^2"), p("b1^2")) == 2
    assert pair(d("b1*^2*b2*"), p("b1^2*b2")) == 2
    for mono in monomials_of_degree(2, 3):
        if mono != (0, 0, 1):
            assert pair(d("b1*^2*b2*"), SymPoly(PRIMAL, 2, {mono: 1})) == 0
    assert pair_tensor([d("b1*")], [p("b1")]) == 1
    assert pair_tensor([d("b1*"), d("b2*")], [p("b2"), p("b1")]) == 0
    assert pair_tensor([d("b1*^2"), d("b1*")], [p("b1^2"), p("b1")]) == 2


def test_pair_matches_permutation_oracle_on_all_monomials():
    count = 0
    for d in range(5):
        monos = monomials_of_degree(3, d)
        for a in monos:
            for b in monos:
                lhs = pair(SymPoly(DUAL, 3, {a: 1}), SymPoly(PRIMAL, 3, {b: 1}))
                assert lhs == pair_monomials_by_permutations(a, b)
                count += 1
    assert count >= 100


@settings(max_examples=100, deadline=None)
@given(polys(DUAL, 3), polys(PRIMAL, 3))
def test_pair_oracle_equivalence_random(Pi, Q):
    assert pair(Pi, Q) == pair_by_permutations(Pi, Q)


@settings(max_examples=100, deadline=None)
@given(polys(DUAL, 3, 4), polys(PRIMAL, 3, 2), polys(PRIMAL, 3, 2))
def test_pairing_coproduct_compatibility(Pi, A, B):
    lhs = pair(Pi, A * B)
    rhs = sum((pair(a, A) * pair(b, B) for a, b in coproduct(Pi)), Fraction(0))
    assert lhs == rhs


@settings(max_examples=60, deadline=None)
@given(polys(DUAL, 3, 2), polys(DUAL, 3, 2), polys(PRIMAL, 3, 4))
def test_diff_operator_is_adjoint_to_multiplication(delta, Pi, Q):
    assert pair(delta * Pi, Q) == pair(Pi, apply_diff_operator(delta, Q))


def test_diff_operator_examples():
    b1s = P("b1*", variance=DUAL)
    assert apply_diff_operator(P("1", variance=DUAL), P("b1^2 + b2")) == P("b1^2 + b2")
    assert apply_diff_operator(b1s, P("b1^2")) == P("2*b1")
    delta = parse_poly("1/6*h*^2 + 1/6*e**f*", SL2, DUAL)
    assert apply_diff_operator(delta, parse_poly("h^2 + 4*e*f", SL2)) == SymPoly.one(PRIMAL, 3)


def test_adjoint_action_examples():
    sl2 = preset("sl2")
    assert adjoint_action_sym(preset("abelian3"), 1, P("b1^2*b3")).is_zero()
    assert adjoint_action_sym(sl2, 0, parse_poly("e*f", SL2)).is_zero()
    assert adjoint_action_sym(sl2, 1, parse_poly("h^2 + 4*e*f", SL2)).is_zero()
    # h . e* = -2 e*
    assert adjoint_action_sym(sl2, 0, parse_poly("e*", SL2, DUAL)) == parse_poly("-2*e*", SL2, DUAL)


@pytest.mark.parametrize("name", NONABELIAN)
@settings(max_examples=20, deadline=None)
@given(data=st.data())
def test_adjoint_action_is_derivation(name, data):
    L = preset(name)
    var = data.draw(st.sampled_from([PRIMAL, DUAL]))
    a, b = data.draw(polys(var, L.dim, 2)), data.draw(polys(var, L.dim, 2))
    i = data.draw(st.integers(0, L.dim - 1))
    assert adjoint_action_sym(L, i, a * b) == adjoint_action_sym(L, i, a) * b + a * adjoint_action_sym(L, i, b)


def test_invariants_examples():
    assert len(invariants_basis(preset("abelian2"), PRIMAL, 3)) == 4
    (q,) = invariants_basis(preset("sl2"), PRIMAL, 2)
    assert format_poly(q, SL2) == "h^2 + 4*e*f"
    (z,) = invariants_basis(preset("heisenberg3"), PRIMAL, 1)
    assert format_poly(z, ("x", "y", "z")) == "z"


@pytest.mark.parametrize("name", NONABELIAN)
@pytest.mark.parametrize("variance", [PRIMAL, DUAL])
def test_invariants_are_annihilated(name, variance):
    L = preset(name)
    for d in range(4):
        for p in invariants_basis(L, variance, d):
            assert all(adjoint_action_sym(L, i, p).is_zero() for i in range(L.dim))


def test_sl2_invariant_dimensions():
    # S(sl2)^sl2 is a polynomial ring on the Casimir
    dims = [len(invariants_basis(preset("sl2"), PRIMAL, d)) for d in range(7)]
    assert dims == [1, 0, 1, 0, 1, 0, 1]


def test_coinvariant_examples():
    ab = preset("abelian3")
    p = P("b1*^2 + 3*b2**b3*", variance=DUAL)
    assert coinvariants_reducer(ab, 2)(p) == p
    sl2 = preset("sl2")
    for i in range(3):
        assert coinvariants_reducer(sl2, 1)(SymPoly.gen(DUAL, 3, i)).is_zero()
    assert format_poly(reduce_coinvariants(sl2, parse_poly("8*h*^2 + 8*e**f*", SL2, DUAL)), SL2) == "12*e**f*"


@pytest.mark.parametrize("name", NONABELIAN)
@settings(max_examples=20, deadline=None)
@given(data=st.data())
def test_coinvariant_reducer_properties(name, data):
    L = preset(name)
    d = data.draw(st.integers(1, 3))
    red = coinvariants_reducer(L, d)
    a, b = data.draw(homogeneous(DUAL, L.dim, d)), data.draw(homogeneous(DUAL, L.dim, d))
    c = data.draw(coeffs)
    assert red(red(a)) == red(a)
    assert red(a + b.scale(c)) == red(a) + red(b).scale(c)
    i = data.draw(st.integers(0, L.dim - 1))
    assert red(adjoint_action_sym(L, i, a)).is_zero()
    # reduction does not change the pairing with invariants
    for inv in invariants_basis(L, PRIMAL, d):
        assert pair(red(a), inv) == pair(a, inv)


@pytest.mark.parametrize("text", ["h^2 + 4*e*f", "−2*h + 1/3*e*f^3", "1", "h − e − f"])
def test_poly_text_round_trip(text):
    p = parse_poly(text, SL2)
    assert parse_poly(format_poly(p, SL2), SL2) == p


def test_dual_text_round_trip():
    p = parse_poly("8*h*^2 + 8*e**f*", SL2, DUAL)
    assert format_poly(p, SL2) == "8*h*^2 + 8*e**f*"
    assert parse_poly(format_poly(p, SL2), SL2, DUAL) == p


@pytest.mark.parametrize("bad", ["", "h^", "2**h", "q", "h +"])
def test_parse_errors(bad):
    with pytest.raises(ValueError):
        parse_poly(bad, SL2)


def test_arithmetic_needs_matching_variance():
    with pytest.raises(ValueError):
        SymPoly.gen(PRIMAL, 2, 0) + SymPoly.gen(DUAL, 2, 0)


def test_degree_two_monomial_count():
    assert len(list(combinations_with_replacement(range(4), 3))) == len(monomials_of_degree(4, 3))
