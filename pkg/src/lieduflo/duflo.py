"""The Duflo map ``S(g)^g -> U(g)^g`` and checks of its properties.

Two independent routes compute the same map:

* pairing form: build a truncation of ``Upsilon = e^iota * (T(C^2) (x) 1)`` as
  a list of ``(dual polynomial, U(g) element)`` terms and pair its first slot
  against ``P``;
* operator form: apply the differential operators ``delta_r`` to ``P`` and
  symmetrize.

``T(C^2) = exp(sum_n 2 c_2n Tr(ad_x^2n))`` is likewise computed twice, from
the wheel series and from a direct determinant expansion.
"""

from __future__ import annotations

import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import factorial

from .enveloping import UElement, adjoint_action_u, symbol, symmetrize, format_u
from .exactalg import (
    DUAL, PRIMAL, SymPoly, apply_diff_operator, coproduct, factorial_weight,
    format_poly, is_invariant, monomials_of_degree, pair, pair_tensor, poly_exp,
)
from .liealg import StructureConstants, ad_symbolic, matmul_poly, trace_ad_power
from .series import sinh_series

DEFAULT_ORDER = 6
PRINTED_C6 = Fraction(1, 752776)  # value printed in the source; the series gives 1/725760


class TruncationError(ValueError):
    pass


@dataclass(frozen=True)
class WheelSeries:
    order: int
    coeffs: dict[int, Fraction]

    def __str__(self) -> str:
        return "\n".join(f"c_{k} = {c}" for k, c in sorted(self.coeffs.items()))


def _check_order(N: int, minimum: int) -> None:
    if not isinstance(N, int) or isinstance(N, bool) or N < minimum or N % 2:
        raise ValueError(f"order must be an even integer >= {minimum}, got {N!r}")


def wheel_coefficients(N: int) -> WheelSeries:
    """Taylor coefficients of ``(1/4) log(sinh(x/2) / (x/2))`` up to ``x^N``."""
    _check_order(N, 2)
    ratio = sinh_series(N + 1).drop_leading()  # sinh(y)/y
    f = ratio.log().substitute_scaled(Fraction(1, 2)).scale(Fraction(1, 4))
    for k in range(1, N + 1, 2):
        assert not f[k], "odd coefficient of an even function"
    return WheelSeries(N, {k: f[k] for k in range(2, N + 1, 2)})


# --- the operator T(C^2) = j^(1/2) ----------------------------------------------------

@dataclass
class DufloOperator:
    """``delta[r]`` is the degree-``r`` part of ``j^(1/2)`` in ``S(g*)``."""

    L: StructureConstants
    order: int
    delta: dict[int, SymPoly]
    wheels: bool = True

    def total(self) -> SymPoly:
        acc = SymPoly.zero(DUAL, self.L.dim)
        for p in self.delta.values():
            acc = acc + p
        return acc

    def __eq__(self, other) -> bool:
        if not isinstance(other, DufloOperator):
            return NotImplemented
        return self.L == other.L and self.order == other.order and self.delta == other.delta

    def __str__(self) -> str:
        names = self.L.basis_names
        return "\n".join(f"delta_{r} = {format_poly(p, names)}" for r, p in sorted(self.delta.items()))


def _split_degrees(L: StructureConstants, p: SymPoly, N: int) -> dict[int, SymPoly]:
    out = {0: SymPoly.one(DUAL, L.dim)}
    for r in range(1, N + 1):
        part = p.homogeneous_part(r)
        if part.terms:
            out[r] = part
    if p.coefficient(()) != 1:
        raise ArithmeticError("constant term of j^(1/2) must be 1")
    return out


def j_half_operator(L: StructureConstants, N: int = DEFAULT_ORDER, wheels: bool = True) -> DufloOperator:
    """``exp(sum_{2n <= N} 2 c_2n Tr(ad^2n))`` truncated at degree ``N``.

    ``wheels=False`` is the control mode: every correction is dropped and the
    Duflo map degenerates to plain symmetrization.
    """
    _check_order(N, 0)
    if not wheels:
        return DufloOperator(L, N, {0: SymPoly.one(DUAL, L.dim)}, wheels=False)
    key = ("j_half", N)
    hit = L._cache.get(key)
    if hit is None:
        exponent = SymPoly.zero(DUAL, L.dim)
        if N >= 2:
            for k, c in wheel_coefficients(N).coeffs.items():
                exponent = exponent + trace_ad_power(L, k).scale(2 * c)
        hit = _split_degrees(L, poly_exp(exponent, N), N)
        L._cache[key] = hit
    return DufloOperator(L, N, dict(hit))


def _det(M: list[list[SymPoly]], N: int) -> SymPoly:
    """Leibniz expansion, truncated at degree ``N`` after every product."""
    n = len(M)
    acc = SymPoly.zero(DUAL, M[0][0].dim)
    for perm in permutations(range(n)):
        inversions = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        term = SymPoly.one(DUAL, M[0][0].dim)
        for r, c in enumerate(perm):
            term = term.mul(M[r][c], N)
            if not term.terms:
                break
        acc = acc + (term if inversions % 2 == 0 else -term)
    return acc


def j_half_via_det(L: StructureConstants, N: int = DEFAULT_ORDER) -> DufloOperator:
    """``det(sinh(A/2) / (A/2))^(1/2)`` with ``A = ad_x`` as a polynomial matrix.

    The matrix series ``sum_n A^2n / (4^n (2n+1)!)`` is summed entrywise, its
    determinant expanded directly, and the square root taken as the binomial
    series of ``(1 + u)^(1/2)``.  No trace or wheel coefficient is used.
    """
    _check_order(N, 0)
    m = L.dim
    if m == 0:
        return DufloOperator(L, N, {0: SymPoly.one(DUAL, 0)})
    A = ad_symbolic(L)
    one = SymPoly.one(DUAL, m)
    zero = SymPoly.zero(DUAL, m)
    M = [[one if r == c else zero for c in range(m)] for r in range(m)]
    A2 = matmul_poly(A, A, N)
    power = [[one if r == c else zero for c in range(m)] for r in range(m)]
    for n in range(1, N // 2 + 1):
        power = matmul_poly(power, A2, N)
        w = Fraction(1, 4 ** n * factorial(2 * n + 1))
        M = [[M[r][c] + power[r][c].scale(w) for c in range(m)] for r in range(m)]
    u = _det(M, N) - one
    root = one
    upow = one
    binom = Fraction(1)
    for k in range(1, N + 1):
        binom = binom * (Fraction(1, 2) - (k - 1)) / k
        upow = upow.mul(u, N)
        if not upow.terms:
            break
        root = root + upow.scale(binom)
    return DufloOperator(L, N, _split_degrees(L, root, N))


# --- Upsilon and the two Duflo forms ---------------------------------------------------

@dataclass
class UpsilonTruncation:
    """``terms`` are ``(dual polynomial, U(g) element)`` pairs with dual degree ``<= degree``."""

    L: StructureConstants
    degree: int
    terms: list[tuple[SymPoly, UElement]]
    operator: DufloOperator


def _upsilon_block(L: StructureConstants, k: int, r: int, delta_r: SymPoly) -> list[tuple[SymPoly, UElement]]:
    # iota^k / k! grouped by multiset: b*^alpha / alpha! (x) sym(b^alpha)
    out = []
    for alpha in monomials_of_degree(L.dim, k):
        dual = SymPoly._raw(DUAL, L.dim, {alpha: Fraction(1, factorial_weight(alpha))}).mul(delta_r)
        if dual.terms:
            out.append((dual, symmetrize(SymPoly._raw(PRIMAL, L.dim, {alpha: Fraction(1)}), L)))
    return out


def build_upsilon(L: StructureConstants, d: int, wheels: bool = True, threads: int = 1,
                  operator: DufloOperator | None = None) -> UpsilonTruncation:
    """All terms of ``e^iota * (j^(1/2) (x) 1)`` with total dual degree ``k + r <= d``.

    Blocks ``(k, r)`` are independent; with ``threads > 1`` they are built on a
    thread pool and merged in block order, so the result does not depend on
    scheduling.
    """
    if d < 0:
        raise ValueError("degree must be nonnegative")
    if operator is None:
        operator = j_half_operator(L, d + d % 2, wheels=wheels)
    blocks = [(k, r) for r in sorted(operator.delta) for k in range(d - r + 1) if r <= d]
    work = lambda kr: _upsilon_block(L, kr[0], kr[1], operator.delta[kr[1]])  # noqa: E731
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, blocks))
    else:
        parts = [work(b) for b in blocks]
    terms = [t for part in parts for t in part]
    return UpsilonTruncation(L, d, terms, operator)


def _cached_upsilon(L: StructureConstants, d: int, wheels: bool, threads: int = 1) -> UpsilonTruncation:
    key = ("upsilon", d, wheels)
    hit = L._cache.get(key)
    if hit is None:
        hit = build_upsilon(L, d, wheels=wheels, threads=threads)
        L._cache[key] = hit
    return hit


def _prepare(L: StructureConstants, P: SymPoly, d: int | None) -> int:
    if P.variance != PRIMAL or P.dim != L.dim:
        raise ValueError("P must be a primal polynomial on the given algebra")
    deg = max(P.degree(), 0)
    if d is not None and deg > d:
        raise TruncationError(f"polynomial degree {deg} exceeds the truncation degree {d}")
    if not is_invariant(L, P):
        warnings.warn("P is not ad-invariant; the Duflo guarantees do not apply", stacklevel=3)
    return deg if d is None else d


def duflo_pairing(L: StructureConstants, P: SymPoly, d: int | None = None, wheels: bool = True,
                  upsilon: UpsilonTruncation | None = None) -> UElement:
    """``<Upsilon, P>`` with the pairing in the first tensor slot."""
    d = _prepare(L, P, d)
    if upsilon is None:
        upsilon = _cached_upsilon(L, d, wheels)
    elif upsilon.degree < max(P.degree(), 0):
        raise TruncationError("Upsilon truncation is smaller than deg P")
    acc = UElement.zero(L)
    for dual, u in upsilon.terms:
        c = pair(dual, P)
        if c:
            acc = acc + u.scale(c)
    return acc


def duflo_operator_form(L: StructureConstants, P: SymPoly, N: int | None = None,
                        wheels: bool = True) -> UElement:
    """``sum_r sym(delta_r(d/db) P)``."""
    deg = _prepare(L, P, None)
    N = N if N is not None else deg + deg % 2
    if N < deg:
        raise TruncationError(f"operator order {N} is smaller than deg P = {deg}")
    op = j_half_operator(L, N + N % 2, wheels=wheels)
    acc = UElement.zero(L)
    for r, delta in sorted(op.delta.items()):
        if r <= deg:
            acc = acc + symmetrize(apply_diff_operator(delta, P), L)
    return acc


# --- checks -------------------------------------------------------------------------------

@dataclass
class CheckStep:
    label: str
    passed: bool
    lhs: str = ""
    rhs: str = ""
    difference: str = ""


@dataclass
class CheckReport:
    name: str
    passed: bool
    lhs: str = ""
    rhs: str = ""
    difference: str = ""
    witness: str = ""
    steps: list[CheckStep] = field(default_factory=list)

    def text(self) -> str:
        lines = [f"{'PASS' if self.passed else 'FAIL'} {self.name}"]
        for s in self.steps:
            lines.append(f"  {'PASS' if s.passed else 'FAIL'} {s.label}")
            if not s.passed:
                lines.append(f"    difference: {s.difference}")
        if self.lhs:
            lines.append(f"  lhs: {self.lhs}")
        if self.rhs:
            lines.append(f"  rhs: {self.rhs}")
        if not self.passed and self.difference:
            lines.append(f"  difference: {self.difference}")
        if self.witness:
            lines.append(f"  witness: {self.witness}")
        return "\n".join(lines)

    def as_dict(self) -> dict:
        return {
            "name": self.name, "passed": self.passed, "lhs": self.lhs, "rhs": self.rhs,
            "difference": self.difference, "witness": self.witness,
            "steps": [vars(s) for s in self.steps],
        }

    def json(self) -> str:
        return json.dumps(self.as_dict(), ensure_ascii=False, sort_keys=True)


def _step(label: str, a: UElement, b: UElement) -> CheckStep:
    diff = a - b
    return CheckStep(label, diff.is_zero(), format_u(a), format_u(b), format_u(diff))


def pairing_coproduct_form(ups: UpsilonTruncation, P: SymPoly, Q: SymPoly) -> UElement:
    """``<(Delta (x) 1) Upsilon, P (x) Q>``, pairing through the coproduct."""
    acc = UElement.zero(ups.L)
    target = max(P.degree(), 0) + max(Q.degree(), 0)
    for dual, u in ups.terms:
        if dual.degree() > target:
            continue
        c = sum((pair_tensor([a, b], [P, Q]) for a, b in coproduct(dual)), Fraction(0))
        if c:
            acc = acc + u.scale(c)
    return acc


def pairing_split_form(ups: UpsilonTruncation, P: SymPoly, Q: SymPoly) -> UElement:
    """``<Upsilon^13 Upsilon^23, P (x) Q>``: pair each copy separately, multiply the U(g) parts."""
    left = [(pair(a, P), u) for a, u in ups.terms]
    right = [(pair(a, Q), u) for a, u in ups.terms]
    acc = UElement.zero(ups.L)
    for c1, u1 in left:
        if not c1:
            continue
        for c2, u2 in right:
            if c2:
                acc = acc + (u1 * u2).scale(c1 * c2)
    return acc


def check_multiplicative(L: StructureConstants, P: SymPoly, Q: SymPoly, order: int = DEFAULT_ORDER,
                         wheels: bool = True, threads: int = 1) -> CheckReport:
    """``D(PQ) = D(P) D(Q)``, with each link of the proof chain checked separately."""
    PQ = P * Q
    deg = max(PQ.degree(), 0)
    if deg > order:
        raise TruncationError(f"deg(PQ) = {deg} exceeds the truncation order {order}")
    ups = _cached_upsilon(L, order, wheels, threads)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lhs = duflo_pairing(L, PQ, order, upsilon=ups)
        DP = duflo_pairing(L, P, order, upsilon=ups)
        DQ = duflo_pairing(L, Q, order, upsilon=ups)
    via_coproduct = pairing_coproduct_form(ups, P, Q)
    via_split = pairing_split_form(ups, P, Q)
    rhs = DP * DQ
    steps = [
        _step("<Upsilon, PQ> = <(Delta x 1) Upsilon, P x Q>", lhs, via_coproduct),
        _step("<(Delta x 1) Upsilon, P x Q> = <Upsilon13 Upsilon23, P x Q>", via_coproduct, via_split),
        _step("<Upsilon13 Upsilon23, P x Q> = D(P) D(Q)", via_split, rhs),
    ]
    diff = lhs - rhs
    name = "multiplicative" + ("" if wheels else " (wheels disabled)")
    return CheckReport(name, diff.is_zero() and all(s.passed for s in steps),
                       format_u(lhs), format_u(rhs), format_u(diff), steps=steps)


def check_invariance(L: StructureConstants, u: UElement) -> CheckReport:
    for i in range(L.dim):
        img = adjoint_action_u(L, i, u)
        if not img.is_zero():
            return CheckReport("invariance", False, format_u(u), difference=format_u(img),
                               witness=L.basis_names[i])
    return CheckReport("invariance", True, format_u(u))


def check_graded_identity(L: StructureConstants, P: SymPoly, wheels: bool = True) -> CheckReport:
    if not P.is_homogeneous():
        raise ValueError("check_graded_identity needs a homogeneous polynomial")
    d = max(P.degree(), 0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        DP = duflo_pairing(L, P, d, wheels=wheels)
    top = symbol(DP, d)
    diff = top - P
    names = L.basis_names
    return CheckReport("graded identity", diff.is_zero(), format_poly(top, names), format_poly(P, names),
                       format_poly(diff, names))


def check_forms_agree(L: StructureConstants, P: SymPoly, wheels: bool = True) -> CheckReport:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        a = duflo_pairing(L, P, wheels=wheels)
        b = duflo_operator_form(L, P, wheels=wheels)
    s = _step("pairing form = operator form", a, b)
    return CheckReport("pairing = operator form", s.passed, s.lhs, s.rhs, s.difference)


def check_j_half(L: StructureConstants, N: int = DEFAULT_ORDER) -> CheckReport:
    a, b = j_half_operator(L, N), j_half_via_det(L, N)
    names = L.basis_names
    diff = a.total() - b.total()
    return CheckReport(f"j^(1/2) wheels = determinant (order {N})", diff.is_zero(),
                       format_poly(a.total(), names), format_poly(b.total(), names), format_poly(diff, names))


__all__ = [
    "DEFAULT_ORDER", "PRINTED_C6", "TruncationError", "WheelSeries", "wheel_coefficients",
    "DufloOperator", "j_half_operator", "j_half_via_det", "UpsilonTruncation", "build_upsilon",
    "duflo_pairing", "duflo_operator_form", "pairing_coproduct_form", "pairing_split_form",
    "CheckStep", "CheckReport", "check_multiplicative", "check_invariance", "check_graded_identity",
    "check_forms_agree", "check_j_half",
]
