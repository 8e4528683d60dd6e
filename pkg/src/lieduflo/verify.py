"""Per-algebra verification suites used by ``lieduflo verify``."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations_with_replacement

from .diagrams import RELATIONS, random_site, relation_residual, wheel_polynomial
from .duflo import (
    PRINTED_C6, CheckReport, check_forms_agree, check_graded_identity, check_invariance,
    check_j_half, check_multiplicative, duflo_pairing, wheel_coefficients,
)
from .exactalg import PRIMAL, invariants_basis
from .liealg import StructureConstants, trace_ad_power

SUITES = ("jacobi", "wheels", "traces", "relations", "jhalf", "forms", "graded", "invariance", "multiplicative")


def invariant_degree_cap(L: StructureConstants, order: int) -> int:
    # dim-4 algebras stay at degree 4 to keep the suite desk-sized
    return min(order, 4 if L.dim >= 4 else 6)


def _invariants(L: StructureConstants, cap: int) -> list:
    out = []
    for d in range(1, cap + 1):
        out.extend(invariants_basis(L, PRIMAL, d))
    return out


def suite_jacobi(L: StructureConstants, **_) -> list[CheckReport]:
    # construction already validated Jacobi; restate it as a report
    return [CheckReport(f"jacobi ({L.name}, dim {L.dim})", True)]


def suite_wheels(L: StructureConstants, order: int = 6, **_) -> list[CheckReport]:
    ws = wheel_coefficients(max(order, 6))
    reports = [
        CheckReport("c_2 = 1/96", ws.coeffs[2] == Fraction(1, 96), str(ws.coeffs[2]), "1/96"),
        CheckReport("c_4 = -1/11520", ws.coeffs[4] == Fraction(-1, 11520), str(ws.coeffs[4]), "-1/11520"),
    ]
    c6 = ws.coeffs[6]
    reports.append(CheckReport(f"c_6 = {c6} (printed value {PRINTED_C6} differs)", c6 != PRINTED_C6,
                               str(c6), str(PRINTED_C6)))
    return reports


def suite_traces(L: StructureConstants, order: int = 6, **_) -> list[CheckReport]:
    out = []
    for k in range(2, order + 1, 2):
        a, b = wheel_polynomial(k, L), trace_ad_power(L, k)
        out.append(CheckReport(f"T(w_{k}) = Tr(ad^{k})", a == b))
    return out


def suite_relations(L: StructureConstants, sites: int = 10, seed: int = 0, **_) -> list[CheckReport]:
    rng = random.Random(seed)
    out = []
    for rel in RELATIONS:
        bad = [s for s in (random_site(rel, rng) for _ in range(sites)) if not relation_residual(rel, s, L).is_zero()]
        out.append(CheckReport(f"{rel} residual vanishes on {sites} random sites", not bad,
                               witness=str(bad[0]) if bad else ""))
    return out


def suite_jhalf(L: StructureConstants, order: int = 6, **_) -> list[CheckReport]:
    return [check_j_half(L, order + order % 2)]


def suite_forms(L: StructureConstants, order: int = 6, wheels: bool = True, **_) -> list[CheckReport]:
    return [check_forms_agree(L, P, wheels=wheels) for P in _invariants(L, invariant_degree_cap(L, order))]


def suite_graded(L: StructureConstants, order: int = 6, wheels: bool = True, **_) -> list[CheckReport]:
    return [check_graded_identity(L, P, wheels=wheels) for P in _invariants(L, invariant_degree_cap(L, order))]


def suite_invariance(L: StructureConstants, order: int = 6, wheels: bool = True, **_) -> list[CheckReport]:
    return [check_invariance(L, duflo_pairing(L, P, wheels=wheels))
            for P in _invariants(L, invariant_degree_cap(L, order))]


def suite_multiplicative(L: StructureConstants, order: int = 6, wheels: bool = True, threads: int = 1,
                         **_) -> list[CheckReport]:
    cap = invariant_degree_cap(L, order)
    basis = _invariants(L, cap)
    out = []
    for P, Q in combinations_with_replacement(basis, 2):
        if P.degree() + Q.degree() <= cap:
            out.append(check_multiplicative(L, P, Q, order=order, wheels=wheels, threads=threads))
    return out


_SUITE_FUNCS = {name: globals()[f"suite_{name}"] for name in SUITES}


def run_suite(name: str, L: StructureConstants, order: int = 6, wheels: bool = True,
              threads: int = 1) -> list[CheckReport]:
    """Run one suite, or every suite for ``name == "all"``."""
    names = SUITES if name == "all" else (name,)
    reports: list[CheckReport] = []
    for n in names:
        if n not in _SUITE_FUNCS:
            raise KeyError(f"unknown suite {n!r}")
        reports.extend(_SUITE_FUNCS[n](L, order=order, wheels=wheels, threads=threads))
    return reports
