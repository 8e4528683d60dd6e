"""Independent reference computations used by the tests.

Nothing here calls into the code paths it is used to check.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import sympy


def brute_jacobi(L) -> list:
    """All (i, j, k, m) with a nonzero Jacobi sum, over every index combination."""
    m = L.dim
    c = L.coefficient
    bad = []
    for i, j, k, t in product(range(m), repeat=4):
        s = sum(
            c(i, j, l) * c(l, k, t) + c(j, k, l) * c(l, i, t) + c(k, i, l) * c(l, j, t)
            for l in range(m)
        )
        if s:
            bad.append((i, j, k, t))
    return bad


def dense_mul(a: dict, b: dict, dim: int) -> dict:
    """Multiply via dense exponent-vector arrays."""
    def to_exp(mono):
        e = [0] * dim
        for i in mono:
            e[i] += 1
        return tuple(e)

    A = {to_exp(m): c for m, c in a.items()}
    B = {to_exp(m): c for m, c in b.items()}
    dmax = max((sum(e) for e in A), default=0) + max((sum(e) for e in B), default=0)
    grid = [e for e in product(range(dmax + 1), repeat=dim) if sum(e) <= dmax]
    out = {}
    for e in grid:
        total = Fraction(0)
        for ea, ca in A.items():
            eb = tuple(x - y for x, y in zip(e, ea))
            if min(eb) >= 0 and eb in B:
                total += ca * B[eb]
        if total:
            out[tuple(i for i, k in enumerate(e) for _ in range(k))] = total
    return out


def adjoint_matrices(L) -> list:
    """``ad(b_i)`` as sympy matrices with exact rational entries."""
    m = L.dim
    mats = []
    for i in range(m):
        M = sympy.zeros(m, m)
        for j in range(m):
            for k in range(m):
                M[k, j] = sympy.Rational(str(L.coefficient(i, j, k)))
        mats.append(M)
    return mats


def sympy_trace_ad_power(L, k: int) -> dict:
    """Coefficients of ``Tr(ad_x^k)`` by sympy, keyed by sorted index tuples."""
    xs = sympy.symbols(f"x0:{L.dim}")
    ad = sum((x * M for x, M in zip(xs, adjoint_matrices(L))), sympy.zeros(L.dim, L.dim))
    poly = sympy.Poly(sympy.expand((ad ** k).trace()), *xs) if L.dim else None
    out = {}
    for exps, c in poly.terms():
        if c:
            out[tuple(i for i, e in enumerate(exps) for _ in range(e))] = Fraction(int(c.p), int(c.q))
    return out


def sympy_wheel_coefficients(N: int) -> dict:
    x = sympy.symbols("x")
    s = sympy.series(sympy.log(sympy.sinh(x / 2) / (x / 2)) / 4, x, 0, N + 1).removeO()
    out = {}
    for k in range(2, N + 1, 2):
        c = sympy.Rational(s.coeff(x, k))
        out[k] = Fraction(int(c.p), int(c.q))
    return out


def bernoulli_wheel_coefficient(n2: int) -> Fraction:
    """``c_2n = B_2n / (4 * 2n * (2n)!)`` from ``log(sinh y / y) = sum 2^2n B_2n y^2n / (2n (2n)!)``."""
    b = sympy.bernoulli(n2)
    return Fraction(int(b.p), int(b.q)) / (4 * n2 * sympy.factorial(n2))


def word_matrix(L, word, mats=None):
    mats = mats or adjoint_matrices(L)
    M = sympy.eye(L.dim)
    for i in word:
        M = M * mats[i]
    return M


NONABELIAN = ["sl2", "gl2", "heisenberg3", "axb2"]
ALL_PRESETS = ["abelian1", "abelian2", "abelian3", "abelian4"] + NONABELIAN
