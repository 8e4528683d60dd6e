"""Truncated univariate power series with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Sequence


class Series:
    """``sum_k coeffs[k] x^k`` known modulo ``x^(order+1)``."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Sequence, order: int):
        if order < 0:
            raise ValueError("order must be nonnegative")
        cs = [Fraction(c) for c in coeffs[: order + 1]]
        cs += [Fraction(0)] * (order + 1 - len(cs))
        self.coeffs = cs
        self.order = order

    def __getitem__(self, k: int) -> Fraction:
        if k > self.order:
            raise IndexError(f"coefficient {k} is beyond the truncation order {self.order}")
        return self.coeffs[k]

    def __add__(self, other: "Series") -> "Series":
        n = min(self.order, other.order)
        return Series([a + b for a, b in zip(self.coeffs, other.coeffs)], n)

    def __sub__(self, other: "Series") -> "Series":
        n = min(self.order, other.order)
        return Series([a - b for a, b in zip(self.coeffs, other.coeffs)], n)

    def scale(self, s) -> "Series":
        s = Fraction(s)
        return Series([c * s for c in self.coeffs], self.order)

    def __mul__(self, other: "Series") -> "Series":
        n = min(self.order, other.order)
        out = [Fraction(0)] * (n + 1)
        for i, a in enumerate(self.coeffs[: n + 1]):
            if a:
                for j in range(n + 1 - i):
                    out[i + j] += a * other.coeffs[j]
        return Series(out, n)

    def drop_leading(self) -> "Series":
        """Divide by ``x``; the constant term must vanish."""
        if self.coeffs[0]:
            raise ValueError("series has a nonzero constant term")
        return Series(self.coeffs[1:], self.order - 1)

    def substitute_scaled(self, a) -> "Series":
        """``f(a x)``."""
        a = Fraction(a)
        return Series([c * a ** k for k, c in enumerate(self.coeffs)], self.order)

    def log(self) -> "Series":
        """``log f`` for ``f(0) = 1``, via ``log(1 + u) = sum (-1)^(k+1) u^k / k``."""
        if self.coeffs[0] != 1:
            raise ValueError("log needs constant term 1")
        u = Series([0] + self.coeffs[1:], self.order)
        out = Series([], self.order)
        power = Series([1], self.order)
        for k in range(1, self.order + 1):
            power = power * u
            out = out + power.scale(Fraction((-1) ** (k + 1), k))
        return out

    def exp(self) -> "Series":
        """``exp f`` for ``f(0) = 0``."""
        if self.coeffs[0]:
            raise ValueError("exp needs constant term 0")
        out = Series([1], self.order)
        power = Series([1], self.order)
        for k in range(1, self.order + 1):
            power = power * self
            out = out + power.scale(Fraction(1, factorial(k)))
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, Series):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __repr__(self) -> str:
        return f"Series({[str(c) for c in self.coeffs]}, order={self.order})"


def sinh_series(order: int) -> Series:
    return Series([Fraction(1, factorial(k)) if k % 2 else 0 for k in range(order + 1)], order)
