"""Exact sparse polynomials on S(g) and S(g*) and the linear algebra around them.

A monomial is a nondecreasing tuple of basis indices, so ``(0, 0, 2)`` is
``b_1^2 b_3``.  Monomials are ordered graded-lexicographically by basis index:
first by degree, then by the index tuple.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from fractions import Fraction
from itertools import combinations_with_replacement, permutations, product
from typing import TYPE_CHECKING, Callable, Iterable, Mapping, Sequence

if TYPE_CHECKING:
    from .liealg import StructureConstants

PRIMAL = "primal"
DUAL = "dual"

Monomial = tuple[int, ...]
MINUS = "−"


def mono_key(mono: Monomial) -> tuple[int, Monomial]:
    return (len(mono), mono)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    return tuple(sorted(a + b))


def exponents(mono: Monomial) -> dict[int, int]:
    """Sparse exponent map of a monomial (no zero exponents)."""
    return dict(Counter(mono))


def from_exponents(exps: Mapping[int, int]) -> Monomial:
    return tuple(i for i in sorted(exps) for _ in range(exps[i]))


def factorial_weight(mono: Monomial) -> int:
    """``prod_i alpha_i!`` for the exponent vector of ``mono``."""
    w = 1
    for e in Counter(mono).values():
        w *= math.factorial(e)
    return w


def monomials_of_degree(dim: int, d: int) -> list[Monomial]:
    """All degree-``d`` monomials in increasing monomial order."""
    return list(combinations_with_replacement(range(dim), d))


class SymPoly:
    """A polynomial in ``S(g)`` (variance ``primal``) or ``S(g*)`` (``dual``).

    Treated as immutable once built.  Arithmetic requires equal variance and
    dimension.
    """

    __slots__ = ("variance", "dim", "terms")

    def __init__(self, variance: str, dim: int, terms: Mapping[Monomial, object] | None = None):
        if variance not in (PRIMAL, DUAL):
            raise ValueError(f"unknown variance {variance!r}")
        self.variance = variance
        self.dim = dim
        clean: dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            c = Fraction(c)
            if not c:
                continue
            mono = tuple(mono)
            if any(not 0 <= i < dim for i in mono):
                raise ValueError(f"monomial {mono} out of range for dim {dim}")
            clean[mono] = c
        self.terms = clean

    @classmethod
    def _raw(cls, variance: str, dim: int, terms: dict[Monomial, Fraction]) -> "SymPoly":
        obj = cls.__new__(cls)
        obj.variance, obj.dim, obj.terms = variance, dim, terms
        return obj

    @classmethod
    def zero(cls, variance: str, dim: int) -> "SymPoly":
        return cls._raw(variance, dim, {})

    @classmethod
    def one(cls, variance: str, dim: int) -> "SymPoly":
        return cls._raw(variance, dim, {(): Fraction(1)})

    @classmethod
    def gen(cls, variance: str, dim: int, i: int, coeff=1) -> "SymPoly":
        return cls(variance, dim, {(i,): coeff})

    @classmethod
    def monomial(cls, variance: str, dim: int, mono: Iterable[int], coeff=1) -> "SymPoly":
        return cls(variance, dim, {tuple(sorted(mono)): coeff})

    def zero_like(self) -> "SymPoly":
        return SymPoly._raw(self.variance, self.dim, {})

    def _check(self, other: "SymPoly") -> None:
        if not isinstance(other, SymPoly):
            raise TypeError(f"expected SymPoly, got {type(other).__name__}")
        if other.variance != self.variance or other.dim != self.dim:
            raise ValueError(
                f"cannot combine {self.variance}/dim {self.dim} with {other.variance}/dim {other.dim}"
            )

    # arithmetic

    def __add__(self, other: "SymPoly") -> "SymPoly":
        self._check(other)
        out = dict(self.terms)
        for mono, c in other.terms.items():
            v = out.get(mono, 0) + c
            if v:
                out[mono] = v
            else:
                out.pop(mono, None)
        return SymPoly._raw(self.variance, self.dim, out)

    def __neg__(self) -> "SymPoly":
        return SymPoly._raw(self.variance, self.dim, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "SymPoly") -> "SymPoly":
        return self + (-other)

    def scale(self, s) -> "SymPoly":
        s = Fraction(s)
        if not s:
            return self.zero_like()
        return SymPoly._raw(self.variance, self.dim, {m: c * s for m, c in self.terms.items()})

    def mul(self, other: "SymPoly", max_degree: int | None = None) -> "SymPoly":
        """Product, optionally discarding every monomial above ``max_degree``."""
        self._check(other)
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                if max_degree is not None and len(m1) + len(m2) > max_degree:
                    continue
                mono = mono_mul(m1, m2)
                out[mono] = out.get(mono, 0) + c1 * c2
        return SymPoly._raw(self.variance, self.dim, {m: c for m, c in out.items() if c})

    def __mul__(self, other):
        if isinstance(other, SymPoly):
            return self.mul(other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> "SymPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = SymPoly.one(self.variance, self.dim)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymPoly):
            return NotImplemented
        return (self.variance, self.dim, self.terms) == (other.variance, other.dim, other.terms)

    __hash__ = None  # type: ignore[assignment]

    # inspection

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((len(m) for m in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({len(m) for m in self.terms}) <= 1

    def homogeneous_part(self, d: int) -> "SymPoly":
        return SymPoly._raw(self.variance, self.dim, {m: c for m, c in self.terms.items() if len(m) == d})

    def truncate(self, max_degree: int) -> "SymPoly":
        return SymPoly._raw(self.variance, self.dim, {m: c for m, c in self.terms.items() if len(m) <= max_degree})

    def coefficient(self, mono: Iterable[int]) -> Fraction:
        return self.terms.get(tuple(sorted(mono)), Fraction(0))

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: mono_key(t[0]))

    def evaluate(self, point: Sequence) -> Fraction:
        """Value as a polynomial function at the coordinate vector ``point``."""
        if len(point) != self.dim:
            raise ValueError("point has the wrong length")
        pt = [Fraction(v) for v in point]
        total = Fraction(0)
        for mono, c in self.terms.items():
            v = c
            for i in mono:
                v *= pt[i]
            total += v
        return total

    def __repr__(self) -> str:
        return f"SymPoly({self.variance}, dim={self.dim}, {self.sorted_terms()!r})"


def poly_add(a: SymPoly, b: SymPoly) -> SymPoly:
    return a + b


def poly_mul(a: SymPoly, b: SymPoly) -> SymPoly:
    return a.mul(b)


def poly_exp(p: SymPoly, max_degree: int) -> SymPoly:
    """``exp(p)`` truncated at ``max_degree``; ``p`` must have zero constant term."""
    if () in p.terms:
        raise ValueError("exp needs a polynomial without constant term")
    result = SymPoly.one(p.variance, p.dim)
    power = SymPoly.one(p.variance, p.dim)
    k = 0
    while True:
        k += 1
        power = power.mul(p, max_degree).scale(Fraction(1, k))
        if power.is_zero():
            return result
        result = result + power


# --- text syntax --------------------------------------------------------------

def _coeff_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def join_terms(pieces: list[tuple[Fraction, str]]) -> str:
    """Join ``(coeff, body)`` pairs as ``c*body + ... − ...``; empty body is the constant."""
    if not pieces:
        return "0"
    out = []
    for n, (c, body) in enumerate(pieces):
        neg = c < 0
        a = -c if neg else c
        if body:
            text = body if a == 1 else f"{_coeff_str(a)}*{body}"
        else:
            text = _coeff_str(a)
        if n == 0:
            out.append(f"{MINUS}{text}" if neg else text)
        else:
            out.append(f" {MINUS} {text}" if neg else f" + {text}")
    return "".join(out)


def format_monomial(mono: Monomial, names: Sequence[str], variance: str) -> str:
    suffix = "*" if variance == DUAL else ""
    parts = []
    for i, e in sorted(exponents(mono).items()):
        parts.append(f"{names[i]}{suffix}" + (f"^{e}" if e > 1 else ""))
    return "*".join(parts)


def format_poly(p: SymPoly, names: Sequence[str]) -> str:
    """Canonical text in the fixed monomial order, e.g. ``h^2 + 4*e*f``."""
    if len(names) != p.dim:
        raise ValueError("need one name per basis element")
    return join_terms([(c, format_monomial(m, names, p.variance)) for m, c in p.sorted_terms()])


_SPLIT_TERMS = re.compile(r"([+\-−])")


def split_signed_terms(text: str) -> list[tuple[int, str]]:
    """Split ``a + b − c`` into ``[(+1, 'a'), (+1, 'b'), (-1, 'c')]``."""
    body = text.replace(" ", "").replace("\t", "")
    if not body:
        raise ValueError("empty expression")
    out: list[tuple[int, str]] = []
    sign = 1
    current = ""
    for tok in _SPLIT_TERMS.split(body):
        if tok in ("+", "-", MINUS):
            if current:
                out.append((sign, current))
                current = ""
                sign = 1
            if tok != "+":
                sign = -sign
        else:
            current += tok
    if not current:
        raise ValueError(f"dangling sign in {text!r}")
    out.append((sign, current))
    return out


def parse_poly(text: str, names: Sequence[str], variance: str = PRIMAL) -> SymPoly:
    """Parse ``coeff*name1^e1*name2^e2 + ...``; dual names carry a trailing ``*``."""
    index = {n: i for i, n in enumerate(names)}
    name_re = r"[A-Za-z_][A-Za-z0-9_]*" + (r"\*" if variance == DUAL else "")
    token = re.compile(rf"(?P<num>\d+(?:/\d+)?)|(?P<name>{name_re})(?:\^(?P<exp>\d+))?")
    terms: dict[Monomial, Fraction] = {}
    for sign, body in split_signed_terms(text):
        coeff = Fraction(sign)
        mono: list[int] = []
        pos = 0
        expect_factor = True
        while pos < len(body):
            if not expect_factor:
                if body[pos] != "*":
                    raise ValueError(f"expected '*' at {body[pos:]!r} in {text!r}")
                pos += 1
                expect_factor = True
                continue
            mt = token.match(body, pos)
            if not mt:
                raise ValueError(f"cannot parse {body[pos:]!r} in {text!r}")
            if mt.group("num"):
                coeff *= Fraction(mt.group("num"))
            else:
                nm = mt.group("name")
                key = nm[:-1] if variance == DUAL else nm
                if key not in index:
                    raise ValueError(f"unknown basis element {nm!r}")
                mono.extend([index[key]] * int(mt.group("exp") or 1))
            pos = mt.end()
            expect_factor = False
        if expect_factor:
            raise ValueError(f"trailing '*' in {text!r}")
        mono_t = tuple(sorted(mono))
        terms[mono_t] = terms.get(mono_t, Fraction(0)) + coeff
    return SymPoly(variance, len(names), terms)


# --- pairing and coproduct ----------------------------------------------------

def _pair_check(Pi: SymPoly, P: SymPoly) -> None:
    if Pi.variance != DUAL or P.variance != PRIMAL:
        raise ValueError("pair expects (dual, primal) arguments")
    if Pi.dim != P.dim:
        raise ValueError("dimension mismatch")


def pair(Pi: SymPoly, P: SymPoly) -> Fraction:
    """``<Pi, P>``: equal monomials pair to ``prod alpha_i!``, all others to zero."""
    _pair_check(Pi, P)
    small, big = (Pi.terms, P.terms) if len(Pi.terms) <= len(P.terms) else (P.terms, Pi.terms)
    total = Fraction(0)
    for mono, c in small.items():
        d = big.get(mono)
        if d is not None:
            total += c * d * factorial_weight(mono)
    return total


def pair_monomials_by_permutations(dual_mono: Monomial, primal_mono: Monomial) -> int:
    """Sum over all permutations of ``prod_i phi_i(x_sigma(i))`` with ``phi_i(x_j) = delta``."""
    if len(dual_mono) != len(primal_mono):
        return 0
    return sum(
        1 for sigma in permutations(range(len(primal_mono)))
        if all(dual_mono[i] == primal_mono[s] for i, s in enumerate(sigma))
    )


def pair_by_permutations(Pi: SymPoly, P: SymPoly) -> Fraction:
    """Pairing computed from the permutation-sum definition (slow reference)."""
    _pair_check(Pi, P)
    total = Fraction(0)
    for m1, c1 in Pi.terms.items():
        for m2, c2 in P.terms.items():
            if len(m1) == len(m2):
                total += c1 * c2 * pair_monomials_by_permutations(m1, m2)
    return total


def pair_tensor(Pis: Sequence[SymPoly], Ps: Sequence[SymPoly]) -> Fraction:
    if len(Pis) != len(Ps):
        raise ValueError("tensor factors of unequal length")
    out = Fraction(1)
    for a, b in zip(Pis, Ps):
        out *= pair(a, b)
        if not out:
            break
    return out


def coproduct(p: SymPoly) -> list[tuple[SymPoly, SymPoly]]:
    """``Delta(p)`` as a list of pure tensors; generators are primitive.

    Each monomial splits over every way of distributing each exponent between
    the two factors, weighted by binomial coefficients.  Coefficients are
    carried on the left factor.
    """
    acc: dict[tuple[Monomial, Monomial], Fraction] = {}
    for mono, c in p.terms.items():
        exps = sorted(exponents(mono).items())
        ranges = [range(e + 1) for _, e in exps]
        for split in product(*ranges):
            left: list[int] = []
            right: list[int] = []
            w = 1
            for (i, e), b in zip(exps, split):
                left.extend([i] * b)
                right.extend([i] * (e - b))
                w *= math.comb(e, b)
            key = (tuple(left), tuple(right))
            acc[key] = acc.get(key, Fraction(0)) + c * w
    return [
        (SymPoly._raw(p.variance, p.dim, {l: c}), SymPoly._raw(p.variance, p.dim, {r: Fraction(1)}))
        for (l, r), c in sorted(acc.items(), key=lambda t: (mono_key(t[0][0]), mono_key(t[0][1])))
        if c
    ]


# --- differential operators -----------------------------------------------------

def apply_diff_operator(delta: SymPoly, P: SymPoly) -> SymPoly:
    """Act on ``P`` by ``delta`` with each ``b_i*`` replaced by ``d/db_i``."""
    if delta.variance != DUAL or P.variance != PRIMAL:
        raise ValueError("apply_diff_operator expects (dual, primal) arguments")
    if delta.dim != P.dim:
        raise ValueError("dimension mismatch")
    out: dict[Monomial, Fraction] = {}
    for dm, dc in delta.terms.items():
        dexp = exponents(dm)
        for pm, pc in P.terms.items():
            if len(pm) < len(dm):
                continue
            pexp = exponents(pm)
            w = 1
            rest = dict(pexp)
            for i, e in dexp.items():
                have = pexp.get(i, 0)
                if have < e:
                    w = 0
                    break
                w *= math.perm(have, e)
                rest[i] = have - e
            if not w:
                continue
            mono = from_exponents(rest)
            out[mono] = out.get(mono, Fraction(0)) + dc * pc * w
    return SymPoly(PRIMAL, P.dim, out)


# --- adjoint and coadjoint actions --------------------------------------------------

def _generator_action(L: "StructureConstants", i: int, j: int, variance: str) -> list[tuple[int, Fraction]]:
    """Image of the generator ``j`` under ``b_i``: ``[b_i, b_j]`` or ``b_i . b_j*``."""
    if variance == PRIMAL:
        return list(L.bracket(i, j))
    # (b_i . b_j*)(b_k) = -b_j*([b_i, b_k]) = -c_ik^j
    out = []
    for k in range(L.dim):
        c = L.coefficient(i, k, j)
        if c:
            out.append((k, -c))
    return out


def adjoint_action_sym(L: "StructureConstants", i: int, p: SymPoly) -> SymPoly:
    """Derivation extension of ``ad(b_i)`` (primal) or of the coadjoint action (dual)."""
    if not 0 <= i < L.dim:
        raise IndexError(f"basis index {i} out of range")
    if p.dim != L.dim:
        raise ValueError("dimension mismatch")
    out: dict[Monomial, Fraction] = {}
    images = {}
    for mono, c in p.terms.items():
        for j, e in exponents(mono).items():
            if j not in images:
                images[j] = _generator_action(L, i, j, p.variance)
            if not images[j]:
                continue
            rest = list(mono)
            rest.remove(j)
            for k, a in images[j]:
                m2 = tuple(sorted(rest + [k]))
                out[m2] = out.get(m2, Fraction(0)) + c * e * a
    return SymPoly(p.variance, p.dim, out)


# --- exact row reduction ------------------------------------------------------------

def rref(rows: Iterable[Sequence[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form (nonzero rows only) and the pivot columns."""
    mat = [[Fraction(x) for x in r] for r in rows if any(r)]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][col]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][col]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col]:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[list[Fraction]]:
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def _action_matrix(L: "StructureConstants", variance: str, d: int) -> tuple[list[Monomial], list[list[Fraction]]]:
    """Rows ``(i, target)``, columns = source monomials of degree ``d``."""
    monos = monomials_of_degree(L.dim, d)
    col = {m: n for n, m in enumerate(monos)}
    rows = []
    for i in range(L.dim):
        block: dict[Monomial, list[Fraction]] = {}
        for n, mono in enumerate(monos):
            img = adjoint_action_sym(L, i, SymPoly._raw(variance, L.dim, {mono: Fraction(1)}))
            for target, c in img.terms.items():
                block.setdefault(target, [Fraction(0)] * len(monos))[n] += c
        rows.extend(block[t] for t in sorted(block, key=lambda t: col[t]))
    return monos, rows


def invariants_basis(L: "StructureConstants", variance: str, d: int) -> list[SymPoly]:
    """Canonical basis of the degree-``d`` invariants (RREF, leading coefficient 1)."""
    if d < 0:
        raise ValueError("degree must be nonnegative")
    monos, rows = _action_matrix(L, variance, d)
    kernel = nullspace(rows, len(monos))
    canon, _ = rref(kernel, len(monos))
    return [SymPoly(variance, L.dim, {monos[n]: c for n, c in enumerate(v) if c}) for v in canon]


class CoinvariantReducer:
    """Canonical representatives of degree-``d`` dual polynomials modulo the coadjoint image.

    The image is put in RREF over the monomial order; reduction clears every
    pivot monomial, so two polynomials are congruent iff their reductions agree.
    """

    def __init__(self, L: "StructureConstants", d: int):
        if d < 0:
            raise ValueError("degree must be nonnegative")
        self.degree = d
        self.dim = L.dim
        monos = monomials_of_degree(L.dim, d)
        self._monos = monos
        self._col = {m: n for n, m in enumerate(monos)}
        image_rows = []
        for i in range(L.dim):
            for mono in monos:
                img = adjoint_action_sym(L, i, SymPoly._raw(DUAL, L.dim, {mono: Fraction(1)}))
                if img.terms:
                    row = [Fraction(0)] * len(monos)
                    for t, c in img.terms.items():
                        row[self._col[t]] = c
                    image_rows.append(row)
        self._rows, self._pivots = rref(image_rows, len(monos))

    @property
    def rank(self) -> int:
        return len(self._rows)

    def __call__(self, p: SymPoly) -> SymPoly:
        if p.variance != DUAL or p.dim != self.dim:
            raise ValueError("reducer expects a dual polynomial of matching dimension")
        if any(len(m) != self.degree for m in p.terms):
            raise ValueError(f"reducer for degree {self.degree} got a non-homogeneous input")
        vec = [Fraction(0)] * len(self._monos)
        for m, c in p.terms.items():
            vec[self._col[m]] = c
        for row, pc in zip(self._rows, self._pivots):
            f = vec[pc]
            if f:
                vec = [a - f * b for a, b in zip(vec, row)]
        return SymPoly(DUAL, self.dim, {self._monos[n]: c for n, c in enumerate(vec) if c})


def coinvariants_reducer(L: "StructureConstants", d: int) -> CoinvariantReducer:
    key = ("coinv", d)
    cache = L._cache
    if key not in cache:
        cache[key] = CoinvariantReducer(L, d)
    return cache[key]


def reduce_coinvariants(L: "StructureConstants", p: SymPoly) -> SymPoly:
    """Apply the degree-wise coinvariant reducer to every homogeneous part of ``p``."""
    out = p.zero_like()
    for d in sorted({len(m) for m in p.terms}):
        out = out + coinvariants_reducer(L, d)(p.homogeneous_part(d))
    return out


def is_invariant(L: "StructureConstants", p: SymPoly) -> bool:
    return all(adjoint_action_sym(L, i, p).is_zero() for i in range(L.dim))


Reducer = Callable[[SymPoly], SymPoly]
