"""Universal enveloping algebras in PBW normal form.

A word is a tuple of basis indices of the ambient algebra.  PBW order is
nondecreasing index order; over a doubled algebra the dual generators carry
the lowest indices, so every normal word is a dual block followed by a primal
block, matching ``U(Ig) = S(g*) (x) U(g)`` as vector spaces.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Mapping, Sequence

from .exactalg import MINUS, PRIMAL, SymPoly, join_terms, split_signed_terms
from .liealg import PLAIN, StructureConstants

Word = tuple[int, ...]
LEFTMOST = "leftmost"
RIGHTMOST = "rightmost"
STRATEGIES = (LEFTMOST, RIGHTMOST)


def is_pbw(word: Word) -> bool:
    return all(a <= b for a, b in zip(word, word[1:]))


def _add_into(acc: dict, terms, scale: Fraction) -> None:
    for w, c in terms:
        v = acc.get(w, 0) + scale * c
        if v:
            acc[w] = v
        else:
            acc.pop(w, None)


def _normal_form(L: StructureConstants, word: Word, strategy: str, memo: dict) -> tuple:
    """Normal form of one word as a tuple of ``(pbw_word, coeff)``."""
    hit = memo.get(word)
    if hit is not None:
        return hit
    n = len(word)
    pos = None
    if strategy == LEFTMOST:
        for i in range(n - 1):
            if word[i] > word[i + 1]:
                pos = i
                break
    else:
        for i in range(n - 2, -1, -1):
            if word[i] > word[i + 1]:
                pos = i
                break
    if pos is None:
        result = ((word, Fraction(1)),)
    else:
        a, b = word[pos], word[pos + 1]
        head, tail = word[:pos], word[pos + 2:]
        acc: dict[Word, Fraction] = {}
        # ab = ba + [a, b]
        _add_into(acc, _normal_form(L, head + (b, a) + tail, strategy, memo), Fraction(1))
        for k, c in L.bracket(a, b):
            _add_into(acc, _normal_form(L, head + (k,) + tail, strategy, memo), c)
        result = tuple(acc.items())
    memo[word] = result
    return result


def _memo(L: StructureConstants, strategy: str) -> dict:
    return L._cache.setdefault(("pbw", strategy), {})


def _small(c: Fraction):
    return c.numerator if c.denominator == 1 else c


def _fast_brackets(L: StructureConstants) -> tuple:
    # integral structure constants as ints: Fraction arithmetic dominates otherwise
    cached = L._cache.get("fast_brackets")
    if cached is None:
        cached = tuple(tuple(tuple((k, _small(c)) for k, c in L.bracket(i, j)) for j in range(L.dim))
                       for i in range(L.dim))
        L._cache["fast_brackets"] = cached
    return cached


def _insert(L: StructureConstants, p: Word, a: int, memo: dict, br: tuple) -> tuple:
    """Normal form of ``p a`` for a PBW word ``p``.

    The only inversion of ``p a`` is its last pair, so this is leftmost-first
    rewriting with normal forms memoized per ``(sorted prefix, letter)``.
    """
    if not p or p[-1] <= a:
        return ((p + (a,), 1),)
    key = (p, a)
    hit = memo.get(key)
    if hit is not None:
        return hit
    q, x = p[:-1], p[-1]
    acc: dict = {}
    # q x a = (q a) x + q [x, a]
    for r, c in _insert(L, q, a, memo, br):
        _add_into(acc, _insert(L, r, x, memo, br), c)
    for k, c in br[x][a]:
        _add_into(acc, _insert(L, q, k, memo, br), c)
    result = tuple(acc.items())
    memo[key] = result
    return result


def normal_form(L: StructureConstants, word: Word, strategy: str = LEFTMOST) -> tuple:
    """Normal form of one word as ``((pbw_word, coeff), ...)``."""
    if strategy != LEFTMOST:
        return _normal_form(L, word, strategy, _memo(L, strategy))
    whole = _memo(L, "whole")
    hit = whole.get(word)
    if hit is not None:
        return hit
    memo = _memo(L, "insert")
    br = _fast_brackets(L)
    cur: dict = {(): 1}
    for a in word:
        nxt: dict = {}
        for p, c in cur.items():
            _add_into(nxt, _insert(L, p, a, memo, br), c)
        cur = nxt
    result = tuple(cur.items())
    if len(word) <= 12:
        whole[word] = result
    return result


class UElement:
    """An element of ``U(ambient)``: a map from PBW-ordered words to rationals."""

    __slots__ = ("ambient", "terms")

    def __init__(self, ambient: StructureConstants, terms: Mapping[Word, object] | None = None):
        self.ambient = ambient
        clean: dict[Word, Fraction] = {}
        for w, c in (terms or {}).items():
            c = Fraction(c)
            w = tuple(w)
            if not c:
                continue
            if not is_pbw(w):
                raise ValueError(f"word {w} is not PBW-ordered; use pbw_normalize")
            if any(not 0 <= i < ambient.dim for i in w):
                raise ValueError(f"word {w} out of range")
            clean[w] = clean.get(w, Fraction(0)) + c
        self.terms = {w: c for w, c in clean.items() if c}

    @classmethod
    def _raw(cls, ambient: StructureConstants, terms: dict) -> "UElement":
        obj = cls.__new__(cls)
        obj.ambient, obj.terms = ambient, terms
        return obj

    @classmethod
    def zero(cls, ambient: StructureConstants) -> "UElement":
        return cls._raw(ambient, {})

    @classmethod
    def one(cls, ambient: StructureConstants) -> "UElement":
        return cls._raw(ambient, {(): Fraction(1)})

    @classmethod
    def gen(cls, ambient: StructureConstants, i: int, coeff=1) -> "UElement":
        return cls(ambient, {(i,): coeff})

    def _check(self, other: "UElement") -> None:
        if not isinstance(other, UElement):
            raise TypeError(f"expected UElement, got {type(other).__name__}")
        if other.ambient != self.ambient:
            raise ValueError(f"ambient mismatch: {self.ambient.name} vs {other.ambient.name}")

    def __add__(self, other: "UElement") -> "UElement":
        self._check(other)
        acc = dict(self.terms)
        _add_into(acc, other.terms.items(), Fraction(1))
        return UElement._raw(self.ambient, acc)

    def __neg__(self) -> "UElement":
        return UElement._raw(self.ambient, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "UElement") -> "UElement":
        self._check(other)
        acc = dict(self.terms)
        _add_into(acc, other.terms.items(), Fraction(-1))
        return UElement._raw(self.ambient, acc)

    def scale(self, s) -> "UElement":
        s = Fraction(s)
        if not s:
            return UElement.zero(self.ambient)
        return UElement._raw(self.ambient, {w: c * s for w, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, UElement):
            return u_multiply(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int) -> "UElement":
        out = UElement.one(self.ambient)
        for _ in range(n):
            out = u_multiply(out, self)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, UElement):
            return NotImplemented
        return self.ambient == other.ambient and self.terms == other.terms

    __hash__ = None  # type: ignore[assignment]

    def is_zero(self) -> bool:
        return not self.terms

    def filtration_degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def __repr__(self) -> str:
        return f"UElement({self.ambient.name}: {format_u(self)})"

    def __str__(self) -> str:
        return format_u(self)


def pbw_normalize(w: Word | Iterable[tuple[Word, object]] | Mapping[Word, object],
                  ambient: StructureConstants, strategy: str = LEFTMOST,
                  memoize: bool = True) -> UElement:
    """Rewrite a word (or a linear combination of words) into PBW normal form.

    Each out-of-order adjacent pair ``ab`` becomes ``ba + [a, b]``.  The
    default strategy rewrites the leftmost inversion first and memoizes normal
    forms per ambient algebra.  Letters are pushed one at a time into an
    already sorted prefix, so the inversion being rewritten is always the
    leftmost one.  ``strategy="rightmost"`` rewrites the rightmost inversion of
    the whole word instead and exists to test that the result does not depend
    on the order of rewriting.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if isinstance(w, tuple) and all(isinstance(i, int) for i in w):
        items: Iterable = [(w, Fraction(1))]
    elif isinstance(w, Mapping):
        items = w.items()
    else:
        items = w
    acc: dict[Word, Fraction] = {}
    for word, c in items:
        word = tuple(word)
        if any(not 0 <= i < ambient.dim for i in word):
            raise ValueError(f"word {word} has generators outside {ambient.name}")
        c = Fraction(c)
        if c:
            if memoize:
                form = normal_form(ambient, word, strategy)
            else:
                form = _normal_form(ambient, word, strategy, {})
            _add_into(acc, form, c)
    return UElement._raw(ambient, _fractions(acc))


def _fractions(acc: dict) -> dict:
    return {w: Fraction(c) for w, c in acc.items()}


def u_multiply(a: UElement, b: UElement) -> UElement:
    a._check(b)
    L = a.ambient
    acc: dict[Word, Fraction] = {}
    for w1, c1 in a.terms.items():
        for w2, c2 in b.terms.items():
            _add_into(acc, normal_form(L, w1 + w2), c1 * c2)
    return UElement._raw(L, _fractions(acc))


def symmetrize(P: SymPoly, ambient: StructureConstants) -> UElement:
    """PBW symmetrization: each monomial goes to the average of all its orderings."""
    if P.variance != PRIMAL:
        raise ValueError("symmetrize expects a primal polynomial")
    if P.dim != ambient.dim:
        raise ValueError("dimension mismatch")
    if ambient.kind != PLAIN:
        raise ValueError("symmetrize needs a plain ambient algebra")
    cache = ambient._cache.setdefault("sym", {})
    acc: dict[Word, Fraction] = {}
    for mono, c in P.terms.items():
        img = cache.get(mono)
        if img is None:
            # every distinct ordering occurs equally often among the d! permutations
            distinct = set(permutations(mono))
            weight = Fraction(1, len(distinct))
            img = tuple(pbw_normalize([(p, weight) for p in sorted(distinct)], ambient).terms.items())
            cache[mono] = img
        _add_into(acc, img, c)
    return UElement._raw(ambient, acc)


def adjoint_action_u(ambient: StructureConstants, i: int, u: UElement) -> UElement:
    """``b_i u - u b_i`` in normal form."""
    if not 0 <= i < ambient.dim:
        raise IndexError(f"basis index {i} out of range")
    g = UElement.gen(ambient, i)
    return u_multiply(g, u) - u_multiply(u, g)


def symbol(u: UElement, d: int) -> SymPoly:
    """Top PBW-filtration part of ``u`` in degree ``d``, read commutatively."""
    if u.filtration_degree() > d:
        raise ValueError(f"element has filtration degree {u.filtration_degree()} > {d}")
    return SymPoly(PRIMAL, u.ambient.dim, {w: c for w, c in u.terms.items() if len(w) == d})


# --- text form -------------------------------------------------------------------

def word_text(word: Word, names: Sequence[str]) -> str:
    return "·".join(names[i] for i in word)


def format_u(u: UElement) -> str:
    """Canonical text: terms sorted by word length, then by the word's generator names."""
    names = u.ambient.basis_names
    items = sorted(u.terms.items(), key=lambda t: (len(t[0]), [names[i] for i in t[0]]))
    return join_terms([(c, word_text(w, names)) for w, c in items])


def parse_word(text: str, ambient: StructureConstants) -> Word:
    index = {n: i for i, n in enumerate(ambient.basis_names)}
    if not text:
        return ()
    out = []
    for part in re.split(r"[·.]", text):
        if part not in index:
            raise ValueError(f"unknown generator {part!r}")
        out.append(index[part])
    return tuple(out)


def parse_u(text: str, ambient: StructureConstants) -> UElement:
    """Parse the canonical text form; words need not be in PBW order."""
    num = re.compile(r"^(\d+(?:/\d+)?)(?:\*(.*))?$")
    items = []
    for sign, body in split_signed_terms(text.replace(MINUS, "-")):
        coeff = Fraction(sign)
        m = num.match(body)
        if m:
            coeff *= Fraction(m.group(1))
            body = m.group(2) or ""
        items.append((parse_word(body, ambient), coeff))
    return pbw_normalize(items, ambient)
