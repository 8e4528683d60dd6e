"""Finite-dimensional Lie algebras given by exact rational structure constants.

A :class:`StructureConstants` value stores ``[b_i, b_j] = sum_k c_ij^k b_k`` for
``i < j`` only; the other orderings follow from antisymmetry.  Values are
obtained through :func:`validate_jacobi` (directly, or via the presets, the
JSON loader and :func:`double`), so every instance satisfies the Jacobi
identity.

Indices are 0-based in code and 1-based in every user-facing report.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .exactalg import DUAL, SymPoly

PLAIN = "plain"
DOUBLED = "doubled"

_RATIONAL = re.compile(r"^\s*[+-]?\d+(\s*/\s*\d+)?\s*$")


class StructureConstantsError(ValueError):
    """Malformed structure-constants input (dimensions, indices, coefficients)."""


class JacobiError(StructureConstantsError):
    """The Jacobi identity fails; ``violations`` lists every nonzero residual."""

    def __init__(self, violations: list[tuple[int, int, int, int, Fraction]], name: str = ""):
        self.violations = violations
        super().__init__(format_violations(violations, name))


def to_rational(value) -> Fraction:
    """Convert ``value`` to an exact :class:`Fraction`, refusing floats."""
    if isinstance(value, bool):
        raise StructureConstantsError(f"non-rational coefficient {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str) and _RATIONAL.match(value):
        return Fraction(value.replace(" ", ""))
    raise StructureConstantsError(f"non-rational coefficient {value!r}")


@dataclass(frozen=True)
class StructureConstants:
    """A validated Lie algebra.

    ``brackets`` is a sorted tuple of ``((i, j), ((k, c), ...))`` with ``i < j``
    and only nonzero coefficients.  For ``kind == "doubled"`` the first half of
    the basis is the dual copy ``g*`` and the second half is ``g``.
    """

    name: str
    basis_names: tuple[str, ...]
    brackets: tuple[tuple[tuple[int, int], tuple[tuple[int, Fraction], ...]], ...]
    kind: str = PLAIN
    _table: tuple = field(default=(), compare=False, repr=False)
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        m = self.dim
        table = [[() for _ in range(m)] for _ in range(m)]
        for (i, j), terms in self.brackets:
            table[i][j] = terms
            table[j][i] = tuple((k, -c) for k, c in terms)
        object.__setattr__(self, "_table", tuple(tuple(row) for row in table))

    @property
    def dim(self) -> int:
        return len(self.basis_names)

    @property
    def primal_dim(self) -> int:
        """Dimension of the underlying ``g`` (half the dimension when doubled)."""
        return self.dim // 2 if self.kind == DOUBLED else self.dim

    def bracket(self, i: int, j: int) -> tuple[tuple[int, Fraction], ...]:
        """Nonzero terms ``(k, c_ij^k)`` of ``[b_i, b_j]``."""
        return self._table[i][j]

    def coefficient(self, i: int, j: int, k: int) -> Fraction:
        for kk, c in self._table[i][j]:
            if kk == k:
                return c
        return Fraction(0)

    def nonzero_triples(self) -> tuple[tuple[int, int, int, Fraction], ...]:
        """All ``(i, j, k, c_ij^k)`` with nonzero coefficient, both orders of ``i, j``."""
        cached = self._cache.get("triples")
        if cached is None:
            cached = tuple(
                (i, j, k, c)
                for i in range(self.dim)
                for j in range(self.dim)
                for k, c in self._table[i][j]
            )
            self._cache["triples"] = cached
        return cached

    def index(self, name: str) -> int:
        try:
            return self.basis_names.index(name)
        except ValueError:
            raise KeyError(f"{name!r} is not a basis element of {self.name}") from None

    def is_abelian(self) -> bool:
        return not self.brackets

    def __str__(self) -> str:
        return f"{self.name} (dim {self.dim}, {self.kind})"


def _normalize_raw(raw: Mapping) -> tuple[str, tuple[str, ...], dict, str]:
    name = str(raw.get("name", "unnamed"))
    dim = raw.get("dim")
    basis = raw.get("basis")
    if basis is None:
        if not isinstance(dim, int) or dim <= 0:
            raise StructureConstantsError("dimension must be a positive integer")
        basis = [f"b{i + 1}" for i in range(dim)]
    basis = tuple(str(b) for b in basis)
    if dim is None:
        dim = len(basis)
    if not isinstance(dim, int) or dim <= 0:
        raise StructureConstantsError("dimension must be a positive integer")
    if len(basis) != dim:
        raise StructureConstantsError(f"dimension mismatch: dim={dim} but {len(basis)} basis names")
    if len(set(basis)) != dim:
        raise StructureConstantsError("basis names must be distinct")
    kind = raw.get("kind", PLAIN)
    if kind not in (PLAIN, DOUBLED):
        raise StructureConstantsError(f"unknown kind {kind!r}")

    table: dict[tuple[int, int], dict[int, Fraction]] = {}
    for (i, j), terms in dict(raw.get("brackets", {})).items():
        if not (0 <= i < dim and 0 <= j < dim):
            raise StructureConstantsError(f"bracket index ({i}, {j}) out of range for dim {dim}")
        if i == j:
            if any(to_rational(c) != 0 for c in dict(terms).values()):
                raise StructureConstantsError(f"[b{i + 1}, b{i + 1}] must vanish")
            continue
        sign = 1
        if i > j:
            i, j, sign = j, i, -1
        if (i, j) in table:
            raise StructureConstantsError(f"duplicate bracket entry ({i + 1}, {j + 1})")
        vec: dict[int, Fraction] = {}
        for k, c in dict(terms).items():
            if not 0 <= k < dim:
                raise StructureConstantsError(f"bracket target index {k} out of range for dim {dim}")
            c = to_rational(c)
            if c:
                vec[k] = vec.get(k, Fraction(0)) + sign * c
        table[(i, j)] = {k: c for k, c in vec.items() if c}
    return name, basis, table, kind


def jacobi_residuals(dim: int, bracket) -> list[tuple[int, int, int, int, Fraction]]:
    """Nonzero Jacobi residuals ``(i, j, k, m, value)`` for ``i < j < k``.

    ``bracket(i, j)`` returns a mapping ``k -> c_ij^k`` and must already be
    antisymmetric; the Jacobi expression is then totally antisymmetric in
    ``i, j, k``, so strictly increasing triples cover every case.
    """
    out = []
    for i, j, k in combinations(range(dim), 3):
        acc: dict[int, Fraction] = {}
        for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
            for l, x in bracket(a, b).items():
                for mm, y in bracket(l, c).items():
                    acc[mm] = acc.get(mm, Fraction(0)) + x * y
        for mm in sorted(acc):
            if acc[mm]:
                out.append((i, j, k, mm, acc[mm]))
    return out


def format_violations(violations, name: str = "") -> str:
    if not violations:
        return f"Jacobi identity holds for {name}".rstrip()
    lines = [f"Jacobi identity fails for {name or 'input'}: {len(violations)} nonzero residual(s)"]
    for i, j, k, m, v in violations:
        lines.append(f"  (i,j,k)=({i + 1},{j + 1},{k + 1}) component b{m + 1}: {v}")
    return "\n".join(lines)


def validate_jacobi(raw: Mapping | StructureConstants) -> StructureConstants:
    """Build a :class:`StructureConstants` from raw data, checking every axiom.

    ``raw`` carries ``name``, ``dim`` and/or ``basis``, ``brackets`` (a mapping
    ``(i, j) -> {k: coeff}`` with 0-based indices) and optionally ``kind``.
    Raises :class:`StructureConstantsError` on malformed input and
    :class:`JacobiError` (with the full residual list) if Jacobi fails.
    """
    if isinstance(raw, StructureConstants):
        raw = to_raw(raw)
    name, basis, table, kind = _normalize_raw(raw)
    dim = len(basis)

    def bracket(a: int, b: int) -> dict[int, Fraction]:
        if a < b:
            return table.get((a, b), {})
        if a > b:
            return {k: -c for k, c in table.get((b, a), {}).items()}
        return {}

    violations = jacobi_residuals(dim, bracket)
    if violations:
        raise JacobiError(violations, name)

    if kind == DOUBLED:
        if dim % 2:
            raise StructureConstantsError("a doubled algebra has even dimension")
        m = dim // 2
        for (i, j), vec in table.items():
            if j < m and vec:
                raise StructureConstantsError("brackets of two dual generators must vanish")
            if i < m <= j and any(k >= m for k in vec):
                raise StructureConstantsError("primal-dual brackets must land in the dual span")

    brackets = tuple(
        ((i, j), tuple(sorted(vec.items())))
        for (i, j), vec in sorted(table.items())
        if vec
    )
    return StructureConstants(name, basis, brackets, kind)


def to_raw(L: StructureConstants) -> dict:
    return {
        "name": L.name,
        "dim": L.dim,
        "basis": list(L.basis_names),
        "kind": L.kind,
        "brackets": {ij: dict(terms) for ij, terms in L.brackets},
    }


def from_brackets(name: str, basis: Sequence[str], brackets: Mapping[tuple[str, str], Mapping[str, object]]) -> StructureConstants:
    """Convenience constructor using basis names, e.g. ``{("h", "e"): {"e": 2}}``."""
    idx = {b: n for n, b in enumerate(basis)}
    raw = {
        (idx[a], idx[b]): {idx[k]: v for k, v in terms.items()}
        for (a, b), terms in brackets.items()
    }
    return validate_jacobi({"name": name, "basis": list(basis), "brackets": raw})


# --- adjoint representation -------------------------------------------------

def _check_vector(L: StructureConstants, x: Sequence) -> list[Fraction]:
    if len(x) != L.dim:
        raise ValueError(f"vector of length {len(x)} for algebra of dimension {L.dim}")
    return [Fraction(v) for v in x]


def ad_matrix(L: StructureConstants, x: Sequence) -> list[list[Fraction]]:
    """Matrix of ``ad_x``; column ``j`` holds the coordinates of ``[x, b_j]``."""
    x = _check_vector(L, x)
    m = L.dim
    out = [[Fraction(0)] * m for _ in range(m)]
    for i, xi in enumerate(x):
        if not xi:
            continue
        for j in range(m):
            for k, c in L.bracket(i, j):
                out[k][j] += xi * c
    return out


def bracket_vectors(L: StructureConstants, x: Sequence, y: Sequence) -> list[Fraction]:
    x, y = _check_vector(L, x), _check_vector(L, y)
    out = [Fraction(0)] * L.dim
    for i, xi in enumerate(x):
        if not xi:
            continue
        for j, yj in enumerate(y):
            if yj:
                for k, c in L.bracket(i, j):
                    out[k] += xi * yj * c
    return out


def ad_symbolic(L: StructureConstants) -> list[list[SymPoly]]:
    """``ad_x`` with ``x`` generic: entry ``(k, j)`` is ``sum_i c_ij^k b_i*``."""
    m = L.dim
    entries: list[list[dict]] = [[{} for _ in range(m)] for _ in range(m)]
    for i, j, k, c in L.nonzero_triples():
        entries[k][j][(i,)] = entries[k][j].get((i,), Fraction(0)) + c
    return [[SymPoly(DUAL, m, e) for e in row] for row in entries]


def matmul_poly(A: list[list[SymPoly]], B: list[list[SymPoly]], max_degree: int | None = None) -> list[list[SymPoly]]:
    n = len(A)
    zero = A[0][0].zero_like() if n else None
    out = []
    for r in range(n):
        row = []
        for c in range(n):
            acc = zero
            for t in range(n):
                if A[r][t].terms and B[t][c].terms:
                    acc = acc + A[r][t].mul(B[t][c], max_degree)
            row.append(acc)
        out.append(row)
    return out


def trace_ad_power(L: StructureConstants, k: int) -> SymPoly:
    """The polynomial function ``x -> Tr(ad_x^k)`` on ``g``, as an element of ``S(g*)``."""
    if not isinstance(k, int) or k < 1:
        raise ValueError("k must be a positive integer")
    A = ad_symbolic(L)
    P = A
    for _ in range(k - 1):
        P = matmul_poly(P, A)
    acc = SymPoly.zero(DUAL, L.dim)
    for i in range(L.dim):
        acc = acc + P[i][i]
    return acc


# --- the double Ig = g* x| g ------------------------------------------------

@lru_cache(maxsize=None)
def double(L: StructureConstants) -> StructureConstants:
    """The semidirect product ``g* x| g`` on basis ``(b_1*, ..., b_m*, b_1, ..., b_m)``.

    ``g*`` is abelian and ``g`` acts by the coadjoint action
    ``(x . phi)(y) = -phi([x, y])``, i.e.
    ``[b_i, b_j*] = -sum_k c_ik^j b_k*``.  That sign is the one for which the
    STU2 residual vanishes (see :mod:`lieduflo.diagrams`); the opposite sign
    violates Jacobi for every non-abelian ``g``.
    """
    if L.kind != PLAIN:
        raise StructureConstantsError(f"{L.name} is already doubled")
    m = L.dim
    raw: dict[tuple[int, int], dict[int, Fraction]] = {}
    for (i, j), terms in L.brackets:
        raw[(m + i, m + j)] = {m + k: c for k, c in terms}
    # [b_j*, b_i] = -[b_i, b_j*] = sum_k c_ik^j b_k*
    for i in range(m):
        for k in range(m):
            for j, c in L.bracket(i, k):
                vec = raw.setdefault((j, m + i), {})
                vec[k] = vec.get(k, Fraction(0)) + c
    basis = [f"{b}*" for b in L.basis_names] + list(L.basis_names)
    return validate_jacobi({"name": f"I{L.name}", "basis": basis, "brackets": raw, "kind": DOUBLED})


# --- presets ----------------------------------------------------------------

def abelian(m: int) -> StructureConstants:
    return validate_jacobi({"name": f"abelian{m}", "dim": m, "basis": [f"b{i + 1}" for i in range(m)], "brackets": {}})


def sl2() -> StructureConstants:
    return from_brackets("sl2", ["h", "e", "f"], {
        ("h", "e"): {"e": 2},
        ("h", "f"): {"f": -2},
        ("e", "f"): {"h": 1},
    })


def gl2() -> StructureConstants:
    names = ["e11", "e12", "e21", "e22"]
    pairs = [(1, 1), (1, 2), (2, 1), (2, 2)]
    raw: dict = {}
    # [e_ij, e_kl] = delta_jk e_il - delta_li e_kj
    for a, (i, j) in enumerate(pairs):
        for b, (k, l) in enumerate(pairs):
            if a >= b:
                continue
            vec: dict[int, int] = {}
            if j == k:
                t = pairs.index((i, l))
                vec[t] = vec.get(t, 0) + 1
            if l == i:
                t = pairs.index((k, j))
                vec[t] = vec.get(t, 0) - 1
            vec = {t: c for t, c in vec.items() if c}
            if vec:
                raw[(a, b)] = vec
    return validate_jacobi({"name": "gl2", "basis": names, "brackets": raw})


def heisenberg3() -> StructureConstants:
    return from_brackets("heisenberg3", ["x", "y", "z"], {("x", "y"): {"z": 1}})


def axb2() -> StructureConstants:
    """The non-unimodular two-dimensional algebra ``[a, b] = b``."""
    return from_brackets("axb2", ["a", "b"], {("a", "b"): {"b": 1}})


PRESETS = {
    "abelian1": lambda: abelian(1),
    "abelian2": lambda: abelian(2),
    "abelian3": lambda: abelian(3),
    "abelian4": lambda: abelian(4),
    "sl2": sl2,
    "gl2": gl2,
    "heisenberg3": heisenberg3,
    "axb2": axb2,
}

_preset_cache: dict[str, StructureConstants] = {}


def preset(name: str) -> StructureConstants:
    key = name.replace("(", "").replace(")", "").strip()
    if key not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    if key not in _preset_cache:
        _preset_cache[key] = PRESETS[key]()
    return _preset_cache[key]


# --- JSON file format ---------------------------------------------------------

def parse_json(text: str) -> dict:
    """Parse the structure-constants JSON format into raw (0-based) data.

    Does not check Jacobi; pass the result to :func:`validate_jacobi`.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureConstantsError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise StructureConstantsError("top-level JSON value must be an object")
    dim = doc.get("dim")
    basis = doc.get("basis")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim <= 0:
        raise StructureConstantsError("'dim' must be a positive integer")
    if not isinstance(basis, list) or len(basis) != dim:
        raise StructureConstantsError(f"dimension mismatch: dim={dim} but basis is {basis!r}")
    brackets: dict[tuple[int, int], dict[int, Fraction]] = {}
    for entry in doc.get("brackets", []):
        try:
            i, j = int(entry["i"]), int(entry["j"])
            terms = entry.get("terms", [])
        except (KeyError, TypeError, ValueError):
            raise StructureConstantsError(f"malformed bracket entry {entry!r}") from None
        if not 1 <= i < j <= dim:
            raise StructureConstantsError(f"bracket entry needs 1 <= i < j <= dim, got ({i}, {j})")
        if (i - 1, j - 1) in brackets:
            raise StructureConstantsError(f"duplicate bracket entry ({i}, {j})")
        vec: dict[int, Fraction] = {}
        for term in terms:
            k = term.get("k")
            if not isinstance(k, int) or not 1 <= k <= dim:
                raise StructureConstantsError(f"term index {k!r} out of range")
            vec[k - 1] = vec.get(k - 1, Fraction(0)) + to_rational(term.get("coeff", "1"))
        brackets[(i - 1, j - 1)] = vec
    return {"name": doc.get("name", "unnamed"), "dim": dim, "basis": basis, "brackets": brackets}


def load_json(path: str) -> StructureConstants:
    with open(path, encoding="utf-8") as fh:
        return validate_jacobi(parse_json(fh.read()))


def dump_json(L: StructureConstants) -> str:
    if L.kind != PLAIN:
        raise StructureConstantsError("only plain algebras have a file representation")
    entries = [
        {"i": i + 1, "j": j + 1, "terms": [{"k": k + 1, "coeff": str(c)} for k, c in terms]}
        for (i, j), terms in L.brackets
    ]
    return json.dumps({"name": L.name, "dim": L.dim, "basis": list(L.basis_names), "brackets": entries}, indent=2)


def vector_from_names(L: StructureConstants, coeffs: Mapping[str, object]) -> list[Fraction]:
    v = [Fraction(0)] * L.dim
    for name, c in coeffs.items():
        v[L.index(name)] += Fraction(c)
    return v


def basis_vector(L: StructureConstants, i: int) -> list[Fraction]:
    v = [Fraction(0)] * L.dim
    v[i] = Fraction(1)
    return v


def all_presets() -> Iterable[StructureConstants]:
    return (preset(n) for n in PRESETS)
