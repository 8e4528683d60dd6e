"""Arrow diagrams on strand skeleta and their tensor interpretation.

An arrow diagram is stored combinatorially: every arrow has a tail and a head,
each either a skeleton slot ``("s", strand, slot)`` or a vertex port
``("v", vertex, port)`` with ``port`` one of ``in1``, ``in2``, ``out``.  The
cyclic orientation at a trivalent vertex is linearized as the ordered pair
``(in1, in2)``; swapping them negates the value (AS).

The tensor interpretation places ``sum_i b_i* (x) b_i`` on every arrow (dual
at the tail), ``c_{in1,in2}^{out}`` on every vertex, contracts, and multiplies
the surviving generators along each strand in slot order.  Values live in
``U(Ig)^{(x) n}`` and are kept in PBW normal form over :func:`double`.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .enveloping import UElement, Word, _small, normal_form
from .exactalg import DUAL, Monomial, SymPoly, join_terms, reduce_coinvariants
from .liealg import PLAIN, StructureConstants, double

CAPPED = "capped"
STRING = "string"
PORTS = ("in1", "in2", "out")
RELATIONS = ("STU1", "STU2", "STU3", "AS", "IHX", "FourT")

Endpoint = tuple  # ("s", strand, slot) | ("v", vertex, port)


class DiagramError(ValueError):
    pass


class CapRelationError(DiagramError):
    """A primal generator survived on a capped strand during descent."""


@dataclass(frozen=True)
class Strand:
    kind: str
    attachment_count: int

    def __post_init__(self):
        if self.kind not in (CAPPED, STRING):
            raise DiagramError(f"unknown strand kind {self.kind!r}")
        if self.attachment_count < 0:
            raise DiagramError("attachment_count must be nonnegative")


@dataclass(frozen=True)
class Skeleton:
    strands: tuple[Strand, ...]

    @classmethod
    def of(cls, *spec: tuple[str, int]) -> "Skeleton":
        return cls(tuple(Strand(k, n) for k, n in spec))

    def __len__(self) -> int:
        return len(self.strands)


@dataclass(frozen=True)
class ArrowDiagram:
    """A uni-trivalent directed graph attached to a skeleton.

    ``arrows`` holds ``(tail, head)`` endpoint pairs.  With ``descended=True``
    the TF rule (no tails on strings) is enforced as well.
    """

    skeleton: Skeleton
    vertices: int
    arrows: tuple[tuple[Endpoint, Endpoint], ...]
    coefficient: Fraction = Fraction(1)
    descended: bool = False

    def __post_init__(self):
        object.__setattr__(self, "coefficient", Fraction(self.coefficient))
        object.__setattr__(self, "arrows", tuple((tuple(t), tuple(h)) for t, h in self.arrows))
        used: set = set()
        for tail, head in self.arrows:
            for end, is_tail in ((tail, True), (head, False)):
                self._check_endpoint(end, is_tail)
                if end in used:
                    raise DiagramError(f"endpoint {end} used twice")
                used.add(end)
        for s, strand in enumerate(self.skeleton.strands):
            for slot in range(strand.attachment_count):
                if ("s", s, slot) not in used:
                    raise DiagramError(f"slot {slot + 1} of strand {s + 1} is unattached")
        for v in range(self.vertices):
            for port in PORTS:
                if ("v", v, port) not in used:
                    raise DiagramError(f"port {port} of vertex {v + 1} is unattached")

    def _check_endpoint(self, end: Endpoint, is_tail: bool) -> None:
        if end[0] == "s":
            _, s, slot = end
            if not 0 <= s < len(self.skeleton.strands):
                raise DiagramError(f"strand {s + 1} does not exist")
            strand = self.skeleton.strands[s]
            if not 0 <= slot < strand.attachment_count:
                raise DiagramError(f"slot {slot + 1} out of range on strand {s + 1}")
            if is_tail and self.descended and strand.kind == STRING:
                raise DiagramError(f"arrow tail on string strand {s + 1} (tails forbidden on strings)")
        elif end[0] == "v":
            _, v, port = end
            if not 0 <= v < self.vertices:
                raise DiagramError(f"vertex {v + 1} does not exist")
            # two-in-one-out: tails leave through 'out', heads enter through in1/in2
            if is_tail and port != "out":
                raise DiagramError(f"arrow tail at input port {port} of vertex {v + 1}")
            if not is_tail and port not in ("in1", "in2"):
                raise DiagramError(f"arrow head at port {port} of vertex {v + 1}")
        else:
            raise DiagramError(f"malformed endpoint {end!r}")

    @property
    def n_strands(self) -> int:
        return len(self.skeleton.strands)

    def skeleton_endpoints(self) -> int:
        return sum(s.attachment_count for s in self.skeleton.strands)

    def scaled(self, c) -> "ArrowDiagram":
        return ArrowDiagram(self.skeleton, self.vertices, self.arrows, self.coefficient * Fraction(c), self.descended)

    def __str__(self) -> str:
        return format_diagram(self)


# --- constructors -------------------------------------------------------------

def wheel(k: int) -> ArrowDiagram:
    """The wheel with ``k`` spokes on one capped strand.

    Vertex ``i`` receives the cycle arrow on ``in1`` and spoke ``i`` (tail at
    slot ``i``) on ``in2``; the cycle runs ``v1 -> v2 -> ... -> vk -> v1``.
    """
    if not isinstance(k, int) or k < 1:
        raise DiagramError("a wheel needs at least one spoke")
    arrows = []
    for i in range(k):
        arrows.append((("s", 0, i), ("v", i, "in2")))
        arrows.append((("v", i, "out"), ("v", (i + 1) % k, "in1")))
    return ArrowDiagram(Skeleton.of((CAPPED, k)), k, tuple(arrows))


def single_arrow(from_strand: int, to_strand: int, skeleton_kinds: Sequence[str] | None = None,
                 descended: bool = False) -> ArrowDiagram:
    """One arrow with tail on ``from_strand`` and head on ``to_strand`` (0-based)."""
    n = max(from_strand, to_strand) + 1
    kinds = list(skeleton_kinds) if skeleton_kinds is not None else [CAPPED] * n
    if from_strand < 0 or to_strand < 0 or max(from_strand, to_strand) >= len(kinds):
        raise DiagramError("strand index out of range")
    counts = [0] * len(kinds)
    counts[from_strand] += 1
    counts[to_strand] += 1
    tail_slot = 0
    head_slot = 1 if from_strand == to_strand else 0
    skel = Skeleton(tuple(Strand(k, c) for k, c in zip(kinds, counts)))
    return ArrowDiagram(skel, 0, ((("s", from_strand, tail_slot), ("s", to_strand, head_slot)),), descended=descended)


class DiagramBuilder:
    """Assemble diagrams from sortable skeleton positions instead of slot indices.

    A position is ``(strand, key)``; slots on a strand are numbered by sorting
    keys.  Useful for inserting a local pattern into a fixed context.
    """

    def __init__(self, kinds: Sequence[str]):
        self.kinds = list(kinds)
        self._vertices = 0
        self._arrows: list[tuple] = []

    def vertex(self) -> int:
        self._vertices += 1
        return self._vertices - 1

    def arrow(self, tail, head) -> None:
        self._arrows.append((tail, head))

    @staticmethod
    def port(v: int, name: str) -> tuple:
        return ("v", v, name)

    def build(self, coeff=1, descended: bool = False) -> ArrowDiagram:
        keys: dict[int, list] = {s: [] for s in range(len(self.kinds))}
        for tail, head in self._arrows:
            for end in (tail, head):
                if end[0] != "v":
                    keys[end[0]].append(end[1])
        slot_of = {}
        for s, ks in keys.items():
            if len(set(ks)) != len(ks):
                raise DiagramError(f"two endpoints share a position on strand {s + 1}")
            for n, k in enumerate(sorted(ks)):
                slot_of[(s, k)] = n

        def conv(end):
            if end[0] == "v":
                return end
            return ("s", end[0], slot_of[(end[0], end[1])])

        skel = Skeleton(tuple(Strand(kind, len(keys[s])) for s, kind in enumerate(self.kinds)))
        arrows = tuple((conv(t), conv(h)) for t, h in self._arrows)
        return ArrowDiagram(skel, self._vertices, arrows, coeff, descended)


# --- tensor values --------------------------------------------------------------

@dataclass
class TensorValue:
    """An element of ``U(Ig)^{(x) factors}`` with every word in PBW normal form."""

    ambient: StructureConstants
    factors: int
    terms: dict = field(default_factory=dict)

    def __add__(self, other: "TensorValue") -> "TensorValue":
        if other.ambient != self.ambient or other.factors != self.factors:
            raise ValueError("incompatible tensor values")
        acc = dict(self.terms)
        for k, c in other.terms.items():
            v = acc.get(k, 0) + c
            if v:
                acc[k] = v
            else:
                acc.pop(k, None)
        return TensorValue(self.ambient, self.factors, acc)

    def scale(self, s) -> "TensorValue":
        s = Fraction(s)
        return TensorValue(self.ambient, self.factors, {k: c * s for k, c in self.terms.items()} if s else {})

    def __sub__(self, other: "TensorValue") -> "TensorValue":
        return self + other.scale(-1)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, TensorValue):
            return NotImplemented
        return (self.ambient, self.factors, self.terms) == (other.ambient, other.factors, other.terms)

    def degree(self) -> set[int]:
        """Set of total generator counts of the terms (one element when homogeneous)."""
        return {sum(len(w) for w in k) for k in self.terms}

    def factor_element(self) -> UElement:
        if self.factors != 1:
            raise ValueError("only single-factor values convert to a UElement")
        return UElement._raw(self.ambient, {k[0]: c for k, c in self.terms.items()})

    def __str__(self) -> str:
        names = self.ambient.basis_names
        items = sorted(self.terms.items(), key=lambda t: [(len(w), [names[i] for i in w]) for w in t[0]])
        return join_terms([(c, " ⊗ ".join("·".join(names[i] for i in w) or "1" for w in k)) for k, c in items])


def _triple_index(L: StructureConstants) -> dict:
    cached = L._cache.get("triple_index")
    if cached is None:
        cached = {}
        for r, s, t, c in L.nonzero_triples():
            for mask in product((False, True), repeat=3):
                key = tuple(v if keep else None for v, keep in zip((r, s, t), mask))
                cached.setdefault(key, []).append((r, s, t, _small(c)))
        L._cache["triple_index"] = cached
    return cached


def _vertex_order(D: ArrowDiagram, vertex_arrows: list) -> list[int]:
    """Order vertices so each one shares arrows with earlier ones when possible."""
    if not D.vertices:
        return []
    arrow_vertices: dict[int, set] = {}
    for v, arrs in enumerate(vertex_arrows):
        for a in arrs:
            arrow_vertices.setdefault(a, set()).add(v)
    order: list[int] = []
    seen: set = set()
    for start in range(D.vertices):
        if start in seen:
            continue
        stack = [start]
        while stack:
            v = stack.pop(0)
            if v in seen:
                continue
            seen.add(v)
            order.append(v)
            for a in vertex_arrows[v]:
                stack.extend(sorted(arrow_vertices[a] - seen))
    return order


def tensor_interpret_raw(D: ArrowDiagram, L: StructureConstants) -> dict[tuple[Word, ...], Fraction]:
    """The value in the tensor algebra, before PBW normalization.

    Words use the doubled index space: label ``i`` at a tail is ``b_i*`` (index
    ``i``), at a head it is ``b_i`` (index ``m + i``).
    """
    if L.kind != PLAIN:
        raise ValueError("tensor_interpret needs a plain Lie algebra")
    m = L.dim
    n_arrows = len(D.arrows)
    vertex_arrows = [[None, None, None] for _ in range(D.vertices)]
    on_vertex = set()
    slots: list[list] = [[None] * s.attachment_count for s in D.skeleton.strands]
    for a, (tail, head) in enumerate(D.arrows):
        for end, is_tail in ((tail, True), (head, False)):
            if end[0] == "v":
                vertex_arrows[end[1]][PORTS.index(end[2])] = a
                on_vertex.add(a)
            else:
                slots[end[1]][end[2]] = (a, is_tail)
    free = [a for a in range(n_arrows) if a not in on_vertex]
    order = _vertex_order(D, vertex_arrows)
    index = _triple_index(L)
    labels: list = [None] * n_arrows
    out: dict[tuple[Word, ...], Fraction] = {}
    base = _small(D.coefficient)

    def emit(weight: Fraction) -> None:
        for free_labels in product(range(m), repeat=len(free)):
            for a, lab in zip(free, free_labels):
                labels[a] = lab
            key = tuple(
                tuple(labels[a] if is_tail else m + labels[a] for a, is_tail in strand)
                for strand in slots
            )
            v = out.get(key, 0) + weight
            if v:
                out[key] = v
            else:
                out.pop(key, None)
        for a in free:
            labels[a] = None

    def place(step: int, weight: Fraction) -> None:
        if step == len(order):
            emit(weight)
            return
        arrs = vertex_arrows[order[step]]
        key = tuple(labels[a] for a in arrs)
        for triple in index.get(key, ()):
            setnow = []
            ok = True
            for a, val in zip(arrs, triple[:3]):
                cur = labels[a]
                if cur is None:
                    labels[a] = val
                    setnow.append(a)
                elif cur != val:
                    ok = False
                    break
            if ok:
                place(step + 1, weight * triple[3])
            for a in setnow:
                labels[a] = None

    place(0, base)
    return out


def normalize_tensor(raw: dict, L: StructureConstants, factors: int) -> TensorValue:
    """PBW-normalize every tensor factor of a raw tensor-algebra value over ``double(L)``."""
    I = double(L)
    acc: dict[tuple[Word, ...], Fraction] = {}
    for words, c in raw.items():
        expansions = [normal_form(I, w) for w in words]
        for combo in product(*expansions):
            coeff = c
            for _, x in combo:
                coeff *= x
            key = tuple(w for w, _ in combo)
            v = acc.get(key, 0) + coeff
            if v:
                acc[key] = v
            else:
                acc.pop(key, None)
    return TensorValue(I, factors, {k: Fraction(c) for k, c in acc.items()})


def tensor_interpret(D: ArrowDiagram, L: StructureConstants, n: int | None = None) -> TensorValue:
    """``T(D)`` in ``U(Ig)^{(x) n}``: sum over labelings, contracted and normalized."""
    if n is not None and n != D.n_strands:
        raise DiagramError(f"diagram has {D.n_strands} strands, expected {n}")
    return normalize_tensor(tensor_interpret_raw(D, L), L, D.n_strands)


def tensor_interpret_sum(diagrams: Iterable[ArrowDiagram], L: StructureConstants) -> TensorValue:
    """``T`` of a formal linear combination (coefficients live on the diagrams)."""
    diagrams = list(diagrams)
    if not diagrams:
        raise DiagramError("empty combination")
    n = diagrams[0].n_strands
    total: dict = {}
    for D in diagrams:
        if D.n_strands != n:
            raise DiagramError("all diagrams in a combination need the same skeleton size")
        for k, c in tensor_interpret_raw(D, L).items():
            v = total.get(k, 0) + c
            if v:
                total[k] = v
            else:
                total.pop(k, None)
    return normalize_tensor(total, L, n)


def project_to_dual(v: TensorValue, L: StructureConstants) -> SymPoly:
    """Read a single-factor, all-dual value as a polynomial in ``S(g*)``."""
    if v.factors != 1:
        raise ValueError("project_to_dual expects a single tensor factor")
    m = L.dim
    terms: dict[Monomial, Fraction] = {}
    for (word,), c in v.terms.items():
        if any(i >= m for i in word):
            raise ValueError("value contains a primal generator; it is not an element of S(g*)")
        terms[word] = terms.get(word, Fraction(0)) + c
    return SymPoly(DUAL, m, terms)


# --- descent to S(g*)_g^{k1} (x) U(g)^{k2} ------------------------------------------

@dataclass
class DescendedValue:
    """Element of ``S(g*)_g^{(x) k1} (x) U(g)^{(x) k2}``.

    Keys are ``(capped monomials, string words)``; capped parts are canonical
    coinvariant representatives, so equality of values is equality of dicts.
    """

    L: StructureConstants
    k1: int
    k2: int
    terms: dict = field(default_factory=dict)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "DescendedValue") -> "DescendedValue":
        acc = dict(self.terms)
        for k, c in other.terms.items():
            v = acc.get(k, 0) + c
            if v:
                acc[k] = v
            else:
                acc.pop(k, None)
        return DescendedValue(self.L, self.k1, self.k2, acc)

    def capped_part(self, i: int) -> SymPoly:
        if self.k1 != 1 or self.k2 != 0:
            raise ValueError("capped_part is defined for a single capped factor")
        return SymPoly(DUAL, self.L.dim, {k[0][0]: c for k, c in self.terms.items()})

    def __str__(self) -> str:
        names = self.L.basis_names
        dn = [f"{n}*" for n in names]
        items = sorted(self.terms.items(), key=lambda t: (t[0][0], [(len(w), w) for w in t[0][1]]))
        pieces = []
        for (monos, words), c in items:
            parts = ["*".join(dn[i] for i in mono) or "1" for mono in monos]
            parts += ["·".join(names[i] for i in w) or "1" for w in words]
            pieces.append((c, " ⊗ ".join(parts)))
        return join_terms(pieces)


def descend(v: TensorValue, k1: int, k2: int, L: StructureConstants, strict: bool = True) -> DescendedValue:
    """Project onto coinvariants in the first ``k1`` factors and set ``g* = 0`` in the rest.

    A capped factor must be a pure dual word.  With ``strict=True`` a surviving
    primal generator raises :class:`CapRelationError`; with ``strict=False``
    such terms are dropped, which is the quotient by right multiplication by
    ``g``.
    """
    if v.factors != k1 + k2:
        raise ValueError(f"value has {v.factors} factors, expected {k1} + {k2}")
    m = L.dim
    reduced_cache: dict[Monomial, SymPoly] = {}
    acc: dict = {}
    for words, c in v.terms.items():
        capped, strings = words[:k1], words[k1:]
        bad = next((w for w in capped if any(i >= m for i in w)), None)
        if bad is not None:
            if strict:
                raise CapRelationError(f"primal generator survives on a capped strand in word {bad}")
            continue
        if any(i < m for w in strings for i in w):
            continue
        string_words = tuple(tuple(i - m for i in w) for w in strings)
        parts = []
        for w in capped:
            if w not in reduced_cache:
                reduced_cache[w] = reduce_coinvariants(L, SymPoly._raw(DUAL, m, {w: Fraction(1)}))
            parts.append(list(reduced_cache[w].terms.items()))
        for combo in product(*parts):
            coeff = c
            for _, x in combo:
                coeff *= x
            key = (tuple(mono for mono, _ in combo), string_words)
            val = acc.get(key, 0) + coeff
            if val:
                acc[key] = val
            else:
                acc.pop(key, None)
    return DescendedValue(L, k1, k2, acc)


def adjoint_action_on_strings(dv: DescendedValue, j: int) -> DescendedValue:
    """Sum over string factors of ``ad(b_j)`` acting on that factor."""
    L = dv.L
    acc: dict = {}
    for (monos, words), c in dv.terms.items():
        for s, w in enumerate(words):
            for sign, word in ((1, (j,) + w), (-1, w + (j,))):
                for nw, x in normal_form(L, word):
                    key = (monos, words[:s] + (nw,) + words[s + 1:])
                    val = acc.get(key, 0) + sign * c * x
                    if val:
                        acc[key] = val
                    else:
                        acc.pop(key, None)
    return DescendedValue(L, dv.k1, dv.k2, {k: Fraction(c) for k, c in acc.items()})


# --- relation residuals -----------------------------------------------------------

EPS = Fraction(1, 1000)


@dataclass(frozen=True)
class Site:
    """Context for a local relation.

    ``spectators`` are arrows ``("arrow", tail_pos, head_pos)`` or Y-shaped
    trees ``("tree", tail_pos1, tail_pos2, head_pos)``; ``anchors`` are the
    positions the relation uses (their meaning depends on the relation).  A
    position is ``(strand, key)`` with a rational sort key.
    """

    n_strands: int
    spectators: tuple = ()
    anchors: tuple = ()


def _add_spectators(b: DiagramBuilder, site: Site) -> None:
    for spec in site.spectators:
        if spec[0] == "arrow":
            b.arrow(spec[1], spec[2])
        elif spec[0] == "tree":
            v = b.vertex()
            b.arrow(spec[1], b.port(v, "in1"))
            b.arrow(spec[2], b.port(v, "in2"))
            b.arrow(b.port(v, "out"), spec[3])
        else:
            raise DiagramError(f"unknown spectator {spec[0]!r}")


def _shift(pos, by) -> tuple:
    return (pos[0], pos[1] + by)


def relation_terms(rel: str, site: Site) -> list[ArrowDiagram]:
    """The signed diagrams whose sum is the relation (its value should vanish)."""
    kinds = [CAPPED] * site.n_strands
    anchors = site.anchors

    def new() -> DiagramBuilder:
        b = DiagramBuilder(kinds)
        _add_spectators(b, site)
        return b

    P = DiagramBuilder.port
    out: list[ArrowDiagram] = []
    if rel == "STU1":
        # vertex with head at p = (heads a, b) - (heads b, a)
        p, A, B = _need(anchors, 3, rel)
        b = new(); v = b.vertex()
        b.arrow(A, P(v, "in1")); b.arrow(B, P(v, "in2")); b.arrow(P(v, "out"), p)
        out.append(b.build(1))
        b = new(); b.arrow(A, p); b.arrow(B, _shift(p, EPS))
        out.append(b.build(-1))
        b = new(); b.arrow(B, p); b.arrow(A, _shift(p, EPS))
        out.append(b.build(1))
    elif rel == "STU2":
        # (head x, tail y) - (tail y, head x) = vertex(in1 = new tail, in2 = x) -> y's head
        p, A, B = _need(anchors, 3, rel)
        b = new(); b.arrow(A, p); b.arrow(_shift(p, EPS), B)
        out.append(b.build(1))
        b = new(); b.arrow(p, B); b.arrow(A, _shift(p, EPS))
        out.append(b.build(-1))
        b = new(); v = b.vertex()
        b.arrow(p, P(v, "in1")); b.arrow(A, P(v, "in2")); b.arrow(P(v, "out"), B)
        out.append(b.build(-1))
    elif rel == "STU3":
        p, A, B = _need(anchors, 3, rel)
        b = new(); b.arrow(p, A); b.arrow(_shift(p, EPS), B)
        out.append(b.build(1))
        b = new(); b.arrow(p, B); b.arrow(_shift(p, EPS), A)
        out.append(b.build(-1))
    elif rel == "AS":
        A, B, C = _need(anchors, 3, rel)
        for first, second in ((A, B), (B, A)):
            b = new(); v = b.vertex()
            b.arrow(first, P(v, "in1")); b.arrow(second, P(v, "in2")); b.arrow(P(v, "out"), C)
            out.append(b.build(1))
    elif rel == "IHX":
        # [[a,b],c] - [a,[b,c]] + [b,[a,c]]
        A, B, C, D = _need(anchors, 4, rel)
        for inner, outer, inner_slot, sign in (((A, B), C, "in1", 1), ((B, C), A, "in2", -1), ((A, C), B, "in2", 1)):
            b = new(); v1 = b.vertex(); v2 = b.vertex()
            b.arrow(inner[0], P(v1, "in1")); b.arrow(inner[1], P(v1, "in2"))
            other_slot = "in2" if inner_slot == "in1" else "in1"
            b.arrow(P(v1, "out"), P(v2, inner_slot)); b.arrow(outer, P(v2, other_slot))
            b.arrow(P(v2, "out"), D)
            out.append(b.build(sign))
    elif rel == "FourT":
        # [a_ij + a_ik, a_jk] = 0 on three strands; X Y means X below Y
        pi, pj, pk = _need(anchors, 3, rel)
        if len({pi[0], pj[0], pk[0]}) != 3:
            raise DiagramError("FourT needs anchors on three distinct strands")
        pos = {"i": pi, "j": pj, "k": pk}

        def layer(b, x, y, level):
            b.arrow(_shift(pos[x], level * EPS), _shift(pos[y], level * EPS))

        for first, second, sign in ((("i", "j"), ("j", "k"), 1), (("j", "k"), ("i", "j"), -1),
                                    (("i", "k"), ("j", "k"), 1), (("j", "k"), ("i", "k"), -1)):
            b = new()
            layer(b, *first, 0)
            layer(b, *second, 1)
            out.append(b.build(sign))
    else:
        raise DiagramError(f"unknown relation {rel!r}; expected one of {', '.join(RELATIONS)}")
    return out


def _need(anchors, k: int, rel: str):
    if len(anchors) != k:
        raise DiagramError(f"{rel} needs {k} anchor positions, got {len(anchors)}")
    return anchors


def relation_residual(rel: str, site: Site, L: StructureConstants) -> TensorValue:
    """``T`` of the relation's signed sum of diagrams; zero when ``T`` respects it."""
    return tensor_interpret_sum(relation_terms(rel, site), L)


def random_site(rel: str, rng: random.Random, max_strands: int = 3, max_spectator_arrows: int = 4) -> Site:
    """A random context: 1-3 strands, up to four spectator arrows (a Y-tree counts three)."""
    n = 3 if rel == "FourT" else rng.randint(1, max_strands)
    used: set = set()

    def pos(half: bool = False) -> tuple:
        while True:
            s = rng.randrange(n)
            k = rng.randrange(40)
            key = Fraction(2 * k + 1, 2) if half else Fraction(k)
            if (s, key) not in used:
                used.add((s, key))
                return (s, key)

    spectators = []
    budget = rng.randint(0, max_spectator_arrows)
    while budget > 0:
        if budget >= 3 and rng.random() < 0.3:
            spectators.append(("tree", pos(), pos(), pos()))
            budget -= 3
        else:
            spectators.append(("arrow", pos(), pos()))
            budget -= 1
    if rel == "FourT":
        strands = [0, 1, 2]
        rng.shuffle(strands)
        anchors = []
        for s in strands:
            while True:
                key = Fraction(2 * rng.randrange(40) + 1, 2)
                if (s, key) not in used:
                    used.add((s, key))
                    anchors.append((s, key))
                    break
        return Site(n, tuple(spectators), tuple(anchors))
    count = 4 if rel == "IHX" else 3
    return Site(n, tuple(spectators), tuple(pos(half=True) for _ in range(count)))


# --- literal format -------------------------------------------------------------------

def _fmt_end(end: Endpoint) -> str:
    if end[0] == "s":
        return f"s{end[1] + 1}.{end[2] + 1}"
    return f"v{end[1] + 1}.{end[2]}"


def format_diagram(D: ArrowDiagram) -> str:
    """``skeleton: capped(3); vertices: 3; arrows: s1.1->v1.in2, ...[; coeff: p/q]``."""
    skel = ", ".join(f"{s.kind}({s.attachment_count})" for s in D.skeleton.strands)
    arrows = ", ".join(f"{_fmt_end(t)}->{_fmt_end(h)}" for t, h in D.arrows)
    text = f"skeleton: {skel}; vertices: {D.vertices}; arrows: {arrows}"
    if D.coefficient != 1:
        text += f"; coeff: {D.coefficient}"
    return text


_END = re.compile(r"^(?:s(\d+)\.(\d+)|v(\d+)\.(in1|in2|out))$")


def _parse_end(tok: str) -> Endpoint:
    mt = _END.match(tok.strip())
    if not mt:
        raise DiagramError(f"bad endpoint {tok!r}")
    if mt.group(1):
        return ("s", int(mt.group(1)) - 1, int(mt.group(2)) - 1)
    return ("v", int(mt.group(3)) - 1, mt.group(4))


def parse_diagram(text: str, descended: bool = False) -> ArrowDiagram:
    fields: dict[str, str] = {}
    for part in text.split(";"):
        if not part.strip():
            continue
        if ":" not in part:
            raise DiagramError(f"expected 'key: value' in {part!r}")
        k, v = part.split(":", 1)
        fields[k.strip()] = v.strip()
    unknown = set(fields) - {"skeleton", "vertices", "arrows", "coeff"}
    if unknown or "skeleton" not in fields:
        raise DiagramError(f"malformed diagram literal {text!r}")
    strands = []
    for tok in filter(None, (t.strip() for t in fields["skeleton"].split(","))):
        mt = re.match(r"^(capped|string)\((\d+)\)$", tok)
        if not mt:
            raise DiagramError(f"bad strand {tok!r}")
        strands.append(Strand(mt.group(1), int(mt.group(2))))
    arrows = []
    for tok in filter(None, (t.strip() for t in fields.get("arrows", "").split(","))):
        if "->" not in tok:
            raise DiagramError(f"bad arrow {tok!r}")
        t, h = tok.split("->")
        arrows.append((_parse_end(t), _parse_end(h)))
    coeff = Fraction(fields.get("coeff", "1"))
    return ArrowDiagram(Skeleton(tuple(strands)), int(fields.get("vertices", "0")), tuple(arrows), coeff, descended)


def wheel_polynomial(k: int, L: StructureConstants) -> SymPoly:
    """``T(w_k)`` read as a polynomial on ``g``."""
    return project_to_dual(tensor_interpret(wheel(k), L), L)


__all__ = [
    "CAPPED", "STRING", "RELATIONS", "Strand", "Skeleton", "ArrowDiagram", "DiagramBuilder",
    "DiagramError", "CapRelationError", "TensorValue", "DescendedValue", "Site", "wheel",
    "single_arrow", "tensor_interpret", "tensor_interpret_raw", "tensor_interpret_sum",
    "normalize_tensor", "project_to_dual", "descend", "adjoint_action_on_strings",
    "relation_terms", "relation_residual", "random_site", "format_diagram", "parse_diagram",
    "wheel_polynomial",
]
