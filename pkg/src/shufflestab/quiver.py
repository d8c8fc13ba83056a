"""Quivers, dimension vectors and equivariant weight multisets.

A weight is a linear form in the symbols, stored as a Poly.  A KClass is a
finite signed multiset of weights.  The weight of a map ``X -> Y`` is
``y - x``; the cotangent-dual directions carry an extra ``+h``.
"""

from __future__ import annotations

import functools
import hashlib
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .symalg import CHERN, FRAMING, HBAR, Poly, RatFun, decode, encode, hbar, prod

DimVec = tuple[int, ...]


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class Quiver:
    """Vertices are addressed by 1-based position; arrows are (tail, head) pairs."""

    vertices: tuple
    arrows: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        n = len(self.vertices)
        for t, hd in self.arrows:
            if not (1 <= t <= n and 1 <= hd <= n):
                raise ValueError(f"arrow ({t}, {hd}) refers to a missing vertex")
        object.__setattr__(self, "arrows", tuple(sorted(tuple(e) for e in self.arrows)))

    @property
    def n(self) -> int:
        return len(self.vertices)

    def adjacency(self) -> list[list[int]]:
        q = [[0] * self.n for _ in range(self.n)]
        for t, hd in self.arrows:
            q[t - 1][hd - 1] += 1
        return q

    def dimvec(self, v: Iterable[int]) -> DimVec:
        v = tuple(int(x) for x in v)
        if len(v) != self.n:
            raise DimensionError(f"dimension vector {v} has length {len(v)}, quiver has {self.n} vertices")
        if any(x < 0 for x in v):
            raise DimensionError(f"dimension vector {v} has a negative entry")
        return v

    def to_json(self) -> dict:
        ids = list(self.vertices)
        return {"vertices": ids, "arrows": [[ids[t - 1], ids[hd - 1]] for t, hd in self.arrows]}

    def canonical_text(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()

    @classmethod
    def from_json(cls, data: Mapping) -> "Quiver":
        if not isinstance(data, Mapping) or "vertices" not in data:
            raise ValueError('quiver JSON needs a "vertices" list')
        ids = list(data["vertices"])
        if len(set(map(json.dumps, ids))) != len(ids):
            raise ValueError("duplicate vertex ids")
        pos = {json.dumps(v): i + 1 for i, v in enumerate(ids)}
        arrows = []
        for e in data.get("arrows", []):
            if len(e) != 2:
                raise ValueError(f"arrow {e!r} is not a [tail, head] pair")
            try:
                arrows.append((pos[json.dumps(e[0])], pos[json.dumps(e[1])]))
            except KeyError as exc:
                raise ValueError(f"arrow {e!r} names an unknown vertex") from exc
        return cls(tuple(ids), tuple(arrows))

    @classmethod
    def load(cls, path: str | Path) -> "Quiver":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))


def a1_quiver() -> Quiver:
    return Quiver((1,))


def jordan_quiver() -> Quiver:
    return Quiver((1,), ((1, 1),))


def a2_quiver() -> Quiver:
    return Quiver((1, 2), ((1, 2),))


def _sym(kind: int, vertex: int, index: int) -> Poly:
    return Poly.symbol(encode(kind, vertex, index))


class KClass:
    """Finite signed multiset of weights (a virtual equivariant K-class)."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Poly, int] | Iterable[Poly] = ()):
        if isinstance(terms, Mapping):
            c = Counter()
            for w, m in terms.items():
                c[Poly.coerce(w)] += m
        else:
            c = Counter(Poly.coerce(w) for w in terms)
        self._terms = {w: m for w, m in c.items() if m}

    def items(self) -> Iterator[tuple[Poly, int]]:
        return iter(self._terms.items())

    def multiplicity(self, w) -> int:
        return self._terms.get(Poly.coerce(w), 0)

    def weights(self) -> list[Poly]:
        return list(self._terms)

    @property
    def rank(self) -> int:
        return sum(self._terms.values())

    def __len__(self) -> int:
        return len(self._terms)

    def __add__(self, other: "KClass") -> "KClass":
        c = Counter(self._terms)
        for w, m in other._terms.items():
            c[w] += m
        return KClass(c)

    def __neg__(self) -> "KClass":
        return KClass({w: -m for w, m in self._terms.items()})

    def __sub__(self, other: "KClass") -> "KClass":
        return self + (-other)

    def __eq__(self, other) -> bool:
        return isinstance(other, KClass) and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def filter(self, pred) -> "KClass":
        return KClass({w: m for w, m in self._terms.items() if pred(w)})

    def substitute(self, assignment: Mapping[int, Poly]) -> "KClass":
        c = Counter()
        for w, m in self._terms.items():
            c[w.substitute(assignment)] += m
        return KClass(c)

    def rename(self, mapping: Mapping[int, int]) -> "KClass":
        c = Counter()
        for w, m in self._terms.items():
            c[w.rename(mapping)] += m
        return KClass(c)

    def shift(self, amount: Poly) -> "KClass":
        return KClass({w + amount: m for w, m in self._terms.items()})

    def __repr__(self) -> str:
        body = ", ".join(f"{w}: {m}" for w, m in sorted(self._terms.items(), key=lambda t: str(t[0])))
        return f"KClass({{{body}}})"


@dataclass(frozen=True)
class GradeSplit:
    """Decomposition V = V(1)[0] + V(2)[1], W = W(1)[0] + W(2)[1].

    The first ``v1[i]`` Chern roots (resp. first ``w1[i]`` framing
    parameters) of vertex i have degree 0, the rest degree 1.
    """

    v1: DimVec
    v2: DimVec
    w1: DimVec
    w2: DimVec

    @property
    def v(self) -> DimVec:
        return tuple(x + y for x, y in zip(self.v1, self.v2))

    @property
    def w(self) -> DimVec:
        return tuple(x + y for x, y in zip(self.w1, self.w2))

    def shuffle_split(self) -> dict[int, tuple[int, int]]:
        return {i + 1: (x, y) for i, (x, y) in enumerate(zip(self.v1, self.v2))}

    def degree_of(self, code: int) -> int:
        kind, vertex, index = decode(code)
        if kind == CHERN:
            return 0 if index <= self.v1[vertex - 1] else 1
        if kind == FRAMING:
            return 0 if index <= self.w1[vertex - 1] else 1
        raise ValueError("h has no grade")


def class_trep(q: Quiver, v: Sequence[int], w: Sequence[int]) -> KClass:
    """Weights of T*Rep(v, w), including the framing Hom(V_i, W_i) and its dual."""
    v, w = q.dimvec(v), q.dimvec(w)
    h = hbar()
    c = Counter()
    for t, hd in q.arrows:
        for al in range(1, v[hd - 1] + 1):
            for be in range(1, v[t - 1] + 1):
                x = _sym(CHERN, hd, al) - _sym(CHERN, t, be)
                c[x] += 1
                c[h - x] += 1
    for i in range(1, q.n + 1):
        for k in range(1, w[i - 1] + 1):
            for al in range(1, v[i - 1] + 1):
                x = _sym(FRAMING, i, k) - _sym(CHERN, i, al)
                c[x] += 1
                c[h - x] += 1
    return KClass(c)


def class_gauge(q: Quiver, v: Sequence[int], shift: Poly | int = 0) -> KClass:
    """Weights s(i,a) - s(i,b) + shift over all ordered pairs (a, b) at every vertex."""
    v = q.dimvec(v)
    shift = Poly.coerce(shift)
    c = Counter()
    for i in range(1, q.n + 1):
        for al in range(1, v[i - 1] + 1):
            for be in range(1, v[i - 1] + 1):
                c[_sym(CHERN, i, al) - _sym(CHERN, i, be) + shift] += 1
    return KClass(c)


def weight_degree(wt: Poly, split: GradeSplit) -> int:
    """Grade of the Hom-space a weight belongs to: deg(target) - deg(source)."""
    plus, minus = [], []
    for mono, coeff in wt.items():
        if not mono:
            raise ValueError(f"weight {wt} has a constant term")
        ((code, e),) = mono
        if decode(code)[0] == HBAR:
            continue
        if e != 1 or coeff not in (1, -1):
            raise ValueError(f"weight {wt} is not attributable to a graded Hom")
        (plus if coeff == 1 else minus).append(code)
    if not plus and not minus:
        return 0
    if len(plus) != 1 or len(minus) != 1:
        raise ValueError(f"weight {wt} is not attributable to a graded Hom")
    return split.degree_of(plus[0]) - split.degree_of(minus[0])


def grade_part(c: KClass, split: GradeSplit, degree: int) -> KClass:
    if degree not in (-1, 0, 1):
        raise ValueError("degree must be -1, 0 or 1")
    return c.filter(lambda wt: weight_degree(wt, split) == degree)


class ZeroEulerClass(ZeroDivisionError):
    pass


def euler(c: KClass) -> RatFun:
    """prod weight^multiplicity as a reduced rational function."""
    num, den = [], []
    for wt, m in c.items():
        if wt.is_zero():
            if m < 0:
                raise ZeroEulerClass("zero weight with negative multiplicity")
            return RatFun(0)
        (num if m > 0 else den).extend([wt] * abs(m))
    return RatFun(prod(num), den)


def euler_poly(c: KClass) -> Poly:
    return euler(c).as_poly()


def tangent_naka(q: Quiver, v: Sequence[int], w: Sequence[int]) -> KClass:
    """T*Rep(v,w) - g_v - h g_v."""
    return class_trep(q, v, w) - class_gauge(q, v, 0) - class_gauge(q, v, hbar())


@dataclass(frozen=True)
class NormalParts:
    n_minus: KClass
    n_plus: KClass
    stack_minus: KClass
    stack_plus: KClass


@functools.lru_cache(maxsize=None)
def normal_split(q: Quiver, split: GradeSplit) -> NormalParts:
    """Graded normal classes of naka(v1,w1) x naka(v2,w2) and of the stack analogue."""
    trep = class_trep(q, split.v, split.w)
    g0 = class_gauge(q, split.v, 0)
    gh = class_gauge(q, split.v, hbar())
    parts = {}
    for d in (-1, 1):
        t, a, b = (grade_part(x, split, d) for x in (trep, g0, gh))
        parts[d] = (t - a - b, t - a)
    return NormalParts(parts[-1][0], parts[1][0], parts[-1][1], parts[1][1])
