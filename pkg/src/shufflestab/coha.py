"""The framed cohomological Hall algebra as a shuffle algebra.

Elements of grade (v, w) are polynomials in s(i,1..v_i), a(i,1..w_i) and h,
symmetric in each vertex block of Chern roots.  In a product the second
factor is relabeled onto the second sub-blocks (indices offset by the first
factor's dimensions).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .quiver import DimVec, GradeSplit, Quiver, class_gauge, class_trep, euler, grade_part
from .symalg import (
    CHERN,
    FRAMING,
    HBAR,
    Poly,
    RatFun,
    decode,
    encode,
    full_blocks,
    hbar,
    is_block_symmetric,
    shuffle_symmetrize,
)


def as_value(x) -> Poly | RatFun:
    """Poly, or a RatFun when a denominator genuinely survives."""
    if isinstance(x, RatFun):
        return x.num if x.is_poly() else x
    return Poly.coerce(x)


def value_codes(x: Poly | RatFun) -> set[int]:
    if isinstance(x, RatFun):
        out = set(x.num.codes())
        for f in x.den:
            out |= f.codes()
        return out
    return x.codes()


def check_universe(poly: Poly | RatFun, v: Sequence[int], w: Sequence[int]) -> None:
    for code in value_codes(poly):
        kind, vertex, index = decode(code)
        if kind == HBAR:
            continue
        dims = v if kind == CHERN else w
        if not (1 <= vertex <= len(dims) and index <= dims[vertex - 1]):
            raise ValueError(f"symbol {Poly.symbol(code)} lies outside grade (v={tuple(v)}, w={tuple(w)})")


@dataclass(frozen=True, eq=False)
class CohaElement:
    """``poly`` may be a RatFun: stable envelopes live in a localized ring."""

    quiver: Quiver
    v: DimVec
    w: DimVec
    poly: Poly | RatFun

    def __post_init__(self):
        object.__setattr__(self, "v", self.quiver.dimvec(self.v))
        object.__setattr__(self, "w", self.quiver.dimvec(self.w))
        object.__setattr__(self, "poly", as_value(self.poly))
        check_universe(self.poly, self.v, self.w)
        if not is_block_symmetric(self.poly, full_blocks(dict(enumerate(self.v, 1)))):
            raise ValueError("CoHA elements must be symmetric in each vertex block of Chern roots")

    @property
    def grade(self) -> tuple[DimVec, DimVec]:
        return self.v, self.w

    def is_polynomial(self) -> bool:
        return isinstance(self.poly, Poly)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CohaElement):
            return NotImplemented
        return (self.quiver, self.v, self.w) == (other.quiver, other.v, other.w) and self.poly == other.poly

    def __add__(self, other: "CohaElement") -> "CohaElement":
        _same_grade(self, other)
        return CohaElement(self.quiver, self.v, self.w, self.poly + other.poly)

    def scale(self, c) -> "CohaElement":
        return CohaElement(self.quiver, self.v, self.w, self.poly * c)


@dataclass(frozen=True)
class AbelianElement:
    """Element of the abelianized algebra: no symmetry is imposed."""

    quiver: Quiver
    v: DimVec
    w: DimVec
    poly: Poly

    def __post_init__(self):
        object.__setattr__(self, "v", self.quiver.dimvec(self.v))
        object.__setattr__(self, "w", self.quiver.dimvec(self.w))
        object.__setattr__(self, "poly", Poly.coerce(self.poly))
        check_universe(self.poly, self.v, self.w)


def _same_grade(x, y) -> None:
    if x.quiver != y.quiver or x.v != y.v or x.w != y.w:
        raise ValueError("elements live in different graded pieces")


def unit(quiver: Quiver) -> CohaElement:
    zero = (0,) * quiver.n
    return CohaElement(quiver, zero, zero, Poly.const(1))


def offset_map(v1: Sequence[int], w1: Sequence[int], v2: Sequence[int], w2: Sequence[int]) -> dict[int, int]:
    """Rename symbols of a second factor onto the second sub-blocks."""
    m = {}
    for i, (x1, x2) in enumerate(zip(v1, v2), 1):
        for al in range(1, x2 + 1):
            m[encode(CHERN, i, al)] = encode(CHERN, i, x1 + al)
    for i, (y1, y2) in enumerate(zip(w1, w2), 1):
        for k in range(1, y2 + 1):
            m[encode(FRAMING, i, k)] = encode(FRAMING, i, y1 + k)
    return m


def _prepare(f1, f2) -> tuple[Quiver, GradeSplit, Poly | RatFun]:
    if f1.quiver != f2.quiver:
        raise ValueError("factors belong to different quivers")
    split = GradeSplit(f1.v, f2.v, f1.w, f2.w)
    moved = f2.poly.rename(offset_map(f1.v, f1.w, f2.v, f2.w))
    return f1.quiver, split, f1.poly * moved


def mult_kernel(q: Quiver, split: GradeSplit, twisted: bool) -> RatFun:
    """e(T*Rep[-1]) / e(g[-1]), times e(h g[1]) when twisted."""
    trep = class_trep(q, split.v, split.w)
    virtual = grade_part(trep, split, -1) - grade_part(class_gauge(q, split.v, 0), split, -1)
    if twisted:
        virtual = virtual + grade_part(class_gauge(q, split.v, hbar()), split, 1)
    return euler(virtual)


def _multiply(f1: CohaElement, f2: CohaElement, twisted: bool) -> CohaElement:
    q, split, product = _prepare(f1, f2)
    kernel = mult_kernel(q, split, twisted)
    rational = isinstance(product, RatFun)
    poly = shuffle_symmetrize(kernel * product, split.shuffle_split(), check=False, require_polynomial=not rational)
    return CohaElement(q, split.v, split.w, poly)


def m(f1: CohaElement, f2: CohaElement) -> CohaElement:
    """Untwisted product."""
    return _multiply(f1, f2, twisted=False)


def m_tau(f1: CohaElement, f2: CohaElement) -> CohaElement:
    """Product twisted by e(h g_v[1])."""
    return _multiply(f1, f2, twisted=True)


def ab_kernel(q: Quiver, split: GradeSplit) -> Poly:
    """e(T*Rep[-1]) e(h g[-1]) e(h g[1])."""
    trep = class_trep(q, split.v, split.w)
    gh = class_gauge(q, split.v, hbar())
    out = euler(grade_part(trep, split, -1)) * euler(grade_part(gh, split, -1)) * euler(grade_part(gh, split, 1))
    return out.as_poly()


def m_ab_tau(f1: AbelianElement, f2: AbelianElement) -> AbelianElement:
    q, split, product = _prepare(f1, f2)
    return AbelianElement(q, split.v, split.w, ab_kernel(q, split) * product)


def borel_kernel(q: Quiver, split: GradeSplit) -> Poly:
    """e(T*Rep[-1]) e(h g[1]): the product on the Borel-reduced side."""
    trep = class_trep(q, split.v, split.w)
    gh = class_gauge(q, split.v, hbar())
    return (euler(grade_part(trep, split, -1)) * euler(grade_part(gh, split, 1))).as_poly()
