"""Stable envelopes in tautological presentation via the shuffle recursion.

A fixed component of naka(v, w) for the torus attached to w = w_1 + ... + w_k
is a list of slots (v_j, w_j) with a leaf class on each naka(v_j, w_j).  The
framing parameters of the slots are labeled consecutively in slot order:
slot j owns a(i, w_1,i + ... + w_(j-1),i + 1), ... .
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .coha import CohaElement, as_value, check_universe
from .quiver import (
    DimVec,
    GradeSplit,
    Quiver,
    class_gauge,
    class_trep,
    euler,
    grade_part,
    normal_split,
    ZeroEulerClass,
)
from .symalg import (
    CHERN,
    FRAMING,
    DenominatorVanishes,
    Poly,
    RatFun,
    encode,
    full_blocks,
    hbar,
    is_block_symmetric,
    shuffle_symmetrize,
    substitute,
)


def _add(x: Sequence[int], y: Sequence[int]) -> DimVec:
    return tuple(p + q for p, q in zip(x, y))


@dataclass(frozen=True)
class Decomposition:
    slots: tuple[tuple[DimVec, DimVec], ...]

    def __post_init__(self):
        slots = tuple((tuple(v), tuple(w)) for v, w in self.slots)
        if not slots:
            raise ValueError("a decomposition needs at least one slot")
        n = len(slots[0][0])
        for v, w in slots:
            if len(v) != n or len(w) != n or min(v + w, default=0) < 0:
                raise ValueError(f"malformed slot {(v, w)}")
        object.__setattr__(self, "slots", slots)

    @property
    def k(self) -> int:
        return len(self.slots)

    @property
    def v(self) -> DimVec:
        out = (0,) * len(self.slots[0][0])
        for v, _ in self.slots:
            out = _add(out, v)
        return out

    @property
    def w(self) -> DimVec:
        out = (0,) * len(self.slots[0][1])
        for _, w in self.slots:
            out = _add(out, w)
        return out

    def framing_labels(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """labels[j][i-1] = global a-indices at vertex i owned by slot j."""
        n = len(self.slots[0][1])
        used = [0] * n
        out = []
        for _, w in self.slots:
            per = []
            for i in range(n):
                per.append(tuple(range(used[i] + 1, used[i] + w[i] + 1)))
                used[i] += w[i]
            out.append(tuple(per))
        return tuple(out)


@dataclass(frozen=True)
class Chamber:
    """The chamber a_sigma(1) < a_sigma(2) < ... < a_sigma(k); sigma is 1-based."""

    sigma: tuple[int, ...]

    def __post_init__(self):
        sigma = tuple(int(x) for x in self.sigma)
        if sorted(sigma) != list(range(1, len(sigma) + 1)):
            raise ValueError(f"{sigma} is not a permutation of 1..{len(sigma)}")
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def identity(cls, k: int) -> "Chamber":
        return cls(tuple(range(1, k + 1)))

    @property
    def k(self) -> int:
        return len(self.sigma)

    def position(self, slot: int) -> int:
        """1-based position of a slot in the chamber order (its cocharacter value)."""
        return self.sigma.index(slot) + 1

    def __str__(self) -> str:
        return " < ".join(f"a{j}" for j in self.sigma)


@dataclass(frozen=True)
class FixedComponent:
    decomposition: Decomposition
    leaf_classes: tuple[Poly | RatFun, ...] = field(default=())

    def __post_init__(self):
        leaves = tuple(as_value(p) for p in self.leaf_classes) or (Poly.const(1),) * self.decomposition.k
        if len(leaves) != self.decomposition.k:
            raise ValueError("need one leaf class per slot")
        for (v, w), p in zip(self.decomposition.slots, leaves):
            check_universe(p, v, w)
            if not is_block_symmetric(p, full_blocks(dict(enumerate(v, 1)))):
                raise ValueError("leaf classes must be symmetric in each vertex block of Chern roots")
        object.__setattr__(self, "leaf_classes", leaves)

    @classmethod
    def of(cls, slots, leaves=()) -> "FixedComponent":
        return cls(Decomposition(tuple(slots)), tuple(leaves))


def _framing_map(labels: Sequence[Sequence[int]], start: Sequence[int] | None = None) -> dict[int, int]:
    """Local framing index k at vertex i -> labels[i-1][k-1] (+ offset)."""
    m = {}
    for i, labs in enumerate(labels, 1):
        base = start[i - 1] if start else 0
        for k, g in enumerate(labs, 1):
            m[encode(FRAMING, i, base + k)] = encode(FRAMING, i, g)
    return m


def _chern_offset(offset: Sequence[int], dims: Sequence[int]) -> dict[int, int]:
    return {
        encode(CHERN, i, al): encode(CHERN, i, off + al)
        for i, (off, n) in enumerate(zip(offset, dims), 1)
        for al in range(1, n + 1)
        if off
    }


def stab_kernel(q: Quiver, split: GradeSplit) -> RatFun:
    """e(T*Rep[-1]) / (e(g[-1]) e(h g[-1]))  (= e(N[-1]))."""
    return euler(normal_split(q, split).n_minus)


# slot = (v, framing labels per vertex, leaf in local s / global a)
_Slot = tuple


@dataclass(frozen=True)
class _Leaf:
    """Hashable by exact representation, so RatFun leaves can be memoized."""

    num: Poly
    den: tuple[Poly, ...] = ()

    @classmethod
    def of(cls, x: Poly | RatFun) -> "_Leaf":
        return cls(x.num, x.den) if isinstance(x, RatFun) else cls(x)

    def value(self) -> Poly | RatFun:
        return RatFun(self.num, self.den, cancel=False) if self.den else self.num


def _merge_labels(slots: Sequence[_Slot]) -> tuple[tuple[int, ...], ...]:
    n = len(slots[0][0])
    return tuple(tuple(g for sl in slots for g in sl[1][i]) for i in range(n))


@functools.lru_cache(maxsize=None)
def _stab(q: Quiver, slots: tuple[_Slot, ...], split_at: int) -> Poly | RatFun:
    if len(slots) == 1:
        return slots[0][2].value()
    first, rest = slots[:split_at], slots[split_at:]
    s1 = _stab(q, first, 1)
    s2 = _stab(q, rest, 1)
    n = len(slots[0][0])
    v1 = tuple(sum(sl[0][i] for sl in first) for i in range(n))
    v2 = tuple(sum(sl[0][i] for sl in rest) for i in range(n))
    lab1, lab2 = _merge_labels(first), _merge_labels(rest)
    w1 = tuple(len(x) for x in lab1)
    w2 = tuple(len(x) for x in lab2)
    # local frame: first group owns a(i,1..w1_i), the rest a(i,w1_i+1..)
    from_local = _framing_map(lab1)
    from_local.update(_framing_map(lab2, start=w1))
    to_local = {g: loc for loc, g in from_local.items()}
    local1 = s1.rename(to_local)
    local2 = s2.rename(to_local).rename(_chern_offset(v1, v2))
    split = GradeSplit(v1, v2, w1, w2)
    kernel = stab_kernel(q, split)
    # the sum lives in a localized ring; denominators (s - s' + h) may survive
    result = shuffle_symmetrize(
        kernel * (local1 * local2), split.shuffle_split(), check=False, require_polynomial=False
    )
    return result.rename(from_local)


def _ordered_slots(F: FixedComponent, chamber: Chamber) -> tuple[_Slot, ...]:
    dec = F.decomposition
    if chamber.k != dec.k:
        raise ValueError(f"chamber has {chamber.k} slots, component has {dec.k}")
    labels = dec.framing_labels()
    out = []
    for j in chamber.sigma:
        v, _ = dec.slots[j - 1]
        leaf = F.leaf_classes[j - 1].rename(_framing_map(labels[j - 1]))
        out.append((v, labels[j - 1], _Leaf.of(leaf)))
    return tuple(out)


def stab_psi(q: Quiver, F: FixedComponent, chamber: Chamber, split_at: int = 1) -> Poly | RatFun:
    """Tautological representative of the stable envelope of F in the given chamber.

    The result is a Poly when the shuffle sum is polynomial and a reduced
    RatFun otherwise (already for T*Gr(2, n)); its fixed-point restrictions
    are polynomial.  ``split_at`` selects where the chamber-ordered slots are
    cut at the top level of the recursion; every choice gives the same value.
    """
    if not 1 <= split_at < max(F.decomposition.k, 2):
        raise ValueError(f"split position {split_at} out of range for {F.decomposition.k} slots")
    return _stab(q, _ordered_slots(F, chamber), split_at)


def leaf_product(F: FixedComponent) -> Poly | RatFun:
    """Product of the leaf classes in global labels, Chern roots numbered slot by slot."""
    dec = F.decomposition
    labels = dec.framing_labels()
    offset = (0,) * len(dec.v)
    out = Poly.const(1)
    for (v, _), lab, leaf in zip(dec.slots, labels, F.leaf_classes):
        out = out * leaf.rename(_framing_map(lab)).rename(_chern_offset(offset, v))
        offset = _add(offset, v)
    return as_value(out)


def stab_psi_at(
    q: Quiver, F: FixedComponent, chamber: Chamber, assignment: Mapping[int, Poly]
) -> Poly | RatFun:
    """stab_psi(F) with every Chern root substituted by ``assignment`` (code -> weight).

    Evaluates the recursion term by term, which keeps all intermediate
    values in the framing parameters and h.  When some individual shuffle
    term has a vanishing denominator at the point, falls back to
    substituting into the symbolic result.
    """
    slots = _ordered_slots(F, chamber)
    dec = F.decomposition
    values = []
    for i, n in enumerate(dec.v, 1):
        try:
            values.append(tuple(assignment[encode(CHERN, i, al)] for al in range(1, n + 1)))
        except KeyError:
            raise ValueError(f"assignment misses a Chern root at vertex {i}") from None
    try:
        return as_value(_stab_at(q, slots, tuple(values)))
    except DenominatorVanishes:
        return substitute(_stab(q, slots, 1), assignment)


def _chern_assignment(values: Sequence[Sequence[Poly]], offset: Sequence[int] | None = None) -> dict[int, Poly]:
    return {
        encode(CHERN, i, (offset[i - 1] if offset else 0) + al): val
        for i, vals in enumerate(values, 1)
        for al, val in enumerate(vals, 1)
    }


@functools.lru_cache(maxsize=None)
def _stab_at(q: Quiver, slots: tuple[_Slot, ...], values: tuple[tuple[Poly, ...], ...]) -> RatFun:
    if len(slots) == 1:
        return RatFun.coerce(slots[0][2].value()).substitute(_chern_assignment(values))
    first, rest = slots[:1], slots[1:]
    n = len(values)
    v1 = tuple(sum(sl[0][i] for sl in first) for i in range(n))
    v2 = tuple(sum(sl[0][i] for sl in rest) for i in range(n))
    lab1, lab2 = _merge_labels(first), _merge_labels(rest)
    w1 = tuple(len(x) for x in lab1)
    w2 = tuple(len(x) for x in lab2)
    from_local = _framing_map(lab1)
    from_local.update(_framing_map(lab2, start=w1))
    kernel = normal_split(q, GradeSplit(v1, v2, w1, w2)).n_minus.rename(from_local)
    choices = [itertools.combinations(range(len(vals)), k) for vals, k in zip(values, v1)]
    total = RatFun(0)
    for pick in itertools.product(*choices):
        vals1 = tuple(tuple(vals[j] for j in ch) for vals, ch in zip(values, pick))
        vals2 = tuple(
            tuple(vals[j] for j in range(len(vals)) if j not in ch) for vals, ch in zip(values, pick)
        )
        point = _chern_assignment(vals1)
        point.update(_chern_assignment(vals2, v1))
        try:
            term = euler(kernel.substitute(point))
        except ZeroEulerClass:
            raise DenominatorVanishes("a kernel denominator vanishes at this point") from None
        if term.is_zero():
            continue
        total = total + term * _stab_at(q, first, vals1) * _stab_at(q, rest, vals2)
    return total


def stab_psi_element(q: Quiver, F: FixedComponent, chamber: Chamber) -> CohaElement:
    dec = F.decomposition
    return CohaElement(q, dec.v, dec.w, stab_psi(q, F, chamber))


def kernel_rank(q: Quiver, F: FixedComponent, chamber: Chamber) -> int:
    """Sum over the recursion of rank N[-1]; the degree of stab_psi with unit leaves."""
    slots = [F.decomposition.slots[j - 1] for j in chamber.sigma]
    total = 0
    while len(slots) > 1:
        (v1, w1), rest = slots[0], slots[1:]
        v2 = w2 = (0,) * len(v1)
        for v, w in rest:
            v2, w2 = _add(v2, v), _add(w2, w)
        total += normal_split(q, GradeSplit(v1, v2, w1, w2)).n_minus.rank
        slots = rest
    return total


def stab_hypertoric(q: Quiver, p: Poly, split: GradeSplit) -> Poly:
    """e(T*Rep(v,w)[-1]) * p."""
    return (euler(grade_part(class_trep(q, split.v, split.w), split, -1)) * p).as_poly()


def stab_product(g1: CohaElement, g2: CohaElement) -> CohaElement:
    """Product of the semistable algebra: the 2-slot envelope in chamber a1 < a2."""
    if g1.quiver != g2.quiver:
        raise ValueError("factors belong to different quivers")
    F = FixedComponent.of([(g1.v, g1.w), (g2.v, g2.w)], [g1.poly, g2.poly])
    return stab_psi_element(g1.quiver, F, Chamber.identity(2))


def psi(g: CohaElement) -> CohaElement:
    """Canonical representative e(h g_v) * g of the map into the twisted CoHA."""
    e = euler(class_gauge(g.quiver, g.v, hbar())).as_poly()
    return CohaElement(g.quiver, g.v, g.w, e * g.poly)
