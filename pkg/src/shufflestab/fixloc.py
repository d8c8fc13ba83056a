"""Torus fixed points, restriction tables and the stable-envelope axiom checker.

A restriction table lists finitely many fixed points.  Each point assigns
every Chern root a weight in the framing parameters and h, and lies on one
fixed component (a slot-wise dimension assignment, optionally with leaf
classes).  The attracting order on points depends on the chamber: the
built-in tables for T*Gr compute it, user tables state it for one chamber.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .quiver import DimVec, KClass, Quiver, euler, tangent_naka
from .stab import Chamber, Decomposition, FixedComponent, leaf_product, stab_psi_at
from .symalg import CHERN, FRAMING, HBAR, Poly, RatFun, decode, encode, parse_poly, substitute
from .symalg.text import format_value


class TableError(ValueError):
    pass


class UnsupportedQuiver(TableError):
    pass


TABLE_FORMAT_HINT = (
    'supply a restriction table: {"w": [[...], ...], "components": [{"v": [[...], ...]}, ...], '
    '"points": [{"id": ..., "assign": {"s(1,1)": "a(1,2)+h"}, "component": 0}], '
    '"order": [[idLow, idHigh], ...], "chamber": [1, 2, ...]}'
)


@dataclass(frozen=True)
class FixedPoint:
    id: str
    assign: Mapping[int, Poly]  # Chern-root code -> weight
    component: int  # index into RestrictionTable.components

    def assignment_text(self) -> dict[str, str]:
        return {str(Poly.symbol(c)): str(w) for c, w in sorted(self.assign.items())}


def _closure(pairs: Iterable[tuple[str, str]]) -> set[tuple[str, str]]:
    rel = {(a, b) for a, b in pairs if a != b}
    while True:
        extra = {(a, d) for a, b in rel for c, d in rel if b == c and a != d} - rel
        if not extra:
            return rel
        rel |= extra


@dataclass(frozen=True)
class RestrictionTable:
    quiver: Quiver
    slot_w: tuple[DimVec, ...]
    components: tuple[FixedComponent, ...]
    points: tuple[FixedPoint, ...]
    # chamber -> strict order pairs (low, high); None means "computed by dominance"
    orders: Mapping[tuple[int, ...], frozenset] | None = None
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        ids = [p.id for p in self.points]
        if len(set(ids)) != len(ids):
            raise TableError("duplicate point ids")
        for p in self.points:
            if not 0 <= p.component < len(self.components):
                raise TableError(f"point {p.id!r} names component {p.component}, table has {len(self.components)}")
        for comp in self.components:
            if tuple(w for _, w in comp.decomposition.slots) != self.slot_w:
                raise TableError("component framing does not match the table's slot framing")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(len(self.components))))
        if self.orders is not None:
            for sigma, rel in self.orders.items():
                for a, b in rel:
                    if a not in ids or b not in ids:
                        raise TableError(f"order relation ({a}, {b}) names an unknown point")
                    if (b, a) in rel:
                        raise TableError(f"order is not antisymmetric: {a} and {b} precede each other")

    @property
    def k(self) -> int:
        return len(self.slot_w)

    @property
    def v(self) -> DimVec:
        return self.components[0].decomposition.v

    @property
    def w(self) -> DimVec:
        return self.components[0].decomposition.w

    def point(self, pid: str) -> FixedPoint:
        for p in self.points:
            if p.id == pid:
                return p
        raise KeyError(pid)

    def points_of(self, comp: int) -> list[FixedPoint]:
        return [p for p in self.points if p.component == comp]

    def strict_order(self, chamber: Chamber) -> frozenset:
        if chamber.k != self.k:
            raise TableError(f"chamber has {chamber.k} slots, table has {self.k}")
        if self.orders is None:
            return _dominance(self, chamber)
        try:
            return self.orders[chamber.sigma]
        except KeyError:
            raise TableError(f"table states no order for chamber {chamber}") from None

    def leq(self, low: str, high: str, chamber: Chamber) -> bool:
        return low == high or (low, high) in self.strict_order(chamber)


def _indicator(table: RestrictionTable, p: FixedPoint) -> tuple[int, ...]:
    return tuple(sum(v) for v, _ in table.components[p.component].decomposition.slots)


def _dominance(table: RestrictionTable, chamber: Chamber) -> frozenset:
    """p' < p iff the chamber-ordered prefix sums of slot dimensions of p' are <= those of p."""

    def prefix(p):
        ind = _indicator(table, p)
        return list(itertools.accumulate(ind[j - 1] for j in chamber.sigma))

    pre = {p.id: prefix(p) for p in table.points}
    rel = set()
    for p, r in itertools.permutations(table.points, 2):
        if pre[p.id] != pre[r.id] and all(x <= y for x, y in zip(pre[p.id], pre[r.id])):
            rel.add((p.id, r.id))
    return frozenset(rel)


def _is_a1_like(q: Quiver) -> bool:
    return q.n == 1 and not q.arrows


def enumerate_fixed_points(q: Quiver, v: Sequence[int], w: Sequence[int], decomposition=None) -> RestrictionTable:
    """Fixed points of T*Gr(v, w) for the torus splitting w into w one-dimensional slots."""
    if not _is_a1_like(q):
        raise UnsupportedQuiver(
            "fixed points are built in only for the one-vertex quiver without arrows; " + TABLE_FORMAT_HINT
        )
    (v,) = q.dimvec(v)
    if decomposition is not None:
        slot_w = tuple(tuple(sw) for _, sw in (decomposition.slots if isinstance(decomposition, Decomposition) else decomposition))
        if any(sw != (1,) for sw in slot_w):
            raise UnsupportedQuiver("built-in fixed points need every slot framing to be 1; " + TABLE_FORMAT_HINT)
        n = len(slot_w)
        if (n,) != q.dimvec(w):
            raise TableError(f"slot framings sum to {n}, expected w = {tuple(w)}")
    else:
        (n,) = q.dimvec(w)
    if v > n:
        raise TableError(f"T*Gr({v}, {n}) is empty")
    components, points, labels = [], [], []
    for idx, subset in enumerate(itertools.combinations(range(1, n + 1), v)):
        ind = tuple(1 if j in subset else 0 for j in range(1, n + 1))
        components.append(FixedComponent.of([((x,), (1,)) for x in ind]))
        label = ",".join(map(str, ind))
        labels.append(label)
        assign = {encode(CHERN, 1, al): Poly.symbol(encode(FRAMING, 1, k)) for al, k in enumerate(subset, 1)}
        points.append(FixedPoint(label, assign, idx))
    return RestrictionTable(q, ((1,),) * n, tuple(components), tuple(points), None, tuple(labels))


# -- table files ------------------------------------------------------------


def _parse_weight(text, where: str) -> Poly:
    from .symalg import ParseError

    try:
        return parse_poly(str(text))
    except ParseError as exc:
        raise TableError(f"{where}: {exc}") from exc


def table_from_json(q: Quiver, data: Mapping) -> RestrictionTable:
    try:
        slot_w = tuple(q.dimvec(sw) for sw in data["w"])
        comps_raw = data["components"]
        points_raw = data["points"]
    except KeyError as exc:
        raise TableError(f"restriction table lacks {exc.args[0]!r}; " + TABLE_FORMAT_HINT) from None
    components, labels = [], []
    for j, c in enumerate(comps_raw):
        if isinstance(c, Mapping):
            vs = c["v"]
            leaves = [_parse_weight(x, f"component {j} leaf") for x in c.get("leaves", [])]
            labels.append(str(c.get("label", j)))
        else:
            vs, leaves = c, []
            labels.append(str(j))
        if len(vs) != len(slot_w):
            raise TableError(f"component {j} has {len(vs)} slots, table has {len(slot_w)}")
        components.append(FixedComponent.of([(q.dimvec(x), sw) for x, sw in zip(vs, slot_w)], leaves))
    points = []
    for p in points_raw:
        pid = str(p["id"])
        assign = {}
        for name, weight in p.get("assign", {}).items():
            sym = _parse_weight(name, f"point {pid}")
            codes = sym.codes()
            if len(codes) != 1 or sym != Poly.symbol(next(iter(codes))) or decode(next(iter(codes)))[0] != CHERN:
                raise TableError(f"point {pid}: {name!r} is not a Chern root")
            wt = _parse_weight(weight, f"point {pid}")
            if any(decode(c)[0] == CHERN for c in wt.codes()):
                raise TableError(f"point {pid}: weight {weight!r} involves Chern roots")
            assign[next(iter(codes))] = wt
        points.append(FixedPoint(pid, assign, int(p["component"])))
    orders = None
    if "order" in data:
        sigma = Chamber(tuple(data.get("chamber", range(1, len(slot_w) + 1)))).sigma
        rel = _closure((str(a), str(b)) for a, b in data["order"])
        orders = {sigma: frozenset(rel)}
    table = RestrictionTable(q, slot_w, tuple(components), tuple(points), orders, tuple(labels))
    for p in table.points:
        comp = table.components[p.component].decomposition
        need = {encode(CHERN, i, al) for i, n in enumerate(comp.v, 1) for al in range(1, n + 1)}
        if set(p.assign) != need:
            raise TableError(f"point {p.id} must assign exactly the Chern roots of v = {comp.v}")
    return table


def load_table(q: Quiver, path: str | Path) -> RestrictionTable:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TableError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return table_from_json(q, data)


# -- normal weights -------------------------------------------------------


def _slot_of_framing(table: RestrictionTable) -> dict[int, int]:
    labels = table.components[0].decomposition.framing_labels()
    out = {}
    for j, per_vertex in enumerate(labels, 1):
        for i, ks in enumerate(per_vertex, 1):
            for k in ks:
                out[encode(FRAMING, i, k)] = j
    return out


def pairing(weight: Poly, slot_of: Mapping[int, int], chamber: Chamber) -> int:
    """Pairing of a weight with the chamber cocharacter (slot sigma(t) gets t)."""
    total = 0
    for mono, coeff in weight.items():
        if not mono:
            raise TableError(f"weight {weight} has a constant term")
        ((code, e),) = mono
        kind = decode(code)[0]
        if kind == HBAR:
            continue
        if kind != FRAMING or e != 1:
            raise TableError(f"weight {weight} is not a framing weight")
        total += coeff * chamber.position(slot_of[code])
    return int(total)


@dataclass(frozen=True)
class TangentSplit:
    minus: KClass
    plus: KClass
    fixed: KClass

    @property
    def moving_rank(self) -> int:
        return self.minus.rank + self.plus.rank


def tangent_at(table: RestrictionTable, p: FixedPoint) -> KClass:
    comp = table.components[p.component].decomposition
    t = tangent_naka(table.quiver, comp.v, comp.w).substitute(p.assign)
    zero = t.multiplicity(Poly.const(0))
    if zero:
        raise TableError(f"point {p.id}: {zero} zero tangent weight(s) survive; the table is inconsistent")
    return t


def split_tangent(table: RestrictionTable, p: FixedPoint, chamber: Chamber) -> TangentSplit:
    slot_of = _slot_of_framing(table)
    t = tangent_at(table, p)
    return TangentSplit(
        t.filter(lambda wt: pairing(wt, slot_of, chamber) < 0),
        t.filter(lambda wt: pairing(wt, slot_of, chamber) > 0),
        t.filter(lambda wt: pairing(wt, slot_of, chamber) == 0),
    )


def euler_nminus(table: RestrictionTable, point: FixedPoint | str, chamber: Chamber) -> Poly:
    p = table.point(point) if isinstance(point, str) else point
    return euler(split_tangent(table, p, chamber).minus).as_poly()


# -- axiom checks ----------------------------------------------------------


@dataclass
class Check:
    kind: str  # diagonal | triangularity | degree
    component: str
    point: str
    ok: bool
    detail: str

    def to_json(self) -> dict:
        return {"check": self.kind, "component": self.component, "point": self.point, "ok": self.ok, "detail": self.detail}


@dataclass
class AxiomReport:
    chamber: Chamber
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def to_json(self) -> dict:
        return {
            "chamber": list(self.chamber.sigma),
            "ok": self.ok,
            "note": "support is checked as fixed-point triangularity",
            "checks": [c.to_json() for c in self.checks],
        }

    def to_text(self) -> str:
        lines = [f"chamber {self.chamber}: {'PASS' if self.ok else 'FAIL'} ({len(self.checks)} checks)"]
        for c in self.checks:
            if not c.ok:
                lines.append(f"  FAIL {c.kind} component {c.component} at {c.point}: {c.detail}")
        return "\n".join(lines)


Restrictor = Callable[[int, FixedPoint], "Poly | RatFun"]


def stab_restrictor(table: RestrictionTable, chamber: Chamber) -> Restrictor:
    def restrict(comp: int, p: FixedPoint):
        return stab_psi_at(table.quiver, table.components[comp], chamber, p.assign)

    return restrict


def class_restrictor(classes: Mapping[int, Poly | RatFun]) -> Restrictor:
    """Restrict explicitly given classes (component index -> tautological class)."""
    def restrict(comp: int, p: FixedPoint):
        return substitute(classes[comp], p.assign)

    return restrict


def _a_degree(x: Poly | RatFun) -> int:
    if isinstance(x, RatFun):
        return x.num.degree([FRAMING]) - sum(f.degree([FRAMING]) for f in x.den)
    return x.degree([FRAMING])


def check_axioms(
    table: RestrictionTable,
    chamber: Chamber,
    restrict: Restrictor | Mapping[int, Poly | RatFun] | None = None,
    components: Iterable[int] | None = None,
) -> AxiomReport:
    """Diagonal, triangularity and degree checks for the stable envelope of each component.

    ``restrict`` defaults to the shuffle-formula envelope; a mapping of
    explicit classes may be given instead (used for negative controls).
    """
    if restrict is None:
        restrict = stab_restrictor(table, chamber)
    elif isinstance(restrict, Mapping):
        restrict = class_restrictor(restrict)
    report = AxiomReport(chamber)
    comps = range(len(table.components)) if components is None else components
    splits: dict[str, TangentSplit] = {}

    def tangent(p: FixedPoint) -> TangentSplit:
        if p.id not in splits:
            splits[p.id] = split_tangent(table, p, chamber)
        return splits[p.id]

    for comp in comps:
        label = table.labels[comp]
        own = table.points_of(comp)
        for p in table.points:
            value = restrict(comp, p)
            if p.component == comp:
                expected = euler(tangent(p).minus).as_poly() * substitute(leaf_product(table.components[comp]), p.assign)
                ok = value == expected
                report.checks.append(Check("diagonal", label, p.id, ok, f"restriction {format_value(value)}, e(N-) {expected}"))
                continue
            below = any(table.leq(p.id, q.id, chamber) for q in own)
            if not below:
                ok = value == 0
                report.checks.append(Check("triangularity", label, p.id, ok, f"restriction {format_value(value)} must vanish"))
                continue
            bound = tangent(p).moving_rank
            if value == 0:
                deg_ok, deg = True, None
            else:
                deg = _a_degree(value)
                deg_ok = 2 * deg < bound
            report.checks.append(
                Check("degree", label, p.id, deg_ok, f"deg_a {deg if deg is not None else '-inf'} vs rank N {bound}")
            )
    return report


def all_chambers(k: int) -> list[Chamber]:
    return [Chamber(p) for p in itertools.permutations(range(1, k + 1))]
