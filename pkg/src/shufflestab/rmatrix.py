"""Stable-envelope restriction matrices, R-matrices and the braid relation.

Matrices are kept in the raw fixed-point restriction basis: rows are fixed
points, columns fixed components, entries restrictions of stab_psi.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

from .fixloc import RestrictionTable, all_chambers, euler_nminus, split_tangent
from .stab import Chamber, stab_psi_at
from .symalg import NotDivisible, Poly, RatFun, format_value, prod
from .symalg.poly import Q

Matrix = list[list]


class SingularMatrix(ArithmeticError):
    pass


@dataclass
class StabMatrix:
    rows: tuple[str, ...]  # point ids
    cols: tuple[str, ...]  # component labels
    entries: Matrix
    chamber: Chamber
    # linear weights whose product is the determinant when the matrix is triangular
    diagonal_weights: tuple[Poly, ...] = ()

    def to_text(self) -> list[list[str]]:
        return matrix_text(self.entries)


def matrix_text(m: Matrix) -> list[list[str]]:
    return [[format_value(x) for x in row] for row in m]


def _simplify(x):
    if isinstance(x, RatFun):
        return x.num if x.is_poly() else x
    return Poly.coerce(x)


def stab_matrix(table: RestrictionTable, chamber: Chamber, mapper: Callable = map) -> StabMatrix:
    """M[p, F] = stab_psi(F, chamber) restricted to the fixed point p."""
    q = table.quiver
    cells = [(i, j) for i in range(len(table.points)) for j in range(len(table.components))]

    values = list(mapper(_entry, [(q, table.components[j], chamber, table.points[i].assign) for i, j in cells]))
    m = [[None] * len(table.components) for _ in table.points]
    for (i, j), x in zip(cells, values):
        m[i][j] = x
    weights = []
    for p in table.points:
        for wt, mult in sorted(split_tangent(table, p, chamber).minus.items(), key=lambda t: format_value(t[0])):
            weights.extend([wt] * mult)
    return StabMatrix(tuple(p.id for p in table.points), table.labels, m, chamber, tuple(weights))


def _entry(args):
    q, comp, chamber, assign = args
    return _simplify(stab_psi_at(q, comp, chamber, assign))


# -- exact linear algebra -------------------------------------------------


def identity(n: int) -> Matrix:
    return [[Poly.const(1 if i == j else 0) for j in range(n)] for i in range(n)]


def matmul(x: Matrix, y: Matrix) -> Matrix:
    n, k, m = len(x), len(y), len(y[0]) if y else 0
    if x and len(x[0]) != k:
        raise ValueError("matrix shapes do not match")
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = RatFun(0)
            for t in range(k):
                if not x[i][t].is_zero() and not y[t][j].is_zero():
                    acc = acc + x[i][t] * y[t][j]
            row.append(_simplify(acc))
        out.append(row)
    return out


def matrices_equal(x: Matrix, y: Matrix) -> bool:
    return len(x) == len(y) and all(len(r) == len(s) and all(a == b for a, b in zip(r, s)) for r, s in zip(x, y))


def _clear_row(row: list) -> list[Poly]:
    """Scale a row of rational functions by the lcm of its denominators."""
    from collections import Counter

    lcm: Counter = Counter()
    for x in row:
        if isinstance(x, RatFun):
            lcm |= Counter(x.den)
    if not lcm:
        return [Poly.coerce(x) for x in row]
    common = list(lcm.elements())
    return [(RatFun.coerce(x) * prod(common)).as_poly() for x in row]


def solve(a: Matrix, b: Matrix, hints: Sequence[Poly] = ()) -> Matrix:
    """X with a X = b, by fraction-free Gauss-Jordan elimination (Bareiss).

    Rows are first scaled to polynomial entries; every division performed
    during elimination is exact.  ``hints`` are candidate factors of the
    determinant: each one that divides it is split off, so the entries of X
    carry factored denominators that cancel against their numerators.
    """
    n = len(a)
    if any(len(r) != n for r in a) or len(b) != n:
        raise ValueError("need a square system")
    m = len(b[0]) if b else 0
    aug = [_clear_row(list(a[i]) + list(b[i])) for i in range(n)]
    prev = Poly.const(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if not aug[i][k].is_zero()), None)
        if piv is None:
            raise SingularMatrix("matrix is singular over the rational-function field")
        if piv != k:
            aug[k], aug[piv] = aug[piv], aug[k]
        pk = aug[k][k]
        for i in range(n):
            if i == k:
                continue
            aik = aug[i][k]
            aug[i] = [(pk * aug[i][j] - aik * aug[k][j]).divexact(prev) for j in range(n + m)]
        prev = pk
    # every diagonal entry now carries the same determinant
    factors = []
    for f in hints:
        try:
            prev = prev.divexact(f)
        except NotDivisible:
            continue
        factors.append(f)
    if prev.is_constant():
        inv = Q(1) / prev.constant_value()
    else:
        inv = Q(1)
        factors.append(prev)
    return [[_simplify(RatFun(aug[i][n + j] * inv, factors)) for j in range(m)] for i in range(n)]


def r_matrix(m_from: StabMatrix, m_to: StabMatrix) -> Matrix:
    """R = m_to^-1 m_from."""
    if m_from.rows != m_to.rows or m_from.cols != m_to.cols:
        raise ValueError("stab matrices must share rows and columns")
    return solve(m_to.entries, m_from.entries, m_to.diagonal_weights)


# -- checks -----------------------------------------------------------------


@dataclass
class Outcome:
    name: str
    ok: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"check": self.name, "ok": self.ok, "detail": self.detail}


def check_triangular(table: RestrictionTable, m: StabMatrix) -> list[Outcome]:
    """Entries vanish off the chamber order and the diagonal is e(N-)."""
    out = []
    chamber = m.chamber
    for i, p in enumerate(table.points):
        for j in range(len(table.components)):
            x = m.entries[i][j]
            if p.component == j:
                ok = x == euler_nminus(table, p, chamber)
                out.append(Outcome(f"diagonal {table.labels[j]}@{p.id}", ok, format_value(x)))
            elif not any(table.leq(p.id, r.id, chamber) for r in table.points_of(j)):
                out.append(Outcome(f"zero {table.labels[j]}@{p.id}", x == 0, format_value(x)))
    return out


def adjacent(c: Chamber, i: int) -> Chamber:
    """Cross the wall swapping positions i and i+1 (1-based)."""
    s = list(c.sigma)
    s[i - 1], s[i] = s[i], s[i - 1]
    return Chamber(tuple(s))


@dataclass
class YbeReport:
    outcomes: list[Outcome] = field(default_factory=list)
    matrices: dict[tuple[int, ...], StabMatrix] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(o.ok for o in self.outcomes)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "basis": "raw fixed-point restrictions",
            "checks": [o.to_json() for o in self.outcomes],
        }

    def to_text(self) -> str:
        lines = [f"braid/unitarity/triangularity: {'PASS' if self.ok else 'FAIL'} ({len(self.outcomes)} checks)"]
        lines += [f"  FAIL {o.name}: {o.detail}" for o in self.outcomes if not o.ok]
        return "\n".join(lines)


def transport(matrices: dict, start: Chamber, word: Sequence[int]) -> tuple[Matrix, Chamber]:
    """Ordered product of wall-crossing R-matrices along a word of simple reflections."""
    n = len(matrices[start.sigma].rows)
    total = identity(n)
    here = start
    for i in word:
        there = adjacent(here, i)
        total = matmul(r_matrix(matrices[here.sigma], matrices[there.sigma]), total)
        here = there
    return total, here


def check_ybe(table: RestrictionTable, mapper: Callable = map) -> YbeReport:
    if table.k != 3:
        raise ValueError("the braid check needs a 3-slot decomposition")
    report = YbeReport()
    for c in all_chambers(3):
        report.matrices[c.sigma] = stab_matrix(table, c, mapper)
        tri = check_triangular(table, report.matrices[c.sigma])
        report.outcomes.append(Outcome(f"triangular {c}", all(o.ok for o in tri), "; ".join(o.name for o in tri if not o.ok)))
    start = Chamber.identity(3)
    p1, end1 = transport(report.matrices, start, (1, 2, 1))
    p2, end2 = transport(report.matrices, start, (2, 1, 2))
    report.outcomes.append(Outcome("braid s1 s2 s1 = s2 s1 s2", end1 == end2 and matrices_equal(p1, p2)))
    n = len(table.points)
    seen = set()
    for c in all_chambers(3):
        for i in (1, 2):
            d = adjacent(c, i)
            key = frozenset((c.sigma, d.sigma))
            if key in seen:
                continue
            seen.add(key)
            there = r_matrix(report.matrices[c.sigma], report.matrices[d.sigma])
            back = r_matrix(report.matrices[d.sigma], report.matrices[c.sigma])
            ok = matrices_equal(matmul(back, there), identity(n))
            report.outcomes.append(Outcome(f"unitarity {c} | {d}", ok))
    return report


def parse_chamber_word(text: str) -> Chamber:
    return Chamber(tuple(int(x) for x in text.split(",") if x.strip()))


__all__ = [
    "SingularMatrix",
    "StabMatrix",
    "YbeReport",
    "adjacent",
    "check_triangular",
    "check_ybe",
    "identity",
    "matmul",
    "matrices_equal",
    "matrix_text",
    "r_matrix",
    "solve",
    "stab_matrix",
    "transport",
]
