"""Command-line front end.

Exit status: 0 on success, 1 when a verification report contains a failing
entry, 2 on input errors.  Identical requests produce byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from pathlib import Path
from typing import Callable, Iterator, Sequence

from . import __version__
from .cache import ENV_VAR, Cache, request_key
from .coha import AbelianElement, CohaElement, m, m_ab_tau, m_tau
from .fixloc import (
    RestrictionTable,
    TableError,
    all_chambers,
    check_axioms,
    enumerate_fixed_points,
    load_table,
)
from .quiver import DimensionError, Quiver
from .rmatrix import SingularMatrix, check_ybe, matrix_text, r_matrix, stab_matrix
from .stab import Chamber, FixedComponent, psi, stab_psi, stab_psi_at
from .symalg import HBAR, ParseError, Poly, RatFun, encode, flag_pushforward, format_value, parse_expr, substitute

log = logging.getLogger("shufflestab")

COMMANDS = ("mul", "mul-tau", "mul-ab", "stab", "psi", "restrict", "verify-axioms", "rmatrix", "ybe", "pushforward")


class InputError(Exception):
    """Bad command-line input; exit status 2."""


# -- argument parsing -------------------------------------------------------


def _ints(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(" ", "").split(",") if x != "")
    except ValueError:
        raise InputError(f"{what}: expected comma-separated integers, got {text!r}") from None


def parse_dimvec(q: Quiver, text: str, what: str) -> tuple[int, ...]:
    try:
        return q.dimvec(_ints(text, what))
    except DimensionError as exc:
        raise InputError(f"{what}: {exc}") from None


def parse_slots(q: Quiver, text: str, what: str) -> tuple[tuple[int, ...], ...]:
    """Per-slot vectors: "1,1,1" on a one-vertex quiver, "1,0;0,1" in general."""
    if ";" in text:
        return tuple(parse_dimvec(q, part, what) for part in text.split(";"))
    if q.n == 1:
        return tuple((x,) for x in _ints(text, what))
    return (parse_dimvec(q, text, what),)


def parse_chamber(text: str | None, k: int) -> Chamber:
    if text is None:
        return Chamber.identity(k)
    try:
        c = Chamber(_ints(text, "--chamber"))
    except ValueError as exc:
        raise InputError(f"--chamber: {exc}") from None
    if c.k != k:
        raise InputError(f"--chamber: {c.k} entries for {k} slots")
    return c


def read_expr(text: str, what: str) -> Poly | RatFun:
    """Inline canonical text, or ``file:PATH`` holding it."""
    source = what
    if text.startswith("file:"):
        path = text[5:]
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"{what}: cannot read {path}: {exc.strerror}") from None
        source = f"{what} ({path})"
    try:
        return parse_expr(text)
    except ParseError as exc:
        raise InputError(f"{source}: {exc}") from None


_GRADE_RE = re.compile(r"^(.*)@\(([^()]*)\)\s*$", re.S)


def parse_graded(q: Quiver, text: str, what: str) -> tuple[Poly | RatFun, tuple[int, ...], tuple[int, ...]]:
    """``EXPR@(v..., w...)``: 2n integers, gauge dimensions then framing."""
    match = _GRADE_RE.match(text)
    if not match:
        raise InputError(f"{what}: expected EXPR@(v,w), got {text!r}")
    dims = _ints(match.group(2), what)
    if len(dims) != 2 * q.n:
        raise InputError(f"{what}: grade needs {2 * q.n} integers (v then w), got {len(dims)}")
    return read_expr(match.group(1).strip(), what), dims[: q.n], dims[q.n :]


def load_quiver(path: str) -> Quiver:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"--quiver: cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return Quiver.from_json(data)
    except (ValueError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from None


# -- h sign -----------------------------------------------------------------

_H = encode(HBAR)


def flip_h(x):
    """The automorphism h -> -h relating the two sign conventions."""
    return substitute(x, {_H: -Poly.symbol(_H)})


# -- parallelism ------------------------------------------------------------


@contextmanager
def mapper(jobs: int) -> Iterator[Callable]:
    if jobs <= 1:
        yield map
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield lambda fn, items: pool.map(fn, list(items), chunksize=4)


# -- commands ---------------------------------------------------------------


class Job:
    """One invocation with its quiver and sign convention."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.q = load_quiver(args.quiver)
        self.sign = args.h_sign

    def value(self, x):
        return flip_h(x) if self.sign == "-" else x

    def expr(self, text: str, what: str):
        return self.value(read_expr(text, what))

    def graded(self, text: str, what: str):
        poly, v, w = parse_graded(self.q, text, what)
        poly = self.value(poly)
        return poly, v, w

    def table(self) -> RestrictionTable:
        a = self.args
        if a.table:
            try:
                t = load_table(self.q, a.table)
            except OSError as exc:
                raise InputError(f"--table: cannot read {a.table}: {exc.strerror}") from None
            if self.sign == "-":
                t = _flip_table(t)
            return t
        if a.v is None or a.w is None:
            raise InputError("need --v and --w, or --table")
        v = parse_dimvec(self.q, a.v, "--v")
        slots = parse_slots(self.q, a.w, "--w")
        if any(s != (1,) for s in slots) or self.q.n != 1:
            raise TableError(
                "built-in fixed points need the one-vertex arrowless quiver with every slot framing 1; pass --table"
            )
        return enumerate_fixed_points(self.q, v, (len(slots),))


def _flip_table(t: RestrictionTable) -> RestrictionTable:
    from .fixloc import FixedPoint

    points = tuple(FixedPoint(p.id, {c: flip_h(x) for c, x in p.assign.items()}, p.component) for p in t.points)
    return RestrictionTable(t.quiver, t.slot_w, t.components, points, t.orders, t.labels)


def _text(x) -> str:
    return format_value(x) + "\n"


def _json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def cmd_mul(job: Job) -> tuple[int, str]:
    a = job.args
    if not a.left or not a.right:
        raise InputError("mul needs --left and --right")
    f1, v1, w1 = job.graded(a.left, "--left")
    f2, v2, w2 = job.graded(a.right, "--right")
    if a.command == "mul-ab":
        out = m_ab_tau(AbelianElement(job.q, v1, w1, Poly.coerce(f1)), AbelianElement(job.q, v2, w2, Poly.coerce(f2)))
    else:
        op = m if a.command == "mul" else m_tau
        out = op(CohaElement(job.q, v1, w1, f1), CohaElement(job.q, v2, w2, f2))
    return 0, _text(job.value(out.poly))


def _component(job: Job) -> tuple[FixedComponent, Chamber]:
    a = job.args
    if a.w is None or a.component is None:
        raise InputError("stab needs --w and --component")
    w_slots = parse_slots(job.q, a.w, "--w")
    v_slots = parse_slots(job.q, a.component, "--component")
    if len(v_slots) != len(w_slots):
        raise InputError(f"--component has {len(v_slots)} slots, --w has {len(w_slots)}")
    leaves = [job.expr(x, "--leaf") for x in a.leaf or []]
    if leaves and len(leaves) != len(w_slots):
        raise InputError(f"need one --leaf per slot ({len(w_slots)}), got {len(leaves)}")
    F = FixedComponent.of(list(zip(v_slots, w_slots)), leaves)
    if a.v is not None and parse_dimvec(job.q, a.v, "--v") != F.decomposition.v:
        raise InputError(f"--v does not match the component total {F.decomposition.v}")
    chamber = parse_chamber(a.chamber, len(w_slots))
    return F, chamber


def cmd_stab(job: Job) -> tuple[int, str]:
    F, chamber = _component(job)
    split_at = job.args.split_at
    return 0, _text(job.value(stab_psi(job.q, F, chamber, split_at)))


def cmd_psi(job: Job) -> tuple[int, str]:
    a = job.args
    if a.poly is None or a.v is None or a.w is None:
        raise InputError("psi needs --poly, --v and --w")
    f = job.expr(a.poly, "--poly")
    v = parse_dimvec(job.q, a.v, "--v")
    w = tuple(map(sum, zip(*parse_slots(job.q, a.w, "--w"))))
    return 0, _text(job.value(psi(CohaElement(job.q, v, w, f)).poly))


def cmd_pushforward(job: Job) -> tuple[int, str]:
    a = job.args
    if a.poly is None or a.v is None:
        raise InputError("pushforward needs --poly and --v")
    f = job.expr(a.poly, "--poly")
    if not isinstance(f, Poly):
        raise InputError("--poly: pushforward takes a polynomial")
    v = parse_dimvec(job.q, a.v, "--v")
    return 0, _text(job.value(flag_pushforward(f, dict(enumerate(v, 1)))))


def _component_index(t: RestrictionTable, label: str) -> int:
    label = label.replace(" ", "")
    for j, lab in enumerate(t.labels):
        if lab.replace(" ", "") == label:
            return j
    raise InputError(f"--component {label!r} is not one of {list(t.labels)}")


def cmd_restrict(job: Job) -> tuple[int, str]:
    a = job.args
    t = job.table()
    chamber = parse_chamber(a.chamber, t.k)
    if a.poly is not None:
        cls = job.expr(a.poly, "--poly")
        values = {p.id: substitute(cls, p.assign) for p in t.points}
        head = {"class": format_value(job.value(cls))}
    else:
        if a.component is None:
            raise InputError("restrict needs --poly or --component")
        j = _component_index(t, a.component)
        values = {p.id: stab_psi_at(t.quiver, t.components[j], chamber, p.assign) for p in t.points}
        head = {"component": t.labels[j]}
    doc = dict(head, chamber=list(chamber.sigma), restrictions={k: format_value(job.value(x)) for k, x in values.items()})
    return 0, _json(doc)


def _entry(args):
    q, comp, chamber, assign = args
    return stab_psi_at(q, comp, chamber, assign)


def cmd_verify(job: Job) -> tuple[int, str]:
    a = job.args
    t = job.table()
    chambers = [parse_chamber(a.chamber, t.k)] if a.chamber else all_chambers(t.k)
    override = None
    if a.klass is not None:
        if a.component is None:
            raise InputError("--class needs --component naming the component it replaces")
        override = (_component_index(t, a.component), job.expr(a.klass, "--class"))
    reports = []
    with mapper(a.jobs) as run:
        for c in chambers:
            cells = [(j, p) for j in range(len(t.components)) for p in t.points]
            todo = [(t.quiver, t.components[j], c, p.assign) for j, p in cells if not override or j != override[0]]
            values = iter(run(_entry, todo))
            table = {}
            for j, p in cells:
                if override and j == override[0]:
                    table[(j, p.id)] = substitute(override[1], p.assign)
                else:
                    table[(j, p.id)] = next(values)
            reports.append(check_axioms(t, c, lambda j, p: table[(j, p.id)]))
    for r in reports:
        log.info(r.to_text())
    ok = all(r.ok for r in reports)
    return (0 if ok else 1), _json({"ok": ok, "reports": [r.to_json() for r in reports]})


def _matrix_doc(job: Job, mat) -> list[list[str]]:
    return matrix_text([[job.value(x) for x in row] for row in mat])


def cmd_rmatrix(job: Job) -> tuple[int, str]:
    a = job.args
    t = job.table()
    src = parse_chamber(a.chamber, t.k)
    dst = parse_chamber(a.to, t.k) if a.to else Chamber(tuple(reversed(src.sigma)))
    with mapper(a.jobs) as run:
        m_from = stab_matrix(t, src, run)
        m_to = stab_matrix(t, dst, run)
    try:
        r = r_matrix(m_from, m_to)
    except SingularMatrix as exc:
        raise InputError(f"{exc}; check the restriction table") from None
    doc = {
        "basis": "raw fixed-point restrictions",
        "rows": list(m_from.rows),
        "cols": list(m_from.cols),
        "from": list(src.sigma),
        "to": list(dst.sigma),
        "stab_from": _matrix_doc(job, m_from.entries),
        "stab_to": _matrix_doc(job, m_to.entries),
        "r_matrix": _matrix_doc(job, r),
    }
    return 0, _json(doc)


def cmd_ybe(job: Job) -> tuple[int, str]:
    t = job.table()
    with mapper(job.args.jobs) as run:
        try:
            report = check_ybe(t, run)
        except SingularMatrix as exc:
            raise InputError(f"{exc}; check the restriction table") from None
    log.info(report.to_text())
    doc = report.to_json()
    doc["stab_matrices"] = {",".join(map(str, k)): _matrix_doc(job, v.entries) for k, v in sorted(report.matrices.items())}
    return (0 if report.ok else 1), _json(doc)


HANDLERS = {
    "mul": cmd_mul,
    "mul-tau": cmd_mul,
    "mul-ab": cmd_mul,
    "stab": cmd_stab,
    "psi": cmd_psi,
    "pushforward": cmd_pushforward,
    "restrict": cmd_restrict,
    "verify-axioms": cmd_verify,
    "rmatrix": cmd_rmatrix,
    "ybe": cmd_ybe,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="shufflestab", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--quiver", required=True, help='quiver JSON file {"vertices": [...], "arrows": [[t, h], ...]}')
    p.add_argument("--v", help="gauge dimension vector, comma-separated in vertex order")
    p.add_argument("--w", help='framing slots: "1,1,1" on one vertex, "1,0;0,1" in general')
    p.add_argument("--chamber", help="permutation word, e.g. 2,1,3 for a2 < a1 < a3")
    p.add_argument("--to", help="target chamber for rmatrix (default: reversed --chamber)")
    p.add_argument("--component", help="per-slot gauge dimensions (stab) or component label (tables)")
    p.add_argument("--leaf", action="append", help="leaf class of a slot (repeat once per slot)")
    p.add_argument("--split-at", type=int, default=1, help="top-level split position for stab")
    p.add_argument("--left", help="EXPR@(v,w) for products")
    p.add_argument("--right", help="EXPR@(v,w) for products")
    p.add_argument("--poly", help="canonical polynomial text, or file:PATH")
    p.add_argument("--class", dest="klass", help="replace a component's envelope by this class (negative control)")
    p.add_argument("--table", help="restriction-table JSON file")
    p.add_argument("--h-sign", choices=["+", "-"], default="+", help="sign carried by cotangent weights")
    p.add_argument("--output", "-o", help="output file (default: standard output)")
    p.add_argument("--cache-dir", help=f"result cache directory (default: ${ENV_VAR} or ~/.cache/shufflestab)")
    p.add_argument("--no-cache", action="store_true", help="neither read nor write the cache")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for independent entries")
    p.add_argument("--verbose", "-v", action="store_true")
    return p


KEY_FIELDS = (
    "v", "w", "chamber", "to", "component", "leaf", "split_at", "left", "right", "poly", "klass", "table",
)


def _file_content(text: str) -> str:
    try:
        return Path(text).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {text}: {exc.strerror}") from None


def request_params(args: argparse.Namespace) -> dict:
    """Whitespace-normalized arguments with referenced files replaced by their contents."""
    out = {}
    for name in KEY_FIELDS:
        val = getattr(args, name)
        if val is None:
            continue
        if name == "table":
            val = _file_content(val)
        elif isinstance(val, str):
            val = re.sub(r"file:(\S+)", lambda mt: "text:" + _file_content(mt.group(1)), val)
            val = re.sub(r"\s+", "", val)
        elif isinstance(val, list):
            val = [re.sub(r"\s+", "", x) for x in val]
        out[name] = val
    return out


def run(argv: Sequence[str] | None = None) -> tuple[int, str]:
    """Parse and execute; returns (exit status, output text)."""
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        raise InputError("--jobs must be at least 1")
    job = Job(args)
    handler = HANDLERS[args.command]
    if args.no_cache:
        return handler(job)
    cache = Cache(args.cache_dir)
    key = request_key(args.command, job.q.to_json(), request_params(args), args.h_sign)
    hit = cache.get(key)
    if hit is not None:
        log.info("served from cache: %s", key)
        doc = json.loads(hit)
        return doc["status"], doc["output"]
    status, out = handler(job)
    try:
        cache.put(key, json.dumps({"status": status, "output": out}, sort_keys=True))
    except OSError as exc:
        log.warning("cache write failed: %s", exc)
    return status, out


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(format="%(levelname)s: %(message)s", level=logging.WARNING)
    try:
        args_preview = build_parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    if args_preview.verbose:
        log.setLevel(logging.INFO)
    try:
        status, out = run(argv)
    except (InputError, TableError, ParseError, DimensionError, ValueError, KeyError, TypeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"shufflestab: error: {msg}", file=sys.stderr)
        return 2
    if args_preview.output:
        with open(args_preview.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
