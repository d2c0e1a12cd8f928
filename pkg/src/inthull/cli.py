"""Command-line front end.

Every subcommand reads one JSON instance (``-`` for stdin) with fields
``A`` and optionally ``b``, ``W`` and ``box``, and prints a JSON report.
Exit codes: 0 success, 1 the queried property is false, 2 bad input,
3 a size cap was exceeded.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Sequence

from . import asymptotic, covering, exactla, oracle, wsynth
from .errors import CapExceededError, CertificationError, InthullError
from .exactla import IntMatrix

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3
_JSON_SAFE = 2**53


class InstanceParseError(InthullError, ValueError):
    def __init__(self, field: str | None, message: str, position: Any = None):
        self.field = field
        self.position = position
        where = "" if field is None else f"{field}"
        if position is not None:
            where += f" at {position}"
        super().__init__(f"{where}: {message}" if where else message)


@dataclass(frozen=True)
class InstanceFile:
    A: IntMatrix
    b: tuple[int, ...] | None = None
    W: IntMatrix | None = None
    box: tuple[tuple[int, int], ...] | None = None
    digest: str = ""


# ---------------------------------------------------------------------------
# parsing


def _int(value, field, position) -> int:
    if isinstance(value, bool):
        raise InstanceParseError(field, "booleans are not integers", position)
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value)
        except ValueError:
            pass
    if isinstance(value, float) and value.is_integer() and abs(value) < _JSON_SAFE:
        return int(value)
    raise InstanceParseError(field, f"{value!r} is not an integer", position)


def _matrix(value, field, cols=None) -> IntMatrix:
    if not isinstance(value, list):
        raise InstanceParseError(field, "expected a list of rows")
    rows = []
    for i, row in enumerate(value):
        if not isinstance(row, list):
            raise InstanceParseError(field, "expected a list of integers", [i])
        rows.append([_int(x, field, [i, j]) for j, x in enumerate(row)])
    width = len(rows[0]) if rows else cols
    for i, row in enumerate(rows):
        if len(row) != width:
            raise InstanceParseError(field, f"ragged row: {len(row)} entries, expected {width}", [i])
    if width is None:
        raise InstanceParseError(field, "cannot infer the number of columns of an empty matrix")
    if cols is not None and width != cols:
        raise InstanceParseError(field, f"{width} columns, expected {cols}")
    return IntMatrix(rows, cols=width)


def parse_instance(source) -> InstanceFile:
    """Read and validate an instance from a path, ``-`` or a text stream."""
    if hasattr(source, "read"):
        text = source.read()
    elif source == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InstanceParseError(None, str(exc)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(None, exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    if not isinstance(doc, dict):
        raise InstanceParseError(None, "the document must be a JSON object")
    unknown = sorted(set(doc) - {"A", "b", "W", "box"})
    if unknown:
        raise InstanceParseError(unknown[0], "unknown field")
    if "A" not in doc:
        raise InstanceParseError("A", "missing")
    A = _matrix(doc["A"], "A")
    if A.rows == 0:
        raise InstanceParseError("A", "needs at least one row")
    b = None
    if doc.get("b") is not None:
        if not isinstance(doc["b"], list):
            raise InstanceParseError("b", "expected a list of integers")
        b = tuple(_int(x, "b", [i]) for i, x in enumerate(doc["b"]))
        if len(b) != A.rows:
            raise InstanceParseError("b", f"{len(b)} entries but A has {A.rows} rows")
    W = _matrix(doc["W"], "W", cols=A.cols) if doc.get("W") is not None else None
    box = None
    if doc.get("box") is not None:
        raw = doc["box"]
        if not isinstance(raw, list) or len(raw) != A.cols:
            raise InstanceParseError("box", f"expected {A.cols} [lo, hi] pairs")
        pairs = []
        for i, pair in enumerate(raw):
            if not isinstance(pair, list) or len(pair) != 2:
                raise InstanceParseError("box", "expected a [lo, hi] pair", [i])
            lo, hi = (_int(x, "box", [i, j]) for j, x in enumerate(pair))
            if lo > hi:
                raise InstanceParseError("box", "lo exceeds hi", [i])
            pairs.append((lo, hi))
        box = tuple(pairs)
    digest = hashlib.sha256(
        json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()
    return InstanceFile(A, b, W, box, digest)


# ---------------------------------------------------------------------------
# rendering


def to_jsonable(obj):
    """Canonical JSON form: rationals as "p/q", integers beyond 2^53 as strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj if abs(obj) < _JSON_SAFE else str(obj)
    if isinstance(obj, Fraction):
        return to_jsonable(obj.numerator) if obj.denominator == 1 else f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, float):
        return obj
    if isinstance(obj, exactla._Matrix):
        return [[to_jsonable(x) for x in row] for row in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    raise TypeError(f"cannot render {type(obj).__name__}")


def render(report: dict) -> str:
    return json.dumps(to_jsonable(report), sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# commands; each returns (result, property_holds)


def _need_b(inst: InstanceFile):
    if inst.b is None:
        raise InstanceParseError("b", "this command needs a right-hand side")
    return inst.b


def _oracle_instance(inst: InstanceFile) -> oracle.Instance:
    return oracle.Instance(inst.A, _need_b(inst), inst.box)


def cmd_hnf(inst, args):
    h = exactla.hnf(inst.A)
    return {
        "U": h.U,
        "H": h.H,
        "row_permutation": h.row_permutation,
        "ell": h.ell,
        "alphas": h.alphas,
        "delta": h.delta,
    }, True


def cmd_delta(inst, args):
    mode = args.mode or "full_rank"
    kw = {"cap": args.cap} if args.cap else {}
    return {"mode": mode, "delta": exactla.delta(inst.A, mode=mode, **kw)}, True


def _cover_dict(cover: covering.Cover) -> dict:
    return {"B": cover.B.points, "T": cover.T.points, "cost": cover.cost}


def cmd_cover(inst, args):
    mode = args.mode or "box"
    h = exactla.hnf(inst.A)
    out = {"mode": mode, "ell": h.ell, "alphas": h.alphas, "delta": h.delta}
    if h.ell == 0:
        out.update(cost=0, points=1, lower_bound=1, B=[], T=[], verified=True)
        return out, True
    lam = h.lam
    C = covering.PointSet(
        h.ell,
        covering.PointSet.psi(h.alphas).points + tuple(lam.col(j) for j in range(h.ell)),
    )
    if mode == "trivial":
        cover = covering.cover_trivial(C)
    elif mode == "box":
        kc = covering.choose_k(h.alphas)
        cover = covering.cover_box(lam, kc)
        out.update(k=kc.k, betas=kc.betas, case=kc.case, box_bound=covering.box_cost_bound(h.delta))
    elif mode == "optimal":
        kw = {"max_grid": args.cap} if args.cap else {}
        cover = covering.cover_optimal_bruteforce(C, **kw)
    else:
        raise InstanceParseError("--mode", f"unknown cover mode {mode!r}")
    ok = covering.verify_cover(C, cover)
    out.update(_cover_dict(cover), points=len(C), lower_bound=math.isqrt(len(C) - 1) + 1)
    out["verified"] = ok
    return out, ok


def cmd_synthesize(inst, args):
    s = wsynth.synthesize(inst.A, mode=args.mode or "best")
    out = {
        "W": s.W,
        "W_compact": wsynth.compact_rows(s.W),
        "k": s.report.k,
        "report": s.report.as_dict(),
        "tu_method": s.certificate.tu.method,
    }
    return out, True


def cmd_certify(inst, args):
    if inst.W is None:
        raise InstanceParseError("W", "certify needs W")
    try:
        cert, coords = wsynth.certify_w(inst.A, inst.W, tu_method=args.method or "auto")
    except CertificationError as exc:
        return {"certified": False, "reason": exc.reason, "message": str(exc)}, False
    return {"certified": True, "coordinates": coords, "k": cert.k, "tu_method": cert.tu.method}, True


def cmd_verify(inst, args):
    W = inst.W if inst.W is not None else IntMatrix([], cols=inst.A.cols)
    oi = _oracle_instance(inst)
    ok = oracle.verify_integrality(oi, W)
    verts = oracle.wmip_vertices(oi, W)
    return {
        "integral": ok,
        "k": W.rows,
        "vertices": verts.points,
        "empty": verts.infeasible,
    }, ok


def cmd_ip(inst, args):
    kw = {"cap": args.cap} if args.cap else {}
    hull = oracle.integer_hull_points(_oracle_instance(inst), **kw)
    return {"points": hull.points, "vertices": hull.vertices, "empty": hull.empty}, True


def cmd_good_set(inst, args):
    rep = asymptotic.in_good_set(inst.A, _need_b(inst))
    return {
        "in_good_set": rep.in_good_set,
        "empty_p": rep.empty_p,
        "violations": [{"I": I, "j": j} for I, j in rep.violations],
        "feasible_bases": rep.feasible_bases,
        "delta_max": asymptotic.delta_max(inst.A),
    }, rep.in_good_set


def cmd_hyperplanes(inst, args):
    fams = asymptotic.hyperplane_families(inst.A)
    out = {
        "families": [{"I": f.I, "j": f.j, "coeffs": f.coeffs, "r_count": f.count} for f in fams],
        "count": sum(f.count for f in fams),
    }
    if inst.b is not None:
        out["containing_b"] = [
            {"I": h.I, "j": h.j, "r": h.r} for h in asymptotic.hyperplanes_through(inst.A, inst.b)
        ]
    return out, True


def cmd_density(inst, args):
    ts = args.t or [5]
    mode = args.mode or "enumerate"
    kw = {"cap": args.cap} if args.cap else {}
    if mode == "sample":
        kw.update(seed=args.seed if args.seed is not None else 0, samples=args.samples)
    rows = []
    for t in ts:
        d = asymptotic.density_estimate(inst.A, t, mode=mode, **kw)
        rows.append(
            {
                "t": d.t,
                "total": d.total,
                "good": d.good,
                "nonempty_good": d.nonempty_good,
                "fraction": d.fraction,
                "fraction_float": float(d.fraction),
            }
        )
    out = {"mode": mode, "table": rows}
    if mode == "sample":
        out["seed"] = kw["seed"]
    return out, True


def cmd_nondegen(inst, args):
    nd = asymptotic.is_nondegenerate(inst.A)
    out = {"nondegenerate": nd}
    if nd:
        out["row_bound_holds"] = asymptotic.nondeg_row_bound_check(inst.A)
        out["delta"] = exactla.delta(inst.A)
    return out, nd


def cmd_inum(inst, args):
    res = oracle.integrality_number_bruteforce(
        _oracle_instance(inst), entry_bound=args.entry_bound, kmax=args.kmax
    )
    return {
        "k": res.k,
        "W": res.W,
        "entry_bound": res.entry_bound,
        "exact_within_class": res.exact_within_class,
    }, res.k is not None


COMMANDS: dict[str, Callable] = {
    "hnf": cmd_hnf,
    "delta": cmd_delta,
    "cover": cmd_cover,
    "synthesize": cmd_synthesize,
    "certify": cmd_certify,
    "verify": cmd_verify,
    "ip": cmd_ip,
    "good-set": cmd_good_set,
    "hyperplanes": cmd_hyperplanes,
    "density": cmd_density,
    "nondegen": cmd_nondegen,
    "inum": cmd_inum,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="inthull", description="Integrality-number toolkit.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("instance", help="JSON instance file, or - for stdin")
        sp.add_argument("--output", help="write the report here instead of stdout")
        sp.add_argument("--cap", type=int, help="override the size cap of the command")
        sp.add_argument("--mode")
        sp.add_argument("--method", choices=["auto", "exhaustive", "ghouila_houri"])
        sp.add_argument("--t", type=int, nargs="+")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--samples", type=int, default=10_000)
        sp.add_argument("--entry-bound", type=int, default=2)
        sp.add_argument("--kmax", type=int)
    return p


def dispatch(command: str, inst: InstanceFile | None, args) -> tuple[dict, int]:
    report = {"command": command, "input_digest": inst.digest if inst else None}
    try:
        if inst is None:
            raise InstanceParseError(None, "no instance")
        result, holds = COMMANDS[command](inst, args)
        report["result"] = result
        code = EXIT_OK if holds else EXIT_FALSE
    except CapExceededError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = EXIT_CAP
    except (InthullError, ValueError) as exc:
        report["error"] = {
            "type": type(exc).__name__,
            "message": str(exc),
            "field": getattr(exc, "field", None),
            "position": getattr(exc, "position", None),
        }
        code = EXIT_INPUT
    report["exit_code"] = code
    report["status"] = {0: "ok", 1: "property_false", 2: "input_error", 3: "cap_exceeded"}[code]
    return report, code


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    inst = None
    try:
        inst = parse_instance(args.instance)
    except InstanceParseError as exc:
        report = {
            "command": args.command,
            "input_digest": None,
            "error": {
                "type": type(exc).__name__,
                "message": str(exc),
                "field": exc.field,
                "position": exc.position,
            },
            "exit_code": EXIT_INPUT,
            "status": "input_error",
        }
        code = EXIT_INPUT
    else:
        report, code = dispatch(args.command, inst, args)
    text = render(report)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
