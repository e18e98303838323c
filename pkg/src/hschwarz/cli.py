"""Command-line front end.

Exit codes: 0 pass / equal, 1 not equal / identity failed, 2 input or
evaluation error, 3 precondition not met (suite skipped).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import List, Optional

import numpy as np

from . import documents
from .analytic import Mobius
from .errors import (
    ConstantDilatation,
    DocumentError,
    HSchwarzError,
    NotNormalized,
)
from .equivalence import (
    ConnectionResult,
    IdentityReport,
    TOL_FIELD,
    TOL_WITNESS,
    check_equal_schwarzian,
    verify_corollary,
    verify_invariance,
    verify_phi_identity,
    verify_phi_lemma_limits,
    verify_prop31,
    verify_thm33,
)
from .grid import DEFAULT_ANGLES, DEFAULT_RADII, GridSpec, scan_order
from .harmonic import (
    dilatation,
    jacobian,
    normalization_defects,
    normalize_at,
    pre_schwarzian_h,
    schwarzian_h_closed,
    schwarzian_h_definition,
    schwarzian_h_pointwise,
)
from .jets import WirtingerStencil

EXIT_OK, EXIT_FAIL, EXIT_ERROR, EXIT_SKIP = 0, 1, 2, 3
QUANTITIES = ("value", "jacobian", "dilatation", "preschwarzian", "schwarzian")
SUITES = ("invariance", "prop31", "thm33", "corollary", "phi", "limits")
#: fixed sample of w for the frozen-Schwarzian suite (w = 0 included)
THM33_SAMPLES = (0j, 0.3, 0.5j, -0.4 + 0.2j, -0.1 - 0.6j, 0.65, -0.55j, 0.2 + 0.2j)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


class Raw(str):
    """Pre-serialized JSON text."""


def to_json(obj) -> str:
    """JSON with 17-significant-digit floats and complex numbers as [re, im]."""
    if isinstance(obj, Raw):
        return str(obj)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return documents.fmt_float(x) if np.isfinite(x) else "null"
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return "[" + to_json(z.real) + ", " + to_json(z.imag) + "]"
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(x) -> str:
    if isinstance(x, (float, np.floating)):
        return documents.fmt_float(x) if np.isfinite(x) else ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    return "" if x is None else str(x)


def to_csv(rows: List[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    fields = list(rows[0])
    for r in rows[1:]:
        fields += [k for k in r if k not in fields]
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\r\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _cell(r.get(k)) for k in fields})
    return buf.getvalue()


def _write(args, rows: List[dict], extra: Optional[dict] = None):
    if args.format == "csv":
        args.out.write(to_csv(rows))
    else:
        payload = {"results": rows}
        if extra:
            payload.update(extra)
        args.out.write(to_json(payload) + "\n")


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _complex_arg(s: str) -> complex:
    try:
        return complex(s.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {s!r}") from None


def _floats(s: str):
    try:
        return tuple(float(x) for x in s.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals: {s!r}") from None


def _grid(args) -> GridSpec:
    g = GridSpec(
        radii=args.grid_radii or DEFAULT_RADII,
        angles=args.grid_angles,
        extra_points=tuple(args.point or ()),
    )
    return g.capped(args.max_radius)


def _maps(args):
    docs = documents.load(args.input)
    if args.doc is not None:
        if not 1 <= args.doc <= len(docs):
            raise ValueError(f"--doc {args.doc} out of range (file has {len(docs)} documents)")
        return dict(docs[args.doc - 1].maps)
    seen, out = {}, {}
    for d in docs:
        for name, spec in d.maps.items():
            seen.setdefault(name, []).append(d.line)
            out[name] = spec
    dup = {k: v for k, v in seen.items() if len(v) > 1}
    return _Ambiguous(out, dup)


class _Ambiguous(dict):
    """Name table that refuses names declared in several documents."""

    def __init__(self, maps, dup):
        super().__init__(maps)
        self.dup = dup

    def __getitem__(self, name):
        if name in self.dup:
            lines = ", ".join(str(x) for x in self.dup[name])
            raise KeyError(f"map {name!r} is declared on lines {lines}; select one document with --doc")
        return super().__getitem__(name)


def _get(maps, name):
    if name not in maps:
        raise KeyError(f"no map named {name!r} in {len(maps)} declared maps")
    return maps[name].build()


def _report_row(r: IdentityReport, suite: str):
    row = {
        "suite": suite,
        "identity": r.name,
        "max_residual": r.max_residual,
        "worst_re": r.worst_point.real,
        "worst_im": r.worst_point.imag,
        "tolerance": r.tolerance,
        "passed": r.passed,
        "skipped": False,
        "reason": "",
    }
    rows = [row]
    for s in r.subreports:
        rows.extend(_report_row(s, suite))
    return rows


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_eval(args) -> int:
    f = _get(_maps(args), args.name)
    pts = _grid(args).points()
    pts = pts[scan_order(pts)]
    q = args.quantity
    dev_p = dev_d = None
    if q == "value":
        out = f(pts)
    elif q == "jacobian":
        out = jacobian(f, pts)
    elif q == "dilatation":
        out = dilatation(f, pts).w
    elif q == "preschwarzian":
        out = pre_schwarzian_h(f, pts)
    else:
        out = schwarzian_h_closed(f, pts)
        dev_p = np.abs(out - schwarzian_h_pointwise(f, pts))
        stencil = WirtingerStencil(step=args.stencil_step)
        dev_d = np.abs(out - schwarzian_h_definition(f, pts, stencil))
    out = np.asarray(out, dtype=np.complex128)
    rows = []
    for k, z in enumerate(pts):
        row = {"z_re": z.real, "z_im": z.imag, "re": out[k].real, "im": out[k].imag}
        if dev_p is not None:
            row["route_dev_pointwise"] = dev_p[k]
            row["route_dev_definition"] = dev_d[k]
        rows.append(row)
    _write(args, rows, {"map": args.name, "quantity": q})
    return EXIT_OK


def _connection_payload(r: ConnectionResult) -> dict:
    d = {"verdict": r.verdict.value, "equal": r.equal, "residual": r.residual}
    if r.affine is not None:
        d["affine"] = {"a": r.affine.a, "b": r.affine.b, "c": r.affine.c}
        d["mu"] = r.rotation.mu
    if r.mobius is not None:
        T: Mobius = r.mobius
        d["mobius"] = {"a": T.a, "b": T.b, "c": T.c, "d": T.d}
        d.update(alpha1=r.alpha1, alpha2=r.alpha2, gamma1=r.gamma1, gamma2=r.gamma2)
    d["conjugated"] = list(r.conjugated)
    d["diagnostics"] = dict(r.diagnostics)
    return d


def cmd_check_equal(args) -> int:
    maps = _maps(args)
    f1, f2 = _get(maps, args.name1), _get(maps, args.name2)
    r = check_equal_schwarzian(
        f1, f2, grid=_grid(args), tol_field=args.tol_field, tol_witness=args.tol_witness
    )
    payload = _connection_payload(r)
    if args.format == "csv":
        flat = {k: v for k, v in payload.items() if k != "diagnostics"}
        for k in ("max_field_deviation", "worst_point", "reason"):
            if k in r.diagnostics:
                flat[k] = r.diagnostics[k]
        row = {}
        for k, v in flat.items():
            if isinstance(v, dict):
                for kk, vv in v.items():
                    row.update(_complex_cols(f"{k}_{kk}", vv))
            else:
                row.update(_complex_cols(k, v))
        args.out.write(to_csv([row]))
    else:
        args.out.write(to_json({"results": [payload]}) + "\n")
    return EXIT_OK if r.equal else EXIT_FAIL


def _complex_cols(key, v):
    if isinstance(v, complex):
        return {f"{key}_re": v.real, f"{key}_im": v.imag}
    if isinstance(v, (list, tuple)):
        return {key: " ".join(_cell(x) for x in v)}
    return {key: v}


def cmd_normalize(args) -> int:
    f = _get(_maps(args), args.name)
    n = normalize_at(f, args.at)
    M = n.pair_map
    record = {
        "map": args.name,
        "w": args.at,
        "document": Raw(documents.emit_document({f"{args.name}_normalized": n.map})),
        "pair_map": {k: getattr(M, k) for k in ("m11", "m12", "m21", "m22", "t1", "t2")},
        "automorphism": {"w": n.automorphism.w},
        "defects": normalization_defects(n.map),
    }
    args.out.write(to_json({"results": [record]}) + "\n")
    return EXIT_OK


def _pair_for_suite(args, maps):
    f1 = _get(maps, args.name1)
    f2 = _get(maps, args.name2 or args.name1)
    if args.normalize_at is not None:
        f1 = normalize_at(f1.oriented(), args.normalize_at).map
        f2 = normalize_at(f2.oriented(), args.normalize_at).map
    return f1, f2


def _run_suite(suite, args, maps, grid):
    """List of IdentityReport, or raise a precondition error."""
    if suite == "invariance":
        names = [args.name1] + ([args.name2] if args.name2 else [])
        out = []
        for nm in names:
            out += verify_invariance(_get(maps, nm), grid)
        return out
    f1, f2 = _pair_for_suite(args, maps)
    pts = grid.points()
    dev = float(np.abs(schwarzian_h_closed(f1, pts) - schwarzian_h_closed(f2, pts)).max())
    if dev > args.tol_field:
        raise _Skip(f"harmonic Schwarzians differ (max deviation {dev:.3g})")
    if suite == "prop31":
        return verify_prop31(f1, f2, grid)
    if suite == "thm33":
        return [verify_thm33(f1, f2, THM33_SAMPLES, grid)]
    if suite == "corollary":
        return [verify_corollary(f1, f2, grid)]
    if suite == "phi":
        return [verify_phi_identity(f1, f2, grid)]
    return [verify_phi_lemma_limits(f1, f2)]


class _Skip(Exception):
    pass


def cmd_verify(args) -> int:
    maps = _maps(args)
    grid = _grid(args)
    suites = SUITES if args.suite == "all" else (args.suite,)
    rows, failed, skipped = [], False, False
    for suite in suites:
        try:
            reports = _run_suite(suite, args, maps, grid)
        except (_Skip, NotNormalized, ConstantDilatation) as exc:
            reason = f"{type(exc).__name__}: {exc}" if not isinstance(exc, _Skip) else str(exc)
            rows.append({"suite": suite, "identity": "", "passed": False, "skipped": True, "reason": reason})
            skipped = True
            continue
        for r in reports:
            rows.extend(_report_row(r, suite))
            failed |= not r.passed
    _write(args, rows)
    if failed:
        return EXIT_FAIL
    return EXIT_SKIP if skipped else EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="map document (JSON Lines)")
    common.add_argument("--doc", type=int, help="use only the N-th document of the file (1-based)")
    common.add_argument("--grid-radii", type=_floats, help="comma-separated radii in (0, 1)")
    common.add_argument("--grid-angles", type=int, default=DEFAULT_ANGLES)
    common.add_argument("--max-radius", type=float, default=0.8)
    common.add_argument("--point", type=_complex_arg, action="append", help="extra grid point (repeatable)")
    common.add_argument("--tol-field", type=float, default=TOL_FIELD)
    common.add_argument("--tol-witness", type=float, default=TOL_WITNESS)
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--stencil-step", type=float, default=1e-3)

    p = argparse.ArgumentParser(prog="hschwarz", description="Harmonic Schwarzian toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", parents=[common], help="evaluate a quantity on the grid")
    e.add_argument("name")
    e.add_argument("--quantity", choices=QUANTITIES, default="schwarzian")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("check-equal", parents=[common], help="decide S_H(f1) = S_H(f2)")
    c.add_argument("name1")
    c.add_argument("name2")
    c.set_defaults(func=cmd_check_equal)

    n = sub.add_parser("normalize", parents=[common], help="normalize a map at a base point")
    n.add_argument("name")
    n.add_argument("--at", type=_complex_arg, default=0j, help="base point w (default 0)")
    n.set_defaults(func=cmd_normalize)

    v = sub.add_parser("verify", parents=[common], help="run identity suites")
    v.add_argument("name1")
    v.add_argument("name2", nargs="?")
    v.add_argument("--suite", choices=SUITES + ("all",), default="all")
    v.add_argument("--normalize-at", type=_complex_arg, help="normalize both maps at w first")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None, out=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.out = out or sys.stdout
    try:
        return args.func(args)
    except (DocumentError, HSchwarzError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"hschwarz: error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
