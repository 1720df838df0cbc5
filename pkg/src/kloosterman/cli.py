"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import cache
from . import charsum as cs
from . import lfunction as lf
from . import suite
from .conductor import conductor_report, cross_check
from .cyclotomic import CycInt
from .finite_field import EnumerationLimitError, make_field, set_max_enum

SCHEMA_VERSION = 1


class VerificationFailure(Exception):
    pass


# --- rendering -----------------------------------------------------------------


def _cell(v):
    if isinstance(v, CycInt):
        return v.to_json()
    return v


def _text_cell(v) -> str:
    if v is None:
        return "-"
    return repr(v) if isinstance(v, CycInt) else str(v)


def _emit(args, doc: dict, columns: list[str] | None = None, rows: list[dict] | None = None):
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    fmt = args.format
    if fmt == "json":
        print(json.dumps(doc, indent=2, default=str))
        return
    if rows is not None and fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([json.dumps(_cell(row[c])) if isinstance(row[c], CycInt) else row[c] for c in columns])
        sys.stdout.write(buf.getvalue())
        return
    if rows is not None:
        widths = [max(len(c), *(len(_text_cell(r[c])) for r in rows)) if rows else len(c) for c in columns]
        print("  ".join(c.rjust(w) for c, w in zip(columns, widths)))
        for row in rows:
            print("  ".join(_text_cell(row[c]).rjust(w) for c, w in zip(columns, widths)))
        return
    for key, value in doc.items():
        if key == "schema_version":
            continue
        print(f"{key}: {json.dumps(value, default=str) if isinstance(value, (dict, list)) else value}")


# --- config --------------------------------------------------------------------


def _parse_chars(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise ValueError(f"--chars expects comma-separated integers, got {text!r}") from None


def _spec(args) -> cs.SheafSpec:
    fld = make_field(args.p, args.f)
    return cs.SheafSpec(fld, args.n, _parse_chars(args.chars), args.psi_twist)


def _params(args, *keys) -> dict:
    return {k: getattr(args, k) for k in keys}


# --- commands ------------------------------------------------------------------


def cmd_power_sums(args) -> int:
    spec = _spec(args)
    columns = ["r", "tensor", "frob2", "exterior", "symmetric"]
    stream = args.format == "text" and args.jobs <= 1
    rows = []
    if stream:
        print("  ".join(columns))
    work = range(1, args.rmax + 1)
    if args.jobs > 1:
        results = lf.map_rows(spec, work, "row", args.method, args.jobs)
    else:
        results = (cs.power_sum_row(spec, r, args.method) for r in work)
    for res in results:
        row = {"r": res.r, "tensor": res.tensor, "frob2": res.frob2, "exterior": res.exterior, "symmetric": res.symmetric}
        if stream:
            print("  ".join(_text_cell(row[c]) for c in columns), flush=True)
        rows.append(row)
    if stream:
        return 0
    doc = {
        "command": "power-sums",
        "params": _params(args, "p", "f", "n", "rmax", "chars", "psi_twist", "method"),
        "rows": [{k: _cell(v) for k, v in row.items()} for row in rows],
    }
    _emit(args, doc, columns, rows)
    return 0


def _sums_for(args, kind: str, R: int) -> lf.PowerSums:
    return lf.sheaf_power_sums(_spec(args), R, kind, args.method, args.jobs)


def cmd_lfunction(args) -> int:
    spec = _spec(args)
    kind = args.kind
    doc = {"command": "lfunction", "params": _params(args, "p", "f", "n", "chars", "psi_twist", "kind", "method")}
    status = 0
    if args.verify:
        if kind == "kl":
            cand = lf.kl_L()
        elif kind == "exterior" and spec.is_trivial:
            cand = lf.predicted_exterior_L(args.n, spec.field.q)
        else:
            raise ValueError("--verify has a prediction only for --kind exterior with trivial characters, or --kind kl")
        R = args.rmax or 2 * cand.factor_count + 4
        res = lf.verify_candidate(_sums_for(args, kind, R), cand)
        doc.update(candidate=str(cand), L=cand.to_json(), R=R, verified=res.ok)
        if not res.ok:
            doc.update(first_failure=res.first_failure, expected=_cell(res.expected), got=_cell(res.got))
            status = 1
    else:
        max_deg = args.max_deg or lf.default_max_deg(args.n)
        R = args.rmax or lf.default_R(max_deg)
        L = lf.discover_lfunction(_sums_for(args, kind, R), max_deg)
        doc.update(L=L.to_json(), display=str(L), R=R, max_deg=max_deg, swan=lf.swan_from_L(L, tame_at_zero=True))
    _emit(args, doc)
    return status


def cmd_swan(args) -> int:
    max_deg = args.max_deg or lf.default_max_deg(args.n)
    R = args.rmax or lf.default_R(max_deg)
    L = lf.discover_lfunction(_sums_for(args, "exterior", R), max_deg)
    swan = lf.swan_from_L(L, tame_at_zero=True)
    predicted = lf.predicted_swan(args.n)
    doc = {
        "command": "swan",
        "params": _params(args, "p", "f", "n", "chars", "psi_twist", "method"),
        "L": str(L),
        "swan": swan,
        "predicted": predicted,
        "match": swan == predicted,
    }
    _emit(args, doc)
    return 0 if swan == predicted else 1


def cmd_gauss(args) -> int:
    base = make_field(args.p, args.f)
    columns = ["r", "characters", "agree", "c0", "c_plus", "c_minus"]
    rows = []
    status = 0
    for r in range(1, args.rmax + 1):
        M = base.q ** (2 * r) - 1
        agree = 0
        for e in range(M):
            g, want = cs.base_change_gauss_sum(base, r, e, args.psi_twist)
            agree += g == want
        c0, cp, cm = cs.count_characters(base, r, verify=False)
        if agree != M or (c0, cp, cm) != cs.character_counts_closed_form(base.q, r):
            status = 1
        rows.append({"r": r, "characters": M, "agree": agree, "c0": c0, "c_plus": cp, "c_minus": cm})
    doc = {"command": "gauss", "params": _params(args, "p", "f", "rmax", "psi_twist"), "rows": rows}
    _emit(args, doc, columns, rows)
    return status


def cmd_conductor(args) -> int:
    if args.skip_compute:
        rep = conductor_report(args.n, args.q, lf.predicted_swan(2 * args.n), source="predicted")
        ok = True
        L = None
    else:
        res = cross_check(args.n, args.q, args.method, args.jobs)
        if res.report is None:
            raise VerificationFailure("; ".join(res.problems))
        rep, ok, L = res.report, res.ok, res.L
    doc = {"command": "conductor", "report": rep.to_json(), "ok": ok}
    if L is not None:
        doc["exterior_L"] = str(L)
    if args.format == "text":
        tag = f" ({rep.source})"
        print(f"n = {rep.n}, q = {rep.q}{tag}")
        for label, value in [
            ("Sw(wedge^2 tau)", rep.swan_exterior),
            ("Sw(tau)", rep.swan_tau),
            ("Sw(Ad)", rep.swan_ad),
            ("dim Ad", rep.dim_ad),
            ("Ar(Ad)", rep.artin_ad),
            ("log_q |gamma|", rep.gamma_log_q),
            ("deg(pi)/deg(St)", rep.formal_degree_ratio),
            ("dim rho / #S", rep.conjecture_constant),
        ]:
            print(f"  {label:<16} {value}")
        if L is not None:
            print(f"  {'L(wedge^2 Kl)':<16} {L}")
    else:
        _emit(args, doc)
    return 0 if ok else 1


def _parse_grid(text: str | None):
    if not text:
        return suite.DEFAULT_GRID
    out = []
    for item in text.split(","):
        q, _, n = item.partition(":")
        out.append((int(q), int(n)))
    return tuple(out)


def cmd_verify_suite(args) -> int:
    grid = _parse_grid(args.grid)
    results = []
    first_bad = None
    for res in suite.run(grid, stop_first=args.stop_first, sign_bug=args.inject_sign_bug):
        results.append(res)
        if args.format == "text":
            print(f"{'PASS' if res.ok else 'FAIL'}  {res.check:<17} {res.case:<22} {res.detail}", flush=True)
        if not res.ok and first_bad is None:
            first_bad = res
    passed = sum(r.ok for r in results)
    if args.format == "text":
        print(f"{passed}/{len(results)} checks passed")
        if first_bad:
            print(f"first counterexample: {first_bad.check} {first_bad.case}: {first_bad.detail}")
    else:
        doc = {
            "command": "verify-suite",
            "passed": passed,
            "total": len(results),
            "results": [r.to_json() for r in results],
            "first_counterexample": first_bad.to_json() if first_bad else None,
        }
        if args.format == "csv":
            rows = [r.to_json() for r in results]
            _emit(args, doc, ["check", "case", "ok", "detail"], rows)
        else:
            _emit(args, doc)
    return 0 if first_bad is None else 1


def cmd_cache(args) -> int:
    if args.action == "clear":
        doc = {"command": "cache clear", "removed": cache.clear(), "cache_dir": str(cache.get_cache_dir())}
    else:
        doc = {"command": "cache info", **cache.info()}
    _emit(args, doc)
    return 0


# --- parser --------------------------------------------------------------------


def _common(parser: argparse.ArgumentParser):
    parser.add_argument("--format", choices=("text", "json", "csv"), default="text")
    parser.add_argument("--jobs", type=int, default=1, help="worker processes (results are order independent)")
    parser.add_argument("--max-enum", type=int, default=None, help="enumeration ceiling (env KLOOSTERMAN_MAX_ENUM)")
    parser.add_argument("--cache-dir", default=None, help="field cache directory (env KLOOSTERMAN_CACHE_DIR)")


def _sheaf(parser: argparse.ArgumentParser, rmax_default: int | None):
    parser.add_argument("--p", type=int, required=True)
    parser.add_argument("--f", type=int, default=1)
    parser.add_argument("--n", type=int, required=True)
    parser.add_argument("--rmax", type=int, default=rmax_default)
    parser.add_argument("--chars", default=None, help="exponents e1,e2,... of chi_i = rho_e on k^x")
    parser.add_argument("--psi-twist", type=int, default=1, help="encoding of b in psi_b")
    parser.add_argument("--method", choices=cs.METHODS, default="auto")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kloosterman", description="Kloosterman sheaf power sums and L-functions")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("power-sums", help="tensor / Frob^2 / exterior / symmetric sums per r")
    _sheaf(p, 3)
    _common(p)
    p.set_defaults(func=cmd_power_sums)

    p = sub.add_parser("lfunction", help="verify or discover an L-function")
    _sheaf(p, None)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--verify", action="store_true")
    mode.add_argument("--discover", action="store_true")
    p.add_argument("--kind", choices=lf.KINDS, default="exterior")
    p.add_argument("--max-deg", type=int, default=None)
    _common(p)
    p.set_defaults(func=cmd_lfunction)

    p = sub.add_parser("swan", help="Swan conductor of the exterior square")
    _sheaf(p, None)
    p.add_argument("--max-deg", type=int, default=None)
    _common(p)
    p.set_defaults(func=cmd_swan)

    p = sub.add_parser("gauss", help="base-change Gauss sums and character counts")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--f", type=int, default=1)
    p.add_argument("--rmax", type=int, default=1)
    p.add_argument("--psi-twist", type=int, default=1)
    _common(p)
    p.set_defaults(func=cmd_gauss)

    p = sub.add_parser("conductor", help="Artin conductor and gamma magnitude of Ad")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--skip-compute", action="store_true", help="use the predicted Swan value")
    p.add_argument("--method", choices=cs.METHODS, default="auto")
    _common(p)
    p.set_defaults(func=cmd_conductor)

    p = sub.add_parser("verify-suite", help="run every closed-form check")
    p.add_argument("--grid", default=None, help="q:n pairs, e.g. 3:2,5:3")
    p.add_argument("--stop-first", action="store_true")
    p.add_argument("--inject-sign-bug", action="store_true", help="debug: drop the (-1)^(n-1) normalisation")
    _common(p)
    p.set_defaults(func=cmd_verify_suite)

    p = sub.add_parser("cache", help="inspect or clear the field cache")
    p.add_argument("action", choices=("info", "clear"))
    _common(p)
    p.set_defaults(func=cmd_cache)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.max_enum is not None:
            set_max_enum(args.max_enum)
        if args.cache_dir is not None:
            cache.set_cache_dir(args.cache_dir)
        if getattr(args, "jobs", 1) < 1:
            raise ValueError("--jobs must be >= 1")
        return args.func(args)
    except VerificationFailure as exc:
        print(json.dumps({"schema_version": SCHEMA_VERSION, "error": str(exc), "kind": "verification"}), file=sys.stderr)
        return 1
    except ArithmeticError as exc:
        print(json.dumps({"schema_version": SCHEMA_VERSION, "error": str(exc), "kind": "arithmetic"}), file=sys.stderr)
        return 1
    except ValueError as exc:
        kind = "bound" if isinstance(exc, EnumerationLimitError) else "validation"
        print(json.dumps({"schema_version": SCHEMA_VERSION, "error": str(exc), "kind": kind}), file=sys.stderr)
        return 2
    finally:
        set_max_enum(None)


if __name__ == "__main__":
    sys.exit(main())
