"""Command line surface: check, dims, relations, table, reciprocity, truncated.

Machine output (JSON/CSV) goes to stdout; progress and diagnostics to stderr.
Exit codes: 0 success, 1 invalid input or structural failure, 2 consistency
failure (prime disagreement), 3 resource cap under --strict.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import replace

from . import engine
from .braiding import cartan_diagnose, check_braid_equation, check_rigidity, hecke_label
from .errors import (ForgeError, NotDiagonal, NotHecke, PrimeDisagreement,
                     ResourceCap)
from .racks import check_rack
from .specfile import SpecError, parse_spec

TABLE_ROWS = [
    ("Z3_g2", {"family": "rack_affine", "moduli": [3], "g": 2}),
    ("Z5_g2", {"family": "rack_affine", "moduli": [5], "g": 2}),
    ("Z7_g3", {"family": "rack_affine", "moduli": [7], "g": 3}),
    ("Z2xZ2_g", {"family": "rack_affine", "moduli": [2, 2], "g": [[0, 1], [1, 1]]}),
    ("S4_transpositions", {"family": "rack_conjugation", "n": 4}),
    ("cube_faces", {"family": "rack_cube"}),
    ("S5_transpositions", {"family": "rack_conjugation", "n": 5}),
]

# per-row degree caps by time budget tier (minutes)
_TIER_CAPS = {
    "small": {"Z3_g2": 8, "Z5_g2": 5, "Z7_g3": 4, "Z2xZ2_g": 12,
              "S4_transpositions": 5, "cube_faces": 5, "S5_transpositions": 3},
    "default": {"Z3_g2": 10, "Z5_g2": 8, "Z7_g3": 6, "Z2xZ2_g": 12,
                "S4_transpositions": 7, "cube_faces": 7, "S5_transpositions": 4},
    "stretch": {"Z3_g2": 10, "Z5_g2": 10, "Z7_g3": 7, "Z2xZ2_g": 14,
                "S4_transpositions": 9, "cube_faces": 9, "S5_transpositions": 5},
}


def _progress(msg):
    print(msg, file=sys.stderr, flush=True)


def _load_spec(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse_spec(fh.read())


def _apply_flags(caps, args):
    kw = {}
    for flag, attr in (("primes", "primes"), ("threads", "threads"),
                       ("seed", "seed")):
        v = getattr(args, flag, None)
        if v is not None:
            kw[attr] = v
    if getattr(args, "strict", False):
        kw["strict"] = True
    return replace(caps, **kw) if kw else caps


def cmd_check(args):
    name, B, caps, _ = _load_spec(args.spec)
    ok = True
    lines = {"name": name, "n": B.n, "family": B.family.get("family")}
    braid_ok, witness = check_braid_equation(B)
    lines["braid_equation"] = braid_ok if witness is None else f"fails at {witness}"
    ok &= braid_ok
    rigid = check_rigidity(B)
    lines["rigid"] = rigid
    ok &= rigid
    h = hecke_label(B)
    lines["hecke"] = (None if h is None else
                      {"q": str(h.q), "degenerate": h.degenerate})
    rack = B.family.get("rack_obj")
    if rack is not None:
        rok, rw = check_rack(rack.table)
        lines["rack_axioms"] = rok if rw is None else f"fails at {rw}"
        ok &= rok
    if B.family.get("family") in ("diagonal", "cartan"):
        try:
            diag = cartan_diagnose(B)
            lines["cartan"] = {"type": diag.cartan_type, "verdict": diag.verdict,
                               "exponents": [list(r) for r in diag.exponents]}
        except NotDiagonal as exc:
            lines["cartan"] = f"skipped: {exc}"
    print(json.dumps(lines, sort_keys=True, separators=(",", ":")))
    return 0 if ok else 1


def cmd_dims(args):
    name, B, caps, max_degree = _load_spec(args.spec)
    caps = _apply_flags(caps, args)
    if args.max_degree is not None:
        max_degree = args.max_degree
    rep = engine.graded_dims(B, max_degree, caps, mode=args.mode,
                             progress=_progress if args.verbose else None)
    if args.csv:
        print(_csv_row_header())
        print(_csv_row(name, B, rep))
    else:
        out = rep.to_dict()
        out["name"] = name
        print(json.dumps(out, sort_keys=True, separators=(",", ":")))
    if rep.status == "resource_capped" and args.strict:
        return 3
    return 0


def cmd_relations(args):
    name, B, caps, _ = _load_spec(args.spec)
    caps = _apply_flags(caps, args)
    dump = engine.relation_dump(B, args.degree, caps)
    out = {"name": name, "degree": args.degree, "count": dump.count}
    if args.dump:
        out["relations"] = [_format_relation(vec) for vec in dump.vectors]
    print(json.dumps(out, sort_keys=True, separators=(",", ":")))
    return 0


def _format_relation(vec):
    parts = []
    for word, coeff in vec:
        mono = " ".join(f"x{d}" for d in word)
        if coeff == 1:
            parts.append(f"+ {mono}")
        elif coeff == -1:
            parts.append(f"- {mono}")
        else:
            sign = "+" if coeff > 0 else "-"
            parts.append(f"{sign} {abs(coeff)} {mono}")
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def _csv_row_header():
    return "name,rank,rel_deg2,higher_rels,dims_prefix,total_dim,top_degree,status"


def _csv_row(name, B, rep):
    higher = ";".join(f"{m}:{c}" for m, c in sorted(rep.new_relations.items())
                      if m > 2 and c)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="")
    w.writerow([name, B.n, rep.new_relations.get(2, ""), higher,
                " ".join(str(d) for d in rep.dims),
                rep.total_dim if rep.total_dim is not None else "",
                rep.top_degree if rep.top_degree is not None else "",
                rep.status])
    return buf.getvalue()


def cmd_table(args):
    tier = ("small" if args.budget <= 5 else
            "stretch" if args.budget >= 120 else "default")
    caps_by_row = _TIER_CAPS[tier]
    rows = TABLE_ROWS
    if args.rows != "all":
        wanted = {int(x) for x in args.rows.split(",")}
        rows = [r for i, r in enumerate(TABLE_ROWS, start=1) if i in wanted]
    print(_csv_row_header())
    for name, braiding_block in rows:
        spec = {"name": name, "scalars": "auto",
                "braiding": dict(braiding_block)}
        _, B, caps, _ = parse_spec(spec)
        caps = _apply_flags(caps, args)
        maxdeg = caps_by_row[name]
        _progress(f"row {name}: degrees up to {maxdeg}")
        rep = engine.graded_dims(B, maxdeg, caps, mode="modular")
        print(_csv_row(name, B, rep), flush=True)
    return 0


def cmd_reciprocity(args):
    name, B, caps, max_degree = _load_spec(args.spec)
    caps = _apply_flags(caps, args)
    if args.max_degree is not None:
        max_degree = args.max_degree
    q = None
    if args.q is not None:
        from .specfile import _parse_literal
        q = _parse_literal(json.loads(args.q), B.field_ctx)
    ok, table = engine.hilbert_reciprocity_check(B, max_degree, q, caps)
    print(json.dumps({"name": name, "holds": ok, "table": table},
                     sort_keys=True, separators=(",", ":")))
    return 0 if ok else 1


def cmd_truncated(args):
    name, B, caps, max_degree = _load_spec(args.spec)
    caps = _apply_flags(caps, args)
    if args.max_degree is not None:
        max_degree = args.max_degree
    rep = engine.truncated_dims(B, args.r, max_degree, caps, mode=args.mode)
    out = rep.to_dict()
    out["name"] = name
    out["r"] = args.r
    print(json.dumps(out, sort_keys=True, separators=(",", ":")))
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="nichols-forge",
                                 description="graded data of Nichols algebras "
                                             "from braiding spec files")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, spec=True):
        if spec:
            p.add_argument("spec", help="path to a braiding spec JSON file")
        p.add_argument("--primes", type=int, default=None,
                       help="number of consensus primes (default 2)")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--strict", action="store_true")
        p.add_argument("--verbose", action="store_true")

    p = sub.add_parser("check", help="structural checks")
    common(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("dims", help="graded dimensions")
    common(p)
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--mode", choices=("exact", "modular"), default="modular")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", default=True)
    fmt.add_argument("--csv", action="store_true", default=False)
    p.set_defaults(fn=cmd_dims)

    p = sub.add_parser("relations", help="relation counts and dumps")
    common(p)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--dump", action="store_true")
    p.set_defaults(fn=cmd_relations)

    p = sub.add_parser("table", help="reproduce the appendix table")
    common(p, spec=False)
    p.add_argument("--rows", default="all", help="all or 1-based row list 1,2,5")
    p.add_argument("--budget", type=int, default=30, help="time budget, minutes")
    p.set_defaults(fn=cmd_table)

    p = sub.add_parser("reciprocity", help="Hecke Hilbert-series reciprocity")
    common(p)
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--q", default=None, help="Hecke label as a JSON scalar literal")
    p.set_defaults(fn=cmd_reciprocity)

    p = sub.add_parser("truncated", help="dims of the degree-r truncation")
    common(p)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--mode", choices=("exact", "modular"), default="modular")
    p.set_defaults(fn=cmd_truncated)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (SpecError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PrimeDisagreement as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return 2
    except ResourceCap as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3
    except NotHecke as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ForgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
