"""Command-line front end and the on-disk JSON table format.

Table files are canonical JSON:

    {"p": 3,
     "domain":   [{"field": {"degree": 4, "modulus": [2,0,0,2,1]}}, ...],
     "codomain": [{"vector": 1}],
     "values": [0, 2, 1, ...]}

Components are fields (degree + monic modulus, coefficients low to high)
or prime vector blocks; values are canonical codomain indices in canonical
domain-index order.  Tables above 2^20 entries store values in a sibling
little-endian binary file referenced as {"values_file": name, "encoding":
"le-u8" | "le-u16" | "le-u32"}.  Writing is deterministic, so a load/save
round trip is byte-identical.

Exit codes: 0 success, 2 parse/validation error, 3 no applicable route,
4 construction precondition refused, 5 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .analysis import analyze, analyze_vectorial, component, is_vectorial_dual_bent
from .constructions import (
    MonomialPermutation,
    build_prop3,
    build_prop4,
    build_thm6,
    catalog_ids,
    complete_permutation_combiner,
    example_catalog,
    sum_combiner,
)
from .errors import (
    BentPartsError,
    ConstructionRefusedError,
    DomainError,
    InvariantViolationError,
    ParseError,
    RouteRefusedError,
)
from .fields import DEFAULT_MODULI, FieldDescriptor, SpaceDescriptor, VectorComponent
from .hadamard import triple_product_check, weakly_regular_type
from .partitions import (
    DEFAULT_ENUM_BUDGET,
    assignment_count,
    preimage_partition,
    verify_definitional,
    verify_eq1,
    verify_eq29,
    verify_thm1_permutation_route,
)
from .transform import FunctionTable, walsh_points_batch
from . import reporting

BINARY_THRESHOLD = 1 << 20

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NO_ROUTE = 3
EXIT_REFUSED = 4
EXIT_INVARIANT = 5

TABLE_SCHEMA = {
    "type": "object",
    "required": ["p", "domain", "codomain"],
    "additionalProperties": False,
    "properties": {
        "p": {"type": "integer", "minimum": 2},
        "domain": {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/component"}},
        "codomain": {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/component"}},
        "values": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "values_file": {"type": "string"},
        "encoding": {"enum": ["le-u8", "le-u16", "le-u32"]},
    },
    "$defs": {
        "component": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "field": {
                    "type": "object",
                    "required": ["degree", "modulus"],
                    "additionalProperties": False,
                    "properties": {
                        "degree": {"type": "integer", "minimum": 1},
                        "modulus": {"type": "array", "items": {"type": "integer"}},
                    },
                },
                "vector": {"type": "integer", "minimum": 1},
            },
            "minProperties": 1,
            "maxProperties": 1,
        }
    },
}

REPORT_SCHEMA = {
    "type": "object",
    "required": ["command", "exit_code"],
    "properties": {
        "command": {"type": "string"},
        "exit_code": {"type": "integer"},
    },
}


# ---------------------------------------------------------------------------
# table (de)serialization
# ---------------------------------------------------------------------------


def _space_from_descriptor(p: int, comps) -> SpaceDescriptor:
    parts = []
    for comp in comps:
        if "field" in comp:
            fld = comp["field"]
            parts.append(FieldDescriptor(p, fld["degree"], tuple(fld["modulus"])))
        else:
            parts.append(VectorComponent(p, comp["vector"]))
    return SpaceDescriptor(p, parts)


def load_table(path: str) -> FunctionTable:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    import jsonschema

    try:
        jsonschema.validate(doc, TABLE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ParseError(f"{path}: {exc.message} (at {'/'.join(map(str, exc.path))})") from exc
    p = doc["p"]
    try:
        domain = _space_from_descriptor(p, doc["domain"])
        codomain = _space_from_descriptor(p, doc["codomain"])
    except DomainError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if "values" in doc:
        values = np.asarray(doc["values"], dtype=np.int64)
    elif "values_file" in doc:
        enc = doc.get("encoding")
        if enc is None:
            raise ParseError(f"{path}: values_file needs an encoding")
        dtype = {"le-u8": "<u1", "le-u16": "<u2", "le-u32": "<u4"}[enc]
        binpath = os.path.join(os.path.dirname(os.path.abspath(path)), doc["values_file"])
        try:
            values = np.fromfile(binpath, dtype=dtype)
        except OSError as exc:
            raise ParseError(f"{binpath}: {exc}") from exc
    else:
        raise ParseError(f"{path}: neither values nor values_file present")
    try:
        return FunctionTable(domain, codomain, values)
    except DomainError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def save_table(path: str, table: FunctionTable) -> None:
    doc: dict = {
        "p": table.p,
        "domain": table.domain.descriptor(),
        "codomain": table.codomain.descriptor(),
    }
    if table.domain.size > BINARY_THRESHOLD:
        maxv = table.codomain.size - 1
        enc, dtype = ("le-u8", "<u1") if maxv < 256 else (
            ("le-u16", "<u2") if maxv < 65536 else ("le-u32", "<u4")
        )
        binname = os.path.basename(path) + ".bin"
        table.values.astype(dtype).tofile(os.path.join(os.path.dirname(os.path.abspath(path)), binname))
        doc["values_file"] = binname
        doc["encoding"] = enc
    else:
        doc["values"] = [int(v) for v in table.values]
    with open(path, "w") as fh:
        json.dump(doc, fh, separators=(",", ":"), sort_keys=False)
        fh.write("\n")


# ---------------------------------------------------------------------------
# report writing
# ---------------------------------------------------------------------------


def _emit(report: dict, args) -> None:
    import jsonschema

    jsonschema.validate(report, REPORT_SCHEMA)
    text_format = getattr(args, "format", "json") == "text"
    out = getattr(args, "output", None)
    if text_format:
        lines = _textualize(report)
        payload = "\n".join(lines) + "\n"
    else:
        payload = json.dumps(report, indent=2, default=_json_default) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"unserializable {type(obj)}")


def _textualize(report: dict, prefix: str = "") -> list[str]:
    lines = []
    for k, v in report.items():
        if isinstance(v, dict):
            lines.append(f"{prefix}{k}:")
            lines.extend(_textualize(v, prefix + "  "))
        elif isinstance(v, list) and len(v) > 12:
            lines.append(f"{prefix}{k}: [{len(v)} items]")
        else:
            lines.append(f"{prefix}{k}: {v}")
    return lines


def _report_dir_render(kind: str, report: dict, args):
    rd = getattr(args, "report_dir", None)
    if not rd:
        return
    if kind == "analysis":
        reporting.render_analysis(report, rd)
    elif kind == "partition":
        reporting.render_partition(report, rd)
    elif kind == "search":
        reporting.render_search(report, rd)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _bent_report_dict(rep) -> dict:
    out = {
        "is_bent": bool(rep.is_bent),
        "regularity": rep.regularity,
    }
    if rep.epsilon is not None:
        out["epsilon"] = rep.epsilon
    if rep.failure_point is not None:
        out["failure_point"] = rep.failure_point
    if rep.diagnostic:
        out["diagnostic"] = rep.diagnostic
    return out


def cmd_analyze(args) -> int:
    table = load_table(args.input)
    report: dict = {
        "command": "analyze",
        "input": args.input,
        "p": table.p,
        "n": table.domain.dim,
        "m": table.codomain.dim,
        "exit_code": EXIT_OK,
    }
    comps = []
    from .transform import _full_transform_allowed

    full_ok = _full_transform_allowed(table.p, table.domain.size)
    if full_ok:
        if table.is_scalar:
            rep = analyze(table)
            comps.append({"component": 1, **_bent_report_dict(rep)})
            report["summary"] = _bent_report_dict(rep)
            if rep.weakly_regular:
                report["summary"]["weakly_regular_type"] = weakly_regular_type(table)
        else:
            vrep = analyze_vectorial(table, keep_duals=False)
            for c, rep in vrep.reports.items():
                comps.append({"component": c, **_bent_report_dict(rep)})
            report["summary"] = {
                "vectorial_bent": bool(vrep.vectorial_bent),
                "uniform_epsilon": vrep.uniform_epsilon,
            }
            if vrep.vectorial_bent and all(
                r.weakly_regular for r in vrep.reports.values()
            ):
                dual = is_vectorial_dual_bent(table)
                report["summary"]["vectorial_dual_bent"] = bool(dual.is_dual_bent)
    else:
        if not args.sample:
            raise RouteRefusedError(
                "full spectrum exceeds the desk budget; pass --sample N"
            )
        rng = np.random.default_rng(args.seed)
        n_comp = min(args.sample_components, table.codomain.size - 1)
        chosen = rng.choice(
            np.arange(1, table.codomain.size), size=n_comp, replace=False
        )
        scale_pow = table.domain.dim // 2
        scale = table.p**scale_pow
        report["mode"] = "sampled"
        all_eps = set()
        for c in sorted(int(c) for c in chosen):
            fc = component(table, c)
            pts = [int(a) for a in rng.integers(0, table.domain.size, args.sample)]
            values = walsh_points_batch(fc, pts)
            eps_set = set()
            ok = True
            for w in values:
                dec = w.decompose_signed_root(scale)
                if dec is None:
                    ok = False
                    break
                eps_set.add(dec[0])
            comps.append(
                {
                    "component": c,
                    "samples": len(pts),
                    "all_decomposed": bool(ok and len(eps_set) == 1),
                    "is_bent": bool(ok),
                    "epsilon": eps_set.pop() if len(eps_set) == 1 else None,
                }
            )
            if comps[-1]["epsilon"] is not None:
                all_eps.add(comps[-1]["epsilon"])
        report["summary"] = {
            "sampled_components": n_comp,
            "samples_per_component": args.sample,
            "all_samples_decomposed": all(c.get("all_decomposed") for c in comps),
            "uniform_epsilon": all_eps.pop() if len(all_eps) == 1 else None,
        }
    report["components"] = comps
    _emit(report, args)
    _report_dir_render("analysis", report, args)
    return EXIT_OK


def _partition_report_dict(rep) -> dict:
    out = {
        "route": rep.route,
        "depth": rep.depth,
        "is_bent_partition": rep.is_bent_partition,
        "class_wbp": rep.class_wbp,
        "epsilon": rep.epsilon,
        "depth_is_power_of_p": rep.depth_is_power_of_p,
    }
    if rep.dual_bent is not None:
        out["dual_bent"] = rep.dual_bent
        out["h_is_zero"] = rep.h_is_zero
    if rep.counterexample is not None:
        assign, witness = rep.counterexample
        out["counterexample"] = {"assignment": list(assign), "walsh_point": witness}
    if rep.status:
        out["status"] = rep.status
    return out


def cmd_verify_partition(args) -> int:
    table = load_table(args.input)
    part, dropped = preimage_partition(table)
    from .transform import _full_transform_allowed

    route = args.route
    if route == "auto":
        if (
            part.depth % table.p == 0
            and assignment_count(part.depth, table.p) <= args.budget_enum
            and _full_transform_allowed(table.p, table.domain.size)
        ):
            route = "definitional"
        elif _full_transform_allowed(table.p, table.domain.size):
            route = "eq29"
        else:
            raise RouteRefusedError(
                "no route fits this instance within the desk budget"
            )
    if route == "definitional":
        rep = verify_definitional(part, budget=args.budget_enum)
    elif route == "eq1":
        rep = verify_eq1(table)
    elif route == "eq29":
        rep = verify_eq29(table).report
    elif route == "thm1perm":
        rep = verify_thm1_permutation_route(table)
    elif route == "hadamard":
        from .hadamard import verify_hadamard_route

        rep = verify_hadamard_route(table)
    else:
        raise RouteRefusedError(f"unknown route {args.route!r}")
    report = {
        "command": "verify-partition",
        "input": args.input,
        "exit_code": EXIT_OK,
        "dropped_empty_cells": dropped,
        "cell_sizes": [len(c) for c in part.cells],
        **_partition_report_dict(rep),
    }
    # cross-check against the dense matrix route when affordable
    if args.route == "auto" and table.domain.size <= 4096 and rep.is_bent_partition:
        flag, used = triple_product_check(table)
        report["hadamard_cross_check"] = {"route": used, "agrees": bool(flag)}
        if not flag:
            raise InvariantViolationError("hadamard route disagrees with the verdict")
    _emit(report, args)
    _report_dir_render("partition", report, args)
    return EXIT_OK


def cmd_construct(args) -> int:
    if args.kind == "prop3":
        fld = FieldDescriptor(args.p, args.degree)
        pi = MonomialPermutation(fld, args.pi_exponent)
        if args.g_exponent is not None:
            g_vals = fld.trace_table(args.m)[fld.pow_table(args.g_exponent)]
        else:
            g_vals = np.zeros(fld.order, dtype=np.int64)
        table, cert = build_prop3(fld, args.m, pi, g_vals)
    elif args.kind == "prop4":
        family = [load_table(p) for p in args.r_tables]
        yfield = FieldDescriptor(args.p, args.yfield_degree)
        perm = None
        if args.permutation_file:
            ptab = load_table(args.permutation_file)
            perm = ptab.values.astype(np.int64)
        table, cert = build_prop4(
            family, yfield, args.m, alpha=args.alpha, beta=args.beta, P=perm
        )
    elif args.kind == "thm6":
        R = load_table(args.r)
        Rp = load_table(args.rprime)
        if args.k == "sum":
            K = sum_combiner(R.codomain)
        elif args.k.startswith("complete-perm:"):
            pfile = args.k.split(":", 1)[1]
            ptab = load_table(pfile)
            if len(R.codomain.components) != 1 or R.codomain.components[0].kind != "field":
                raise DomainError("complete-perm combiner needs a field codomain")
            K = complete_permutation_combiner(
                R.codomain.components[0].field, ptab.values.astype(np.int64)
            )
        else:
            K = load_table(args.k)
        table, cert = build_thm6(R, Rp, K)
    else:
        raise DomainError(f"unknown construction {args.kind!r}")
    save_table(args.table_output, table)
    report = {
        "command": "construct",
        "kind": args.kind,
        "exit_code": EXIT_OK,
        "table": args.table_output,
        "points": table.domain.size,
        "certificate": {
            "bent_partition": cert.bent_partition,
            "class_wbp": cert.class_wbp,
            "dual_bent": cert.dual_bent,
            "epsilon": cert.epsilon,
            "depth": cert.details.get("depth"),
        },
    }
    _emit(report, args)
    return EXIT_OK


def cmd_example(args) -> int:
    table, expected, cert = example_catalog(args.name)
    save_table(args.table_output, table)
    report = {
        "command": "example",
        "name": args.name,
        "exit_code": EXIT_OK,
        "table": args.table_output,
        "points": table.domain.size,
        "expected": expected,
        "certificate": {
            "bent_partition": cert.bent_partition,
            "class_wbp": cert.class_wbp,
            "dual_bent": cert.dual_bent,
            "epsilon": cert.epsilon,
        },
    }
    _emit(report, args)
    return EXIT_OK


def cmd_search(args) -> int:
    from .depth_search import search

    found, stats = search(
        args.n,
        args.K,
        budget=args.budget_nodes,
        use_size_filter=not args.no_size_filter,
    )
    report = {
        "command": "search",
        "n": args.n,
        "K": args.K,
        "exit_code": EXIT_OK,
        "found": len(found),
        "nodes": stats.nodes,
        "partitions": [[c.tolist() for c in p.cells] for p in found],
    }
    _emit(report, args)
    _report_dir_render("search", report, args)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------


def _load_modulus_file(path: str):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc
    for key, coeffs in doc.items():
        p_str, k_str = key.split(",")
        DEFAULT_MODULI[(int(p_str), int(k_str))] = tuple(int(c) for c in coeffs)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="bentparts",
        description="construct and verify bent partitions with exact arithmetic",
    )
    ap.add_argument("--threads", type=int, default=0,
                    help="worker hint; results are identical for any value")
    ap.add_argument("--modulus-file", help="JSON {'p,k': [c0..ck]} overrides")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--output", help="write the report here instead of stdout")
        p.add_argument("--format", choices=["json", "text"], default="json")
        p.add_argument("--report-dir", help="also render report.csv and report.png")

    pa = sub.add_parser("analyze", help="bent/regularity/dual analysis of a table")
    pa.add_argument("input")
    pa.add_argument("--sample", type=int, default=0,
                    help="Walsh samples per component when the full spectrum is over budget")
    pa.add_argument("--sample-components", type=int, default=8)
    pa.add_argument("--seed", type=int, default=0)
    common(pa)
    pa.set_defaults(func=cmd_analyze)

    pv = sub.add_parser("verify-partition", help="verify the preimage partition of a table")
    pv.add_argument("input")
    pv.add_argument("--route", default="auto",
                    choices=["auto", "definitional", "eq1", "eq29", "hadamard", "thm1perm"])
    pv.add_argument("--budget-enum", type=int, default=DEFAULT_ENUM_BUDGET)
    common(pv)
    pv.set_defaults(func=cmd_verify_partition)

    pc = sub.add_parser("construct", help="build a table from a construction recipe")
    pcs = pc.add_subparsers(dest="kind", required=True)
    p3 = pcs.add_parser("prop3")
    p3.add_argument("--p", type=int, required=True)
    p3.add_argument("--degree", type=int, required=True)
    p3.add_argument("--m", type=int, required=True)
    p3.add_argument("--pi-exponent", type=int, required=True)
    p3.add_argument("--g-exponent", type=int, default=None,
                    help="G(y) = Tr(y^e); omit for the zero map (refused)")
    p3.add_argument("table_output")
    common(p3)
    p3.set_defaults(func=cmd_construct, kind="prop3")
    p4 = pcs.add_parser("prop4")
    p4.add_argument("--p", type=int, required=True)
    p4.add_argument("--m", type=int, required=True)
    p4.add_argument("--yfield-degree", type=int, required=True)
    p4.add_argument("--alpha", type=int, required=True)
    p4.add_argument("--beta", type=int, required=True)
    p4.add_argument("--r-tables", nargs="+", required=True)
    p4.add_argument("--permutation-file")
    p4.add_argument("table_output")
    common(p4)
    p4.set_defaults(func=cmd_construct, kind="prop4")
    p6 = pcs.add_parser("thm6")
    p6.add_argument("--r", required=True)
    p6.add_argument("--rprime", required=True)
    p6.add_argument("--k", required=True,
                    help="'sum', 'complete-perm:PFILE', or a K table file")
    p6.add_argument("table_output")
    common(p6)
    p6.set_defaults(func=cmd_construct, kind="thm6")

    pe = sub.add_parser("example", help="build a pinned catalog example")
    pe.add_argument("name", choices=list(catalog_ids()))
    pe.add_argument("table_output")
    common(pe)
    pe.set_defaults(func=cmd_example)

    ps = sub.add_parser("search", help="exhaustive bent-partition search over V_n^(2)")
    ps.add_argument("n", type=int)
    ps.add_argument("K", type=int)
    ps.add_argument("--budget-nodes", type=int, default=50_000_000)
    ps.add_argument("--no-size-filter", action="store_true")
    common(ps)
    ps.set_defaults(func=cmd_search)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if args.modulus_file:
            _load_modulus_file(args.modulus_file)
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DomainError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except RouteRefusedError as exc:
        print(f"route unavailable: {exc}", file=sys.stderr)
        return EXIT_NO_ROUTE
    except ConstructionRefusedError as exc:
        print(f"construction refused: {exc.condition}: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (InvariantViolationError, AssertionError) as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except BentPartsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    raise SystemExit(main())
