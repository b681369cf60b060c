"""Command-line front end.

Every command reads one JSON document (a module, or for verify-main a
corpus) and writes one JSON document. Exit codes: 0 success, 1 broken input
or I/O, 2 mathematically rejected input, 3 verification failures.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .algebra.series import default_denominator_cap
from .corpus import shipped_corpus
from .errors import KisinRamError
from .io import (
    MIXED_KEYS,
    SchemaError,
    dumps,
    field_json,
    module_json,
    parse_mixed,
    parse_module,
    rational,
    series_json,
)
from .kisin import base_change, dual
from .mixedchar import (
    INCONCLUSIVE,
    breuil_data,
    compare_mod_p,
    mixed_lower_breaks_explained,
    prepare_for_mixed,
)
from .ramification import (
    FAIL,
    PASS,
    UNRESOLVED,
    duality_report,
    lower_breaks,
    pairing_gram,
    upper_filtration,
)
from .solver import solve_triangular

COMMANDS = (
    "snf",
    "eheight",
    "dual",
    "solve",
    "lower-breaks",
    "upper-jumps",
    "pairing",
    "duality-report",
    "basechange",
    "breuil",
    "compare-mixed",
    "verify-main",
)

EXIT_OK, EXIT_INPUT, EXIT_REJECTED, EXIT_FAILED = 0, 1, 2, 3


def _matrix_json(A):
    return [[x.to_json() for x in row] for row in A]


def _snf_json(snf):
    return {
        "exps": list(snf.exps),
        "P": _matrix_json(snf.P),
        "Q": _matrix_json(snf.Q),
        "stride": snf.stride,
        "prec": rational(snf.prec),
    }


def _solutions_json(sols):
    return {
        "field": field_json(sols.field),
        "prec": rational(sols.prec),
        "count": len(sols),
        "basis": [[series_json(x) for x in vec] for vec in sols.basis],
    }


def _report_json(R):
    return {
        "lower": R["lower"].to_json(),
        "dual_lower": R["dual_lower"].to_json(),
        "upper": R["upper"].to_json(),
        "dual_upper": R["dual_upper"].to_json(),
        "gram": R["gram"].to_json(),
        "checks": R["checks"],
        "solutions_prec": rational(R["solutions_prec"]),
    }


def _mixed_json(M, E, N, cap):
    M2, E2, scale = prepare_for_mixed(M, E)
    C = compare_mod_p(M2, E2, N)
    r, G, _ = breuil_data(M2, E2)
    mixed, reason = mixed_lower_breaks_explained(C["presentation"])
    equal = lower_breaks(solve_triangular(M2, cap=cap))
    if mixed == INCONCLUSIVE:
        breaks_equal = INCONCLUSIVE
    else:
        breaks_equal = mixed == equal
    return {
        "base_change": scale,
        "E": E2.to_json(),
        "breuil": {"r": list(r), "G": _matrix_json(G)},
        "mixed_equations": C["presentation"].to_json(),
        "entries": C["entries"],
        "mod_p_match": C["all_equal"],
        "mixed_breaks": mixed if mixed == INCONCLUSIVE else mixed.to_json(),
        "mixed_reason": reason,
        "equal_char_breaks": equal.to_json(),
        "breaks_equal": breaks_equal,
    }


def run_command(command, doc, cfg):
    """Dispatch one command on a parsed JSON document; returns the result block."""
    cap = cfg["denominator_cap"]
    extra = MIXED_KEYS if command == "compare-mixed" else ()
    M = parse_module(doc, prec=cfg["prec"], modulus=cfg["field_modulus"], extra_keys=extra)
    if command == "snf":
        return _snf_json(M.snf)
    if command == "eheight":
        return {"height": M.height(), "er": M.er, "admissible": True}
    if command == "dual":
        return module_json(dual(M))
    if command == "solve":
        return _solutions_json(solve_triangular(M, cap=cap))
    if command == "lower-breaks":
        return lower_breaks(solve_triangular(M, cap=cap)).to_json()
    if command == "upper-jumps":
        return upper_filtration(M, cap=cap).to_json()
    if command == "pairing":
        sols = solve_triangular(M, cap=cap)
        dsols = solve_triangular(dual(M), cap=cap)
        G = pairing_gram(M, sols, dsols)
        return {"gram": G.to_json(), "tbar": series_json(G.tbar_used), "invertible": G.invertibility()}
    if command == "duality-report":
        return _report_json(duality_report(M, cap=cap))
    if command == "basechange":
        n = cfg["degree"] or M.p
        return module_json(base_change(M, n))
    if command == "breuil":
        r, G, snf = breuil_data(M)
        return {"r": list(r), "G": _matrix_json(G), "stride": snf.stride}
    if command == "compare-mixed":
        E, N = parse_mixed(doc)
        return _mixed_json(M, E, N, cap)
    raise SchemaError(f"unknown command {command!r}")


# -- verify-main ---------------------------------------------------------------


def verify_instance(inst, cfg):
    """duality report, mod p comparison and break equality for one module."""
    name = inst.get("name", "") if isinstance(inst, dict) else ""
    out = {"name": name}
    try:
        M = parse_module(inst, prec=cfg["prec"], modulus=cfg["field_modulus"], extra_keys=MIXED_KEYS)
        checks = dict(duality_report(M, cap=cfg["denominator_cap"])["checks"])
        if M.r == 1 and M.field.m == 1:
            E, N = parse_mixed(inst)
            mixed = _mixed_json(M, E, N, cfg["denominator_cap"])
            checks["mod_p_match"] = PASS if mixed["mod_p_match"] else FAIL
            be = mixed["breaks_equal"]
            checks["breaks_equal"] = INCONCLUSIVE if be == INCONCLUSIVE else (PASS if be else FAIL)
            out["mixed_reason"] = mixed["mixed_reason"]
            out["base_change"] = mixed["base_change"]
    except SchemaError as exc:
        out.update(status="error", error=exc.as_dict())
        return out
    except KisinRamError as exc:
        out.update(status="error", error=exc.as_dict())
        return out
    out["checks"] = checks
    vals = set(checks.values())
    if FAIL in vals:
        out["status"] = "fail"
    elif UNRESOLVED in vals:
        out["status"] = "unresolved"
    else:
        out["status"] = "pass"
    return out


def verify_main(corpus, cfg):
    if not corpus:
        raise SchemaError("corpus contains no instances", code="empty-corpus")
    with ThreadPoolExecutor(max_workers=cfg["threads"]) as pool:
        results = list(pool.map(lambda inst: verify_instance(inst, cfg), corpus))
    counts = {}
    for res in results:
        counts[res["status"]] = counts.get(res["status"], 0) + 1
    mixed = [r for r in results if "breaks_equal" in r.get("checks", {})]
    conclusive = sum(1 for r in mixed if r["checks"]["breaks_equal"] != INCONCLUSIVE)
    summary = {
        "instances": len(results),
        "counts": counts,
        "mixed_instances": len(mixed),
        "mixed_conclusive": conclusive,
        "mixed_conclusive_ratio": rational(Fraction(conclusive, len(mixed))) if mixed else None,
    }
    ok = counts.get("fail", 0) == 0 and counts.get("error", 0) == 0
    return {"summary": summary, "results": results}, ok


# -- entry point ---------------------------------------------------------------


def build_parser():
    ap = argparse.ArgumentParser(prog="kisinram", description="Ramification of finite flat group schemes via Kisin modules.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", help="input JSON file (verify-main defaults to the shipped corpus)")
    ap.add_argument("--output", help="write the JSON result here instead of stdout")
    ap.add_argument("--prec", type=int, help="override the working u-adic precision")
    ap.add_argument("--denom-cap", type=int, help="exponent denominator cap for the solver")
    ap.add_argument("--modulus", help="field modulus override, comma separated low-first coefficients")
    ap.add_argument("--degree", type=int, help="base change degree (basechange; default p)")
    fmt = ap.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="pretty", action="store_false", help="compact JSON (default)")
    fmt.add_argument("--pretty", dest="pretty", action="store_true", help="indented JSON")
    ap.set_defaults(pretty=False)
    return ap


def _threads():
    raw = os.environ.get("KISINRAM_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise SchemaError(f"KISINRAM_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise SchemaError("KISINRAM_THREADS must be positive")
    return n


def _emit(doc, args):
    text = dumps(doc, pretty=args.pretty)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        modulus = None
        if args.modulus:
            modulus = [int(c) for c in args.modulus.split(",")]
        cfg = {
            "command": args.command,
            "prec": args.prec,
            "denominator_cap": args.denom_cap,
            "field_modulus": modulus,
            "degree": args.degree,
            "threads": _threads(),
        }
        if args.input:
            with open(args.input) as fh:
                doc = json.load(fh)
        elif args.command == "verify-main":
            doc = shipped_corpus()
        else:
            doc = json.load(sys.stdin)
        effective = dict(cfg)
        effective["input"] = args.input or ("<shipped corpus>" if args.command == "verify-main" else "<stdin>")
        if effective["denominator_cap"] is None:
            p = doc.get("p") if isinstance(doc, dict) else None
            effective["denominator_cap"] = default_denominator_cap(p) if isinstance(p, int) else "default"
        if args.command == "verify-main":
            corpus = doc.get("instances") if isinstance(doc, dict) else doc
            if not isinstance(corpus, list):
                raise SchemaError("corpus must be a list of modules or {\"instances\": [...]}")
            result, ok = verify_main(corpus, cfg)
            _emit({"effective_config": effective, "result": result}, args)
            return EXIT_OK if ok else EXIT_FAILED
        result = run_command(args.command, doc, cfg)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        if isinstance(exc, KisinRamError):
            _emit({"error": exc.as_dict()}, args)
            return EXIT_REJECTED
        _emit({"error": {"code": "io-error", "message": str(exc), "context": {}}}, args)
        return EXIT_INPUT
    except SchemaError as exc:
        _emit({"error": exc.as_dict()}, args)
        return EXIT_INPUT
    _emit({"effective_config": effective, "result": result}, args)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
