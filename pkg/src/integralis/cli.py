"""Command-line interface.

Every subcommand takes a system (a path to a system file or the name of a
bundled fixture), prints a short human-readable report, or with ``--json`` a
deterministic JSON document carrying ``schemaVersion`` 1.

Exit codes: 0 success (a search that finds nothing still succeeds), 1 usage
error (bad arguments, unreadable system file, malformed expression), 2
internal error or a request outside the supported function class.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .darboux import darboux_search
from .expr import ExprError, Expression, parse
from .painleve import painleve_identities_check
from .search import SCAN, SearchRequest, find
from .sysfile import FIXTURES, SystemFileError, SystemModel, fixture_path, load
from .system import (
    PdeSystem,
    SystemError_,
    TdSystem,
    closure_and_defect,
    divergence,
    integral_basis_dimension,
    is_complete,
    is_frobenius_solvable,
    is_jacobian,
    operators_of,
    autonomous_fi_count,
)
from .verify import (
    Certificate,
    FlowCheckRefused,
    certify_first_integral,
    certify_last_multiplier,
    certify_partial_integral,
    flow_check,
    functional_independence,
)

SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def load_system(source: str) -> SystemModel:
    """A path to a system file, or the name of a bundled fixture."""
    p = Path(source)
    if p.suffix == ".toml" or p.exists():
        if not p.exists():
            raise UsageError(f"system file not found: {source}")
        try:
            return load(p)
        except SystemFileError as exc:
            raise UsageError(str(exc)) from exc
    if source in FIXTURES:
        return load(fixture_path(source))
    raise UsageError(f"unknown system {source!r}; give a file path or one of: {', '.join(FIXTURES)}")


def _parse_expr(text: str, model: SystemModel | None) -> Expression:
    symbols = model.system.space.all if model is not None else None
    try:
        return parse(text, symbols)
    except ExprError as exc:
        raise UsageError(f"cannot parse expression {text!r}: {exc}") from exc


def _q(text: str, what: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"{what}: {text!r} is not a rational number") from exc


def parse_vars(text: str) -> list[str]:
    """Comma separated names; ``x1..x6`` expands to ``x1, x2, ..., x6``."""
    out: list[str] = []
    for item in (s.strip() for s in text.split(",")):
        if not item:
            continue
        m = re.fullmatch(r"([A-Za-z_]+)(\d+)\.\.([A-Za-z_]+)?(\d+)", item)
        if m:
            stem, lo, stem2, hi = m.group(1), int(m.group(2)), m.group(3), int(m.group(4))
            if stem2 not in (None, stem) or hi < lo:
                raise UsageError(f"bad variable range {item!r}")
            out.extend(f"{stem}{i}" for i in range(lo, hi + 1))
        else:
            out.append(item)
    return out


def _certificate(c: Certificate) -> dict:
    doc = {
        "kind": c.kind,
        "candidate": c.candidate.render(),
        "verdict": c.verdict,
        "residuals": [r.render() for r in c.residuals],
        "cylinderProfile": {"s": c.cylinder_profile[0], "k": c.cylinder_profile[1]},
    }
    if c.cofactors is not None:
        doc["cofactors"] = [e.render() for e in c.cofactors]
    if c.manifold is not None:
        doc["manifold"] = c.manifold.render()
    if c.notes:
        doc["notes"] = list(c.notes)
    return doc


def _td(model: SystemModel, command: str) -> TdSystem:
    if not isinstance(model.system, TdSystem):
        raise SystemError_(f"{command} applies to total differential systems")
    return model.system


# ---------------------------------------------------------------------------
# subcommands: each returns (result dict, text lines)
# ---------------------------------------------------------------------------


def cmd_frobenius(args, model):
    rep = is_frobenius_solvable(_td(model, "frobenius"))
    brackets = {f"[L{j + 1},L{z + 1}]": b.render() for (j, z), b in sorted(rep.brackets.items())}
    res = {
        "solvable": rep.solvable,
        "bracketSolvable": rep.bracket_solvable,
        "brackets": brackets,
        "nonzeroResiduals": {
            f"i={i + 1},j={j + 1},z={z + 1}": r.render() for (i, j, z), r in sorted(rep.residuals.items()) if not r.is_zero()
        },
    }
    lines = [f"completely solvable: {str(rep.solvable).lower()}"]
    lines += [f"  {k} = {v}" for k, v in brackets.items() if v != "0"]
    return res, lines


def cmd_complete(args, model):
    rep = is_complete(model.system)
    brackets = {f"[L{j + 1},L{z + 1}]": b.render() for (j, z), b in sorted(rep.brackets.items())}
    res = {"complete": rep.complete, "brackets": brackets}
    return res, [f"complete: {str(rep.complete).lower()}"] + [f"  {k} = {v}" for k, v in brackets.items()]


def cmd_jacobian(args, model):
    ok = is_jacobian(model.system)
    return {"jacobian": ok}, [f"jacobian: {str(ok).lower()}"]


def cmd_defect(args, model):
    rep = closure_and_defect(model.system)
    res = {
        "defect": rep.defect,
        "closed": rep.closed,
        "rank": rep.rank,
        "addedOperators": [L.render() for L in rep.added_operators],
    }
    return res, [f"defect: {rep.defect}"] + [f"  added {L}" for L in res["addedOperators"]]


def cmd_dim_basis(args, model):
    d = integral_basis_dimension(model.system)
    return {"dimension": d}, [f"integral basis dimension: {d}"]


def cmd_fi_count(args, model):
    c = autonomous_fi_count(_td(model, "fi-count"), args.s)
    return {"s": args.s, "count": c}, [f"{args.s}-nonautonomous first integrals: {c}"]


def _int_or_scan(text: str | None, name: str):
    if text is None or text == SCAN:
        return SCAN
    try:
        return int(text)
    except ValueError as exc:
        raise UsageError(f"--{name} must be an integer or 'scan'") from exc


def cmd_find(args, model):
    S = model.system
    if args.scan:
        s, k = SCAN, SCAN
    else:
        s = _int_or_scan(args.s, "s") if args.s is not None else 0
        k = _int_or_scan(args.k, "k")
    if isinstance(S, PdeSystem):
        s = 0
    try:
        req = SearchRequest(S, args.target, s=s, k=k, degree_bound=args.deg)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = find(req)
    res = {
        "target": args.target,
        "s": s,
        "k": k,
        "stage": out.stage,
        "found": bool(out.witnesses),
        "witnesses": [_certificate(c) for c in out.witnesses],
        "independenceRank": out.independence_rank,
        "cells": [{"s": a, "k": b, "stage": st} for a, b, st in out.cells],
        "diagnostics": out.diagnostics,
    }
    if args.target == "pi" and not req.scanning:
        wr = out.diagnostics.get("wronskian", [])
        res["wronskianIdenticallyZero"] = all(r["identically_zero"] for r in wr)
    lines = [f"stage: {out.stage}", f"witnesses: {len(out.witnesses)} (independence rank {out.independence_rank})"]
    for c in out.witnesses:
        line = f"  {c.candidate.render()}"
        if c.cofactors is not None:
            line += "   cofactors: " + ", ".join(e.render() for e in c.cofactors)
        lines.append(line)
    if not out.witnesses:
        lines.append("  not found")
    return res, lines


_CERTIFY = {"fi": certify_first_integral, "lm": certify_last_multiplier, "pi": certify_partial_integral}


def cmd_verify(args, model):
    e = _parse_expr(args.expr, model)
    if args.target == "lm" and e.is_zero():
        raise UsageError("a last multiplier must be nonzero")
    cert = _CERTIFY[args.target](model.system, e)
    res = {"target": args.target, "certificate": _certificate(cert)}
    if args.target == "lm":
        res["divergences"] = [divergence(L).render() for L in operators_of(model.system)]
    lines = [f"{args.target} {e.render()}: {str(cert.verdict).lower()}"]
    if cert.cofactors is not None:
        lines.append("  cofactors: " + ", ".join(c.render() for c in cert.cofactors))
    if not cert.verdict:
        lines.append("  residuals: " + ", ".join(r.render() for r in cert.residuals))
    return res, lines


def cmd_independence(args, model):
    funcs = [_parse_expr(t, model) for t in args.expr]
    variables = model.system.space.all if model is not None else None
    rank, cert = functional_independence(funcs, variables)
    res = {
        "functions": [f.render() for f in funcs],
        "rank": rank,
        "minor": {"rows": list(cert.rows), "cols": list(cert.cols), "determinant": cert.minor.render()},
    }
    return res, [f"independence rank: {rank}", f"  nonzero minor: {cert.minor.render()}"]


def _parse_point(text: str) -> dict[str, Fraction]:
    out = {}
    for item in (s.strip() for s in text.split(",")):
        if not item:
            continue
        if "=" not in item:
            raise UsageError(f"--start entries look like name=value, got {item!r}")
        name, val = item.split("=", 1)
        out[name.strip()] = _q(val, "--start")
    return out


def cmd_flow_check(args, model):
    S = _td(model, "flow-check")
    F = _parse_expr(args.expr, model)
    direction = [_q(v, "--dir") for v in args.dir.split(",")]
    start = _parse_point(args.start)
    missing = [v for v in S.space.all if v not in start]
    if missing:
        raise UsageError(f"--start is missing values for {', '.join(missing)}")
    if len(direction) != S.m:
        raise UsageError(f"--dir needs {S.m} components")
    try:
        rep = flow_check(S, F, direction, start, steps=args.steps, h=args.h, tolerance=args.tolerance)
    except FlowCheckRefused as exc:
        raise SystemError_(str(exc)) from exc
    res = {
        "expression": F.render(),
        "maxDeviation": float(f"{rep.max_deviation:.6e}"),
        "steps": rep.steps,
        "stepSize": str(rep.step_size),
        "truncated": rep.truncated,
        "tolerance": rep.tolerance,
        "passed": rep.passed,
    }
    lines = [f"max deviation {rep.max_deviation:.3e} over {rep.steps} steps: {'pass' if rep.passed else 'FAIL'}"]
    return res, lines


def cmd_darboux(args, model):
    allowed = parse_vars(args.vars) if args.vars else None
    r = darboux_search(model.system, w_degree=args.deg, allowed_vars=allowed, seed=args.seed)
    res = {
        "degree": r.w_degree,
        "variables": list(r.allowed_vars),
        "found": r.found,
        "witnesses": [_certificate(c) for c in r.witnesses],
        "partial": r.partial,
        "components": r.components,
        "branches": r.branches,
        "notes": r.notes,
    }
    lines = [f"degree <= {r.w_degree} in {len(r.allowed_vars)} variables: {len(r.witnesses)} witness(es)"]
    lines += [f"  {c.candidate.render()}" for c in r.witnesses]
    lines.append("search was exhaustive" if not r.partial else "search was partial (heuristic branches used)")
    return res, lines


def cmd_painleve_check(args, model):
    rep = painleve_identities_check(degree_bound=args.deg)
    res = {
        "passed": rep.passed,
        "degreeBound": rep.degree_bound,
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in rep.checks],
    }
    lines = [f"[{'ok' if c.passed else 'FAIL'}] {c.name}" for c in rep.checks]
    lines.append(f"painleve identities: {'all passed' if rep.passed else 'FAILED'}")
    return res, lines


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized stages")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")

    def with_system(p, optional=False):
        if optional:
            p.add_argument("system", nargs="?", help="system file or fixture name")
        else:
            p.add_argument("system", help="system file or fixture name")
        return p

    parser = _Parser(prog="integralis", description="Exact first-integral, last-multiplier and partial-integral analysis.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name, func, help_ in [
        ("frobenius", cmd_frobenius, "complete solvability of a total differential system"),
        ("complete", cmd_complete, "is the system complete"),
        ("jacobian", cmd_jacobian, "do all brackets vanish"),
        ("defect", cmd_defect, "bracket-closure defect"),
        ("dim-basis", cmd_dim_basis, "dimension of an integral basis"),
    ]:
        with_system(sub.add_parser(name, parents=[common], help=help_)).set_defaults(func=func)

    p = with_system(sub.add_parser("fi-count", parents=[common], help="number of s-nonautonomous first integrals"))
    p.add_argument("--s", type=int, required=True)
    p.set_defaults(func=cmd_fi_count)

    p = sub.add_parser("find", parents=[common], help="search for first integrals, last multipliers, partial integrals")
    p.add_argument("target", choices=("fi", "lm", "pi"))
    with_system(p)
    p.add_argument("--s", default=None, help="integer or 'scan' (default 0)")
    p.add_argument("--k", default=None, help="integer or 'scan' (default scan)")
    p.add_argument("--scan", action="store_true", help="scan every (s, k) cell")
    p.add_argument("--deg", type=int, default=1, help="combiner degree bound")
    p.set_defaults(func=cmd_find)

    p = sub.add_parser("verify", parents=[common], help="certify a candidate exactly")
    p.add_argument("target", choices=("fi", "lm", "pi"))
    with_system(p)
    p.add_argument("--expr", required=True)
    p.set_defaults(func=cmd_verify)

    p = with_system(sub.add_parser("independence", parents=[common], help="functional independence rank"), optional=True)
    p.add_argument("--expr", nargs="+", required=True)
    p.set_defaults(func=cmd_independence)

    p = with_system(sub.add_parser("flow-check", parents=[common], help="RK4 drift of a first integral along a line"))
    p.add_argument("--expr", required=True)
    p.add_argument("--dir", required=True, help="direction in t-space, comma separated")
    p.add_argument("--start", required=True, help="name=value pairs for every variable")
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--h", type=float, default=1e-3)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.set_defaults(func=cmd_flow_check)

    p = with_system(sub.add_parser("darboux", parents=[common], help="polynomial partial integrals up to a degree"))
    p.add_argument("--deg", type=int, default=2)
    p.add_argument("--vars", default=None, help="allowed variables, e.g. x1..x6,y1..y6")
    p.set_defaults(func=cmd_darboux)

    p = sub.add_parser("painleve-check", parents=[common], help="mechanical checks for the Painleve system")
    p.add_argument("--deg", type=int, default=3, help="degree bound for h")
    p.set_defaults(func=cmd_painleve_check, system=None)
    return parser


def run(argv: Sequence[str] | None = None, stdout=None) -> tuple[int, dict]:
    """Execute one command; returns the exit code and the report document."""
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = sys.stdout if stdout is None else stdout
    doc: dict = {"schemaVersion": SCHEMA_VERSION, "command": argv}
    want_json = "--json" in argv
    try:
        args = build_parser().parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError("a subcommand is required")
        model = load_system(args.system) if args.system else None
        if model is not None:
            doc["system"] = {"name": model.name, "kind": model.kind, "n": model.system.n, "m": model.system.m}
        start = time.perf_counter()
        result, lines = args.func(args, model)
        doc["status"] = "ok"
        doc["result"] = result
        if args.timings:
            doc["timings"] = {"seconds": round(time.perf_counter() - start, 3)}
        code = EXIT_OK
    except UsageError as exc:
        doc.update(status="usage-error", error=str(exc))
        lines = [f"usage error: {exc}"]
        code = EXIT_USAGE
    except (SystemError_, ExprError) as exc:
        doc.update(status="unsupported", error=str(exc))
        lines = [f"error: {exc}"]
        code = EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - reported as an internal error
        doc.update(status="internal-error", error=f"{type(exc).__name__}: {exc}")
        lines = [f"internal error: {type(exc).__name__}: {exc}"]
        code = EXIT_INTERNAL
    if want_json:
        stdout.write(json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n")
    else:
        stream = stdout if code == EXIT_OK else sys.stderr
        stream.write("\n".join(lines) + "\n")
    return code, doc


def main(argv: Sequence[str] | None = None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
