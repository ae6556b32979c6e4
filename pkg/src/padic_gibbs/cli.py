"""Command-line workbench.

Exit codes: 0 success, 1 named computational error, 2 usage error,
3 internal inconsistency between constructive and congruence counts.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .errors import InternalInconsistency, PadicGibbsError, VerificationFailed
from .gibbs_model import ModelParams, check_consistency, verify_z_recursion
from .padic_core import DEFAULT_PRECISION, from_rational, sqrt, sqrt_exists
from .residue_classifier import is_probable_prime
from .solvers import (
    classify,
    growth_profile,
    periodic_analysis,
    table1,
    ti_solutions,
)

TOOL = "padic-gibbs"
EXIT_OK, EXIT_COMPUTE, EXIT_USAGE, EXIT_INCONSISTENT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="prime")
    common.add_argument("--j", type=int, help="coupling J = J1 = J2")
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION)
    common.add_argument("--depth", type=int, default=2)
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--out", type=Path, default=None, help="write the report here")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL, description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()
    sub.add_parser("classify", parents=[common], help="existence and boundedness for (p, J)")
    sub.add_parser("verify", parents=[common],
                   help="consistency and Z-recursion checks for every constructed field")
    t = sub.add_parser("table1", parents=[common], help="sqrt(D(theta)) table for J < 0")
    t.add_argument("--primes", required=True, help="comma-separated primes")
    g = sub.add_parser("growth", parents=[common], help="norm growth of finite-level measures")
    g.add_argument("--field", choices=("h0", "h1", "h2", "per1", "per2"), default="h0")
    g.add_argument("--max-depth", type=int, default=3)
    s = sub.add_parser("sqrt", parents=[common], help="p-adic square root of num/den")
    s.add_argument("--num", type=int, required=True)
    s.add_argument("--den", type=int, default=1)
    sub.add_parser("info", parents=[common], help="version and model constants")
    return parser


def _require(args, *names: str) -> None:
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name} is required for {args.command}")
    if args.p is not None and not is_probable_prime(args.p):
        raise UsageError(f"--p {args.p} is not prime")
    if "j" in names and args.j == 0:
        raise UsageError("--j must be nonzero")
    if args.precision < 8:
        raise UsageError("--precision must be at least 8")


# -- subcommands -----------------------------------------------------------------
# each returns (results payload, discrepancy notes, text rendering, csv rows or None)

def _cmd_classify(args):
    _require(args, "p", "j")
    report = classify(args.p, args.j, args.precision)
    data = report.to_dict()
    lines = [
        f"p = {args.p}, J = {args.j}, precision = {args.precision}",
        f"translation-invariant fields: {report.ti_count} "
        f"(congruence verdict {report.ti_verdict.count}, {report.ti_verdict.reason.value})",
    ]
    for entry in report.boundedness:
        lines.append(f"  {entry.label}: {entry.theorem}  max log_p|mu| by depth "
                     f"{entry.profile.max_log_norms}")
    lines.append(f"2-periodic fields: {report.periodic_count} "
                 f"(congruence verdict {report.periodic_verdict.count}, "
                 f"{report.periodic_verdict.reason.value})")
    return data, report.discrepancies, lines, None


def _fields(params: ModelParams):
    out = [s.field for s in ti_solutions(params)]
    periodic, _ = periodic_analysis(params)
    if periodic is not None:
        out.extend(periodic.fields)
    return out


def _cmd_verify(args):
    _require(args, "p", "j")
    if not 1 <= args.depth <= 3:
        raise UsageError("--depth must lie in 1..3")
    params = ModelParams(args.p, args.j, precision=args.precision)
    results, lines, ok = [], [], True
    for f in _fields(params):
        consistency = [check_consistency(n, f, params) for n in range(1, args.depth + 1)]
        recursion = {n: verify_z_recursion(n, f, params)
                     for n in range(1, min(args.depth, 2) + 1)}
        passed = all(c.passed for c in consistency) and all(recursion.values())
        ok &= passed
        results.append({
            "field": f.label,
            "consistency": [c.to_dict() for c in consistency],
            "z_recursion": {str(n): v for n, v in recursion.items()},
            "passed": passed,
        })
        lines.append(f"{f.label}: consistency "
                     f"{['pass' if c.passed else 'FAIL' for c in consistency]}, "
                     f"Z recursion {['pass' if v else 'FAIL' for v in recursion.values()]}")
    payload = {"p": args.p, "J": args.j, "depth": args.depth, "fields": results,
               "passed": ok}
    if not ok:
        raise VerificationFailed(json.dumps(payload, sort_keys=True))
    return payload, [], lines, None


def _cmd_table1(args):
    _require(args, "j")
    if args.j >= 0:
        raise UsageError("table1 needs --j < 0")
    try:
        primes = [int(x) for x in args.primes.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse --primes {args.primes!r}") from None
    bad = [q for q in primes if not is_probable_prime(q)]
    if bad or not primes:
        raise UsageError(f"not prime: {bad}" if bad else "--primes is empty")
    rows = [r.to_dict() for r in table1(primes, args.j, args.precision)]
    notes = [{"quantity": f"sqrt(D(theta)) exists in Q_{r['prime']}",
              "published": r["published_value"], "computed": r["computed_value"],
              "agree": False}
             for r in rows if r["agree"] is False]
    lines = ["prime  published  computed  agree"]
    lines += [f"{r['prime']:>5}  {r['published_value'] or '':>9}  {r['computed_value']:>8}  "
              f"{'' if r['agree'] is None else r['agree']}" for r in rows]
    csv_rows = [{"prime": r["prime"], "published_value": r["published_value"] or "",
                 "computed_value": r["computed_value"],
                 "agree_flag": "" if r["agree"] is None else str(r["agree"]).lower()}
                for r in rows]
    return {"J": args.j, "rows": rows}, notes, lines, csv_rows


def _cmd_growth(args):
    _require(args, "p", "j")
    if not 1 <= args.max_depth <= 3:
        raise UsageError("--max-depth must lie in 1..3")
    params = ModelParams(args.p, args.j, precision=args.precision)
    by_label = {f.label: f for f in _fields(params)}
    if args.field not in by_label:
        raise UsageError(f"field {args.field} does not exist for p = {args.p}, J = {args.j}")
    profile = growth_profile(params, by_label[args.field], args.max_depth)
    notes = []
    if args.p == 3 and args.j > 0 and args.field == "h0":
        pub = [2**n - 2 for n in profile.depths]
        notes.append({"quantity": "log_p |mu^(n)(sigma*)| for h0", "published": pub,
                      "computed": profile.sigma_star_log_norms,
                      "agree": pub == profile.sigma_star_log_norms})
    lines = [f"{args.field} at p = {args.p}, J = {args.j}: {profile.verdict}",
             "depth  log|mu(sigma*)|  max log|mu|  log|Z_n|  log|A_n|"]
    for row in profile.rows():
        lines.append(f"{row['depth']:>5}  {row['sigma_star_log_norm']:>15}  "
                     f"{row['max_log_norm']:>11}  {row['partition_log_norm']:>8}  "
                     f"{row['level_factor_log_norm']}")
    return profile.to_dict(), notes, lines, profile.rows()


def _cmd_sqrt(args):
    _require(args, "p")
    if args.den == 0:
        raise UsageError("--den must be nonzero")
    a = from_rational(args.num, args.den, args.p, args.precision)
    r = sqrt(a)
    payload = {"input": a.to_dict(), "exists": sqrt_exists(a), "root": r.to_dict()}
    lines = [f"sqrt({Fraction(args.num, args.den)}) in Q_{args.p}: "
             f"{args.p}^{r.valuation} * digits {r.digits} (mod {args.p}^{r.abs_precision})"]
    return payload, [], lines, None


def _cmd_info(args):
    payload: dict[str, Any] = {
        "tool": TOOL,
        "version": __version__,
        "default_precision": DEFAULT_PRECISION,
        "guard_digits": 4,
        "subcommands": ["classify", "verify", "table1", "growth", "sqrt", "info"],
    }
    lines = [f"{TOOL} {__version__}"]
    if args.p is not None and args.j is not None:
        _require(args, "p", "j")
        params = ModelParams(args.p, args.j, precision=args.precision)
        payload["model"] = {"p": args.p, "J": args.j, "theta": params.theta.to_dict(),
                            "work_precision": params.work_precision,
                            "guard": params.guard}
        lines.append(f"theta = {args.p}^{2 * args.j}, working precision "
                     f"{params.work_precision}, guard {params.guard}")
    return payload, [], lines, None


COMMANDS = {
    "classify": _cmd_classify,
    "verify": _cmd_verify,
    "table1": _cmd_table1,
    "growth": _cmd_growth,
    "sqrt": _cmd_sqrt,
    "info": _cmd_info,
}


def _input_echo(args) -> dict:
    return {k: (str(v) if isinstance(v, Path) else v)
            for k, v in sorted(vars(args).items()) if v is not None}


def _render(args, envelope: dict, lines: list[str], csv_rows) -> str:
    if args.format == "json":
        return json.dumps(envelope, indent=2, sort_keys=True) + "\n"
    if args.format == "csv" and csv_rows is not None:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(csv_rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(csv_rows)
        return buf.getvalue()
    if envelope["status"] == "error":
        err = envelope["error"]
        return f"error: {err['name']}: {err['message']}\n"
    out = list(lines)
    for note in envelope["discrepancies"]:
        if not note.get("agree", True):
            out.append(f"discrepancy: {note['quantity']}: published {note['published']}, "
                       f"computed {note['computed']}")
    return "\n".join(out) + "\n"


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format == "csv" and args.command not in ("table1", "growth"):
        parser.error("--format csv is available for table1 and growth only")
    envelope = {"tool": TOOL, "version": __version__, "command": args.command,
                "input": _input_echo(args), "results": None, "discrepancies": [],
                "status": "ok", "exit_status": EXIT_OK}
    lines, csv_rows = [], None
    try:
        payload, notes, lines, csv_rows = COMMANDS[args.command](args)
        envelope.update(results=payload, discrepancies=notes)
    except UsageError as exc:
        parser.error(str(exc))
    except PadicGibbsError as exc:
        code = EXIT_INCONSISTENT if isinstance(exc, InternalInconsistency) else EXIT_COMPUTE
        envelope.update(status="error", exit_status=code,
                        error={"name": exc.name, "message": str(exc)})
        if isinstance(exc, VerificationFailed):
            envelope["results"] = json.loads(str(exc))
            envelope["error"]["message"] = "at least one field failed verification"
        csv_rows = None
    text = _render(args, envelope, lines, csv_rows)
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return envelope["exit_status"]


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
