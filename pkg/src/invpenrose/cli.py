"""Command-line driver.

Exit codes: 0 when every check passes, 1 when a mathematical check fails,
2 for bad input or usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import __version__
from . import fields as F
from . import serialize as ser
from . import spin_index as si
from . import suites
from .form_calculus import FormTypeError, dbar, project_holo_part

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _write(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _load_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _load_field(path: str) -> F.SymSpinorField:
    try:
        return ser.field_from_json(_load_json(path))
    except (ser.FormatError, F.FieldError) as exc:
        raise UsageError(f"malformed field file {path}: {exc}") from None


def parse_chart(text: str | None, n: int, parity: int) -> tuple:
    """``"1,3"`` -> ``(1, 3)``; empty or ``"empty"`` is the empty index; None picks a default."""
    if text is None:
        return () if parity == si.EVEN else (1,)
    text = text.strip()
    if text in ("", "empty", "()", "[]"):
        base: tuple = ()
    else:
        try:
            base = tuple(int(t) for t in text.replace(" ", "").strip("()[]").split(","))
        except ValueError:
            raise UsageError(f"bad chart index {text!r}") from None
    if list(base) != sorted(set(base)) or any(not 1 <= t <= n for t in base):
        raise UsageError(f"chart index {text!r} must be strictly increasing entries in 1..{n}")
    if si.parity(base) != parity:
        raise UsageError(
            f"chart {list(base)} has parity {si.parity_str(si.parity(base))}, field has {si.parity_str(parity)}"
        )
    return base


# ---- subcommands


def cmd_verify(args) -> int:
    try:
        if args.suite == "all":
            reports, skipped = suites.run_all(args.n, args.seed, args.max_degree, args.jobs)
        else:
            reports, skipped = [suites.run_suite(args.suite, args.n, args.seed, args.max_degree, args.jobs)], []
    except suites.SuiteError as exc:
        raise UsageError(str(exc)) from None
    ok = all(r.ok for r in reports)
    if args.suite == "all":
        doc = {
            "suite": "all",
            "n": args.n,
            "seed": args.seed,
            "ok": ok,
            "skipped": skipped,
            "reports": [r.to_json() for r in reports],
        }
    else:
        doc = reports[0].to_json()
    _write(args.out, ser.dumps(doc))
    for r in reports:
        status = "PASS" if r.ok else "FAIL"
        print(f"{status} {r.suite} n={r.n}: {r.passed}/{len(r.cases)} cases in {r.wall_time:.1f}s", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_build_qm(args) -> int:
    phi = _load_field(args.field)
    base = parse_chart(args.chart, phi.n, phi.parity)
    c = ser.chart_for(phi.n, base)
    Q = F.inverse_penrose(phi, c)
    if args.format == "json":
        text = ser.dumps(ser.form_to_json(Q))
    elif args.format == "latex":
        text = ser.form_to_latex(Q)
    else:
        text = ser.form_to_text(Q)
    _write(args.out, text)
    st = ser.form_stats(Q)
    # stats go to stderr when the form itself is written to stdout
    stream = sys.stderr if args.out in (None, "-") else sys.stdout
    print(
        f"terms={st['terms']} monomials={st['monomials']} npow_min={st['npow_min']} npow_max={st['npow_max']}",
        file=stream,
    )
    return EXIT_OK


def cmd_check_dbar(args) -> int:
    doc = _load_json(args.form)
    try:
        u = ser.form_from_json(doc)
    except ser.FormatError as exc:
        raise UsageError(f"malformed form file {args.form}: {exc}") from None
    if project_holo_part(u):
        raise UsageError("form is not of pure type (0,q)")
    try:
        r = dbar(u)
    except FormTypeError as exc:
        raise UsageError(str(exc)) from None
    if not r:
        print("dbar = 0")
        return EXIT_OK
    print(f"dbar != 0: residual has {len(r.terms)} terms", file=sys.stderr)
    _write(args.residual, ser.dumps(ser.form_to_json(r)))
    return EXIT_FAIL


def cmd_dirac(args) -> int:
    phi = _load_field(args.field)
    res = F.field_equation_residual(phi)
    op = "laplacian" if phi.m == 0 else "dirac"
    doc = {
        "operator": op,
        "n": phi.n,
        "m": phi.m,
        "parity": si.parity_str(phi.parity),
        "zero": not res,
        "components": [
            {"key": _residual_key(k), "poly": ser.poly_to_json(p)}
            for k, p in sorted(res.items(), key=lambda kv: repr(kv[0]))
        ],
    }
    _write(args.out, ser.dumps(doc))
    return EXIT_OK if not res else EXIT_FAIL


def _residual_key(k) -> list:
    if k == ():
        return []
    K, rest = k
    return [list(K)] + [list(r) for r in rest]


def cmd_solutions(args) -> int:
    try:
        parity = si.parse_parity(args.parity)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not 2 <= args.n <= 3 or args.m < 0 or args.m > 3 or not 0 <= args.degree <= 4:
        raise UsageError("supported ranges: n in 2..3, m in 0..3, degree in 0..4")
    basis = F.solution_basis(args.n, args.m, parity, args.degree)
    bad = [i for i, phi in enumerate(basis) if not F.is_solution(phi)]
    doc = {
        "n": args.n,
        "m": args.m,
        "parity": si.parity_str(parity),
        "degree": args.degree,
        "dimension": len(basis),
        "fields": [ser.field_to_json(phi) for phi in basis],
    }
    _write(args.out, ser.dumps(doc))
    print(f"dimension={len(basis)}", file=sys.stderr if args.out in (None, "-") else sys.stdout)
    if bad:
        print(f"basis elements {bad} fail the field equation", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


# ---- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="invpenrose", description="Exact inverse Penrose transform engine.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run a seeded verification suite and print a JSON report")
    v.add_argument("--suite", required=True, choices=list(suites.SUITES) + ["all"])
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--max-degree", type=int, default=None, help="coefficient or solution degree (suite default)")
    v.add_argument("--jobs", type=int, default=None, help="worker processes (default: $INVPENROSE_JOBS or 1)")
    v.add_argument("--out", default=None, help="report file (default stdout)")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("build-qm", help="build Q_m(phi) from a field file")
    b.add_argument("field")
    b.add_argument("--chart", default=None, help="chart index, e.g. '' or '1' or '1,2' (default by parity)")
    b.add_argument("--out", default=None)
    b.add_argument("--format", choices=("json", "latex", "text"), default="json")
    b.set_defaults(func=cmd_build_qm)

    c = sub.add_parser("check-dbar", help="check that a (0,q) form file is dbar-closed")
    c.add_argument("form")
    c.add_argument("--residual", default=None, help="where to dump a nonzero residual (default stdout)")
    c.set_defaults(func=cmd_check_dbar)

    d = sub.add_parser("dirac", help="apply the field operator to a field file")
    d.add_argument("field")
    d.add_argument("--out", default=None)
    d.set_defaults(func=cmd_dirac)

    s = sub.add_parser("solutions", help="polynomial solution basis up to a degree")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--parity", required=True)
    s.add_argument("--degree", type=int, required=True)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_solutions)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", None) is not None and args.jobs < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"invpenrose: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except suites.SuiteError as exc:
        print(f"invpenrose: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
