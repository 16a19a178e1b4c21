"""Command-line front end: check, run, wp, edl and infer."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence, TextIO

from .algebraic import RealField, format_field, format_real
from .expectations import dump_constraints, format_constraint, format_eterm, infer_program, sort_constraints
from .inference import (
    CheckError, NotRefuted, Poly, PolyParseError, check_assignment, export_smt_check,
    export_smt_synthesis, parse_assignment, parse_poly,
)
from .semantics import Configuration, DensityMatrix, State, initial_state, load_state, qwp_series, run_n
from .syntax import If, Measure, Program, SyntaxProblem, While, format_expr, format_stmt, parse, walk

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_REFUTED = 2

DIGITS = 15


class CliError(Exception):
    """An input problem reported on stderr with exit code 1."""


# ------------------------------------------------------------------ formatting


def decimal_text(x: RealField) -> str:
    return format(x.to_decimal(DIGITS), f".{DIGITS}g")


def approx(x: RealField) -> str:
    return f"{decimal_text(x)} (approx)"


def show(x: RealField, fmt: str) -> str:
    if fmt == "exact":
        return format_real(x)
    if fmt == "decimal":
        return approx(x)
    return f"{format_real(x)}  ~ {approx(x)}"


def format_rho(rho: DensityMatrix) -> str:
    return "[" + ", ".join("[" + ", ".join(format_field(x) for x in row) + "]" for row in rho.entries) + "]"


def format_store(store) -> str:
    return "{" + ", ".join(f"{k}={v}" for k, v in store.items()) + "}"


def format_config(c: Configuration) -> str:
    where = "done" if c.stmt is None else " ".join(line.strip() for line in format_stmt(c.stmt).splitlines())
    return f"<{where} | {format_store(c.store)} | {format_rho(c.rho)}>"


def label_table(program: Program) -> list[tuple[int, str]]:
    rows = []
    for node in walk(program.body):
        if isinstance(node, While):
            rows.append((node.label, f"while {format_expr(node.cond)}"))
        elif isinstance(node, If):
            rows.append((node.label, f"if {format_expr(node.cond)}"))
        elif isinstance(node, Measure):
            rows.append((node.label, f"{node.target} := meas {node.qubit}"))
    return sorted(rows)


# ------------------------------------------------------------------ inputs


def load_program(path: str) -> Program:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}") from None
    try:
        return parse(text)
    except SyntaxProblem as e:
        raise CliError(f"{path}:{e}") from None


def load_initial(program: Program, args: argparse.Namespace) -> tuple[State, str]:
    if args.state:
        try:
            text = Path(args.state).read_text()
        except OSError as e:
            raise CliError(f"cannot read {args.state}: {e.strerror}") from None
        return load_state(program, text), f"file {args.state}"
    name = args.preset or "ket0"
    return initial_state(program, preset_name=name), f"preset {name}"


def load_post(program: Program, text: str) -> Poly:
    try:
        return parse_poly(text, program)
    except PolyParseError as e:
        raise CliError(f"post-expectation: {e}") from None


# ------------------------------------------------------------------ commands


def cmd_check(args: argparse.Namespace, out: TextIO) -> int:
    p = load_program(args.file)
    kinds = [f"{v} : bool" for v in p.bool_vars] + [f"{v} : nat" for v in p.nat_vars]
    print(f"ok: {args.file}", file=out)
    print(f"classical: {', '.join(kinds) or '(none)'}", file=out)
    print(f"qubits: {', '.join(p.qubits) or '(none)'}", file=out)
    rows = label_table(p)
    print(f"labels: {len(rows)}", file=out)
    for label, what in rows:
        print(f"  {label}\t{what}", file=out)
    return EXIT_OK


def cmd_run(args: argparse.Namespace, out: TextIO) -> int:
    p = load_program(args.file)
    sigma, origin = load_initial(p, args)
    tr = run_n(Configuration(p.body, sigma.store, sigma.rho), args.steps)
    print(f"# {args.file}, {origin}, {args.steps} lifted steps", file=out)
    cols = ["weight", "terminal_mass", "edl"]
    header = ["step"]
    for c in cols:
        if args.format in ("exact", "both"):
            header.append(c)
        if args.format in ("decimal", "both"):
            header.append(f"{c} (approx)")
    print("\t".join(header), file=out)
    for i in range(tr.steps + 1):
        values = [tr.weights[i - 1] if i else None, tr.terminal_mass[i], tr.edl[i]]
        row = [str(i)]
        for v in values:
            if args.format in ("exact", "both"):
                row.append("-" if v is None else format_real(v))
            if args.format in ("decimal", "both"):
                row.append("-" if v is None else decimal_text(v))
        print("\t".join(row), file=out)
    final = tr.final
    print(f"final distribution: {len(final)} configuration(s), mass {format_real(final.mass())}", file=out)
    for w, c in sorted(final.items(), key=lambda wc: format_config(wc[1])):
        print(f"  {show(w, args.format)} : {format_config(c)}", file=out)
    return EXIT_OK


def cmd_wp(args: argparse.Namespace, out: TextIO) -> int:
    p = load_program(args.file)
    sigma, origin = load_initial(p, args)
    f = load_post(p, args.post)
    series = qwp_series(p.body, f, sigma, args.steps)
    for a, b in zip(series, series[1:]):
        if b < a:
            raise CliError("the approximation decreased: the post-expectation is negative on a reachable final state")
    print(f"# {args.file}, {origin}, post {f}, {args.steps} lifted steps", file=out)
    print(f"qwp_{args.steps} = {show(series[-1], args.format)}", file=out)
    print("step\tincrement\tqwp_n" + ("\tqwp_n (approx)" if args.format == "both" else ""), file=out)
    prev = RealField(0)
    for i, v in enumerate(series):
        inc = v - prev
        prev = v
        if args.format == "exact":
            print(f"{i}\t{format_real(inc)}\t{format_real(v)}", file=out)
        elif args.format == "decimal":
            print(f"{i}\t{decimal_text(inc)}\t{decimal_text(v)}", file=out)
        else:
            print(f"{i}\t{format_real(inc)}\t{format_real(v)}\t{decimal_text(v)}", file=out)
    return EXIT_OK


def cmd_edl(args: argparse.Namespace, out: TextIO) -> int:
    p = load_program(args.file)
    sigma, origin = load_initial(p, args)
    tr = run_n(Configuration(p.body, sigma.store, sigma.rho), args.steps)
    print(f"# {args.file}, {origin}, {args.steps} lifted steps", file=out)
    print(f"edl_{args.steps} = {show(tr.edl[-1], args.format)}", file=out)
    print(f"terminated mass = {show(tr.terminal_mass[-1], args.format)}", file=out)
    return EXIT_OK


def _load_assignment(p: Program, path: str) -> dict[str, Poly]:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}") from None
    try:
        return parse_assignment(text, p)
    except PolyParseError as e:
        raise CliError(f"{path}: {e}") from None


def _emit(text: str, args: argparse.Namespace, out: TextIO) -> None:
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}", file=out)
    else:
        out.write(text)


def cmd_infer(args: argparse.Namespace, out: TextIO) -> int:
    p = load_program(args.file)
    alpha = _load_assignment(p, args.assign) if args.assign else {}
    if args.post is not None:
        f = load_post(p, args.post)
    elif "X" in alpha:
        f = alpha["X"]
    elif args.mode == "check" and not args.assign:
        f = None
    else:
        raise CliError("no post-expectation: pass --post or give 'X := ...' in the assignment file")
    alpha.pop("X", None)

    if args.mode == "export-synth":
        try:
            _emit(export_smt_synthesis(p, f, args.degree), args, out)
        except ValueError as e:
            raise CliError(str(e)) from None
        return EXIT_OK
    if args.mode == "export-check":
        if not args.assign:
            raise CliError("export-check needs --assign")
        try:
            _emit(export_smt_check(p, f, alpha), args, out)
        except KeyError as e:
            raise CliError(e.args[0]) from None
        return EXIT_OK

    g, constraints = infer_program(p)
    ordered = sort_constraints(constraints)
    print(f"pre-expectation: {format_eterm(g)}", file=out)
    print(f"constraints: {len(ordered)}", file=out)
    out.write(dump_constraints(constraints))
    if f is None:
        return EXIT_OK
    try:
        verdict = check_assignment(p, f, alpha, samples=args.samples, seed=args.seed, jobs=args.jobs)
    except KeyError as e:
        raise CliError(e.args[0]) from None
    except CheckError as e:
        raise CliError(str(e)) from None
    if isinstance(verdict, NotRefuted):
        print(str(verdict), file=out)
        return EXIT_OK
    s = verdict.state
    print(f"RefutedAt sample {verdict.index}", file=out)
    print(f"  store: {format_store(s.store)}", file=out)
    print(f"  rho:   {format_rho(s.rho)}", file=out)
    if verdict.constraint is not None:
        i = ordered.index(verdict.constraint)
        print(f"  constraint: {format_constraint(verdict.constraint, i)}", file=out)
        print(f"  lhs = {show(verdict.lhs, args.format)}", file=out)
        print(f"  rhs = {show(verdict.rhs, args.format)}", file=out)
    else:
        print(f"  {verdict.variable} is negative: {show(verdict.rhs, args.format)}", file=out)
    return EXIT_REFUTED


# ------------------------------------------------------------------ argument parsing


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qet", description="Expectation reasoning for quantum programs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_state(sp: argparse.ArgumentParser) -> None:
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--state", help="JSON file with 'store' and 'rho'")
        g.add_argument("--preset", help="ket0, ket1, ketplus, ketminus, phi, mixed; e.g. 'ket0,phi' or 'ket0^2'")

    def with_format(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--format", choices=("exact", "decimal", "both"), default="both")

    sp = sub.add_parser("check", help="parse and type-check; list labels")
    sp.add_argument("file")

    sp = sub.add_parser("run", help="lifted-step trace")
    sp.add_argument("file")
    with_state(sp)
    sp.add_argument("--steps", type=_nonneg, default=10)
    with_format(sp)

    sp = sub.add_parser("wp", help="n-step pre-expectation of a post-expectation")
    sp.add_argument("file")
    with_state(sp)
    sp.add_argument("--post", required=True, help="polynomial post-expectation, e.g. 'i' or '1'")
    sp.add_argument("--steps", type=_nonneg, default=100)
    with_format(sp)

    sp = sub.add_parser("edl", help="expected derivation length prefix")
    sp.add_argument("file")
    with_state(sp)
    sp.add_argument("--steps", type=_nonneg, default=100)
    with_format(sp)

    sp = sub.add_parser("infer", help="constraints, assignment checking and SMT-LIB export")
    sp.add_argument("file")
    sp.add_argument("--post", help="post-expectation f for the variable X")
    sp.add_argument("--assign", help="file with lines 'X_<label> := <polynomial>'")
    sp.add_argument("--mode", choices=("check", "export-check", "export-synth"), default="check")
    sp.add_argument("--degree", type=_nonneg, default=2)
    sp.add_argument("--samples", type=_positive, default=1000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--jobs", type=_positive, default=1)
    sp.add_argument("--out", help="write the .smt2 file here instead of stdout")
    with_format(sp)
    return parser


COMMANDS = {"check": cmd_check, "run": cmd_run, "wp": cmd_wp, "edl": cmd_edl, "infer": cmd_infer}


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, out or sys.stdout)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
