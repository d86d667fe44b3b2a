"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 generation halted (or overflowed),
3 a checked property or validator hypothesis failed.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import sys
from datetime import datetime, timezone

from . import __version__
from .analysis import corollary_bound_check, ratio_report
from .bfile import BFileError, BFile, read_bfile, serialize_bfile
from .config import ConfigError, RunConfig, load_config
from .core import (
    ArithmeticOverflow,
    Conolly,
    Conway,
    GeneralConolly,
    InitialConditionError,
    MetaFibError,
    SequenceState,
    SpecError,
    TermIndexError,
    TraceOfInitialCondition,
)
from .properties import (
    check_delta_components,
    check_growth,
    check_no_consecutive_increments,
    check_slow_growth,
    check_split_law,
    check_theorem_en,
    growth_report,
)
from .survey import (
    CSV_HEADER,
    TheoremContradiction,
    conolly_points,
    conway_points,
    general_points,
    iter_survey,
    parse_int_range,
    variant_points,
)
from .validators import validate_conolly, validate_conway

EXIT_OK, EXIT_USAGE, EXIT_HALTED, EXIT_VIOLATION = 0, 1, 2, 3
FAMILIES = ("conway", "variant", "conolly", "general")
CHECKS = ("slow", "noconsec", "split", "components", "en", "growth", "match")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_terms(text: str) -> list[list[int]]:
    try:
        return [[int(x) for x in pair.split(":")] for pair in text.split(",")]
    except ValueError:
        raise UsageError(f"--terms expects pairs like 0:1,1:2, got {text!r}") from None


def _spec_args(p: argparse.ArgumentParser, family_required: bool = True) -> None:
    p.add_argument("family", choices=FAMILIES, nargs=None if family_required else "?")
    p.add_argument("-k", type=int)
    p.add_argument("-a", type=int)
    p.add_argument("-b", type=int)
    p.add_argument("-c", type=int)
    p.add_argument("-s", type=int)
    p.add_argument("--terms", help="general family summands, e.g. 0:1,1:2")
    p.add_argument("--ics", help="initial conditions: 1,1,2 or a pattern like ones:3")
    p.add_argument("--config", help="JSON run configuration; flags override it")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="metafib", description="Meta-Fibonacci sequence workbench")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a sequence")
    _spec_args(p, family_required=False)
    p.add_argument("-n", type=int, dest="horizon", help="number of terms")
    p.add_argument("--format", choices=("table", "csv", "bfile", "json"))

    p = sub.add_parser("validate", help="check sufficient hypotheses on initial conditions")
    _spec_args(p, family_required=False)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("check", help="check a sequence property")
    p.add_argument("property", choices=CHECKS)
    _spec_args(p, family_required=False)
    p.add_argument("-n", type=int, dest="horizon")
    p.add_argument("--bfile", help="read terms from an OEIS b-file instead of generating")
    p.add_argument("--checkpoints", help="comma-separated indices for the growth check")
    p.add_argument("--window", help="low,high window for the half-bound (conolly)")

    p = sub.add_parser("survey", help="classify a parameter grid")
    p.add_argument("family", choices=FAMILIES)
    for flag in ("-k", "-a", "-b", "-c", "-s"):
        p.add_argument(flag, help="integer or inclusive range lo..hi")
    p.add_argument("--terms", action="append", help="general summands (repeatable)")
    p.add_argument("--ics", action="append", help="pattern, e.g. ones:3..8 or ones:+0..+2 (repeatable)")
    p.add_argument("-n", type=int, dest="horizon", default=10**4)
    p.add_argument("--out", help="JSON report path (default: stdout)")
    p.add_argument("--csv", help="also write a CSV table here")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (0 = all cores)")
    p.add_argument("--no-timestamp", action="store_true")

    p = sub.add_parser("ratio", help="report terms[n]/n")
    _spec_args(p, family_required=False)
    p.add_argument("-n", type=int, dest="horizon")
    p.add_argument("--ref", choices=("half", "phi"), dest="reference")
    p.add_argument("--samples", help="comma-separated indices (default: powers of two)")
    p.add_argument("--tail", help="low,high tail window")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("trace", help="show how one term is evaluated")
    _spec_args(p, family_required=False)
    p.add_argument("--at", type=int, required=True)
    p.add_argument("--json", action="store_true")
    return parser


def _ints(text: str, flag: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated integers, got {text!r}") from None


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    overrides = {
        key: getattr(args, key, None)
        for key in ("family", "k", "a", "b", "c", "s", "horizon", "format", "reference")
    }
    if getattr(args, "terms", None):
        overrides["terms"] = _parse_terms(args.terms)
    if getattr(args, "ics", None):
        ics = args.ics
        overrides["ics"] = _ints(ics, "--ics") if ics[0].isdigit() and ":" not in ics else ics
    return cfg.merged(overrides)


def _state(cfg: RunConfig, horizon: int | None = None) -> SequenceState:
    if cfg.family is None:
        raise UsageError("a recursion family is required")
    state = SequenceState(cfg.spec(), cfg.initial_conditions())
    n = horizon if horizon is not None else cfg.horizon
    if n is None:
        raise UsageError("-n (number of terms) is required")
    return state.extend(n)


def _halted(state: SequenceState, err) -> int:
    print(f"halted: {state.diagnostic}", file=err)
    return EXIT_HALTED


def _symbol(state: SequenceState) -> str:
    return "C" if isinstance(state.spec, (Conolly, GeneralConolly)) else "A"


def cmd_gen(args, out, err) -> int:
    cfg = _config(args)
    state = _state(cfg)
    fmt = cfg.format or "table"
    vals = state.values()
    if fmt == "bfile":
        out.write(serialize_bfile(BFile.from_terms(vals)))
    elif fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["n", f"{_symbol(state)}(n)"])
        w.writerows(enumerate(vals, 1))
    elif fmt == "json":
        doc = {
            "spec": state.spec.to_dict(),
            "initial_conditions": state.initial_conditions,
            "terms": vals,
            "status": "complete" if state.is_active else "halted",
            "diagnostic": None if state.is_active else state.diagnostic.to_dict(),
        }
        out.write(json.dumps(doc) + "\n")
    else:
        width = max(len(str(len(vals))), 1)
        out.write(f"{'n':>{width}}  {_symbol(state)}(n)\n")
        for i, v in enumerate(vals, 1):
            out.write(f"{i:>{width}}  {v}\n")
    return EXIT_OK if state.is_active else _halted(state, err)


def cmd_validate(args, out, err) -> int:
    cfg = _config(args)
    spec, ics = cfg.spec(), cfg.initial_conditions()
    if isinstance(spec, Conway):
        report = validate_conway(spec, ics)
    elif isinstance(spec, Conolly):
        report = validate_conolly(spec, ics)
    else:
        raise UsageError(f"no validator exists for the {spec.family} family")
    out.write((json.dumps(report.to_dict()) if args.json else report.render()) + "\n")
    return EXIT_OK if report.overall else EXIT_VIOLATION


def _terms_for_check(args, cfg):
    """Return (table, state-or-None); table is a list or a SequenceState."""
    if args.bfile:
        bf = read_bfile(args.bfile)
        if bf.offset is None:
            raise UsageError("b-file has no entries")
        high = cfg.horizon if cfg.horizon is not None else bf.entries[-1][0]
        return bf.values(1, high), None
    state = _state(cfg)
    return state, state


def cmd_check(args, out, err) -> int:
    if args.property == "en":
        k = args.k if args.k is not None else 2
        horizon = args.horizon if args.horizon is not None else 10**4
        res = check_theorem_en(k, horizon)
        x = res.extras
        for rec in x["records"]:
            line = f"n={rec.n:<3} E_n={rec.e_n:<10} A(E_n)={rec.a_of_e_n:<10} {'ok' if rec.holds else 'FAIL'}"
            if rec.hypothesis3 is not None:
                line += f"  hyp2 j={rec.hypothesis2_j}  hyp3={'ok' if rec.hypothesis3 else 'FAIL'}"
            out.write(line + "\n")
        out.write(res.render() + "\n")
        ok = res.holds and x["hypothesis2_holds"] and x["hypothesis3_holds"]
        return EXIT_OK if ok else EXIT_VIOLATION

    cfg = _config(args)
    if args.property == "match":
        if not args.bfile or cfg.family is None:
            raise UsageError("match needs both --bfile and a recursion family")
        bf = read_bfile(args.bfile)
        high = min(bf.entries[-1][0], cfg.horizon or bf.entries[-1][0])
        state = _state(cfg, high)
        if len(state) < high:
            return _halted(state, err)
        for n, v in zip(range(1, high + 1), bf.values(1, high)):
            if state[n] != v:
                out.write(f"mismatch at n={n}: b-file {v}, engine {state[n]}\n")
                return EXIT_VIOLATION
        out.write(f"b-file matches {state.spec} on [1, {high}]\n")
        return EXIT_OK

    table, state = _terms_for_check(args, cfg)
    if state is not None and not state.is_active:
        return _halted(state, err)
    if args.property == "slow":
        res = check_slow_growth(table)
    elif args.property == "noconsec":
        res = check_no_consecutive_increments(table)
    elif args.property in ("split", "components"):
        if state is None:
            raise UsageError(f"{args.property} needs a generated Conolly-type state, not a b-file")
        res = check_split_law(state) if args.property == "split" else check_delta_components(state)
        if args.property == "split" and args.window:
            lo, hi = _ints(args.window, "--window")
            cb = corollary_bound_check(state, (lo, hi))
            out.write(
                f"max C(n)/n on [{lo}, {hi}] = {cb.max_decimal:.9f} at n={cb.max_index}; "
                f"bound 1/2 + {float(cb.slack):.6f}: {'ok' if cb.satisfies_half_bound else 'FAIL'}\n"
            )
            if not cb.satisfies_half_bound:
                out.write(res.render() + "\n")
                return EXIT_VIOLATION
    else:
        if not args.checkpoints:
            raise UsageError("growth needs --checkpoints")
        samples = growth_report(table, _ints(args.checkpoints, "--checkpoints"))
        for i, v in samples:
            out.write(f"{i} {v}\n")
        res = check_growth(samples)
    out.write(res.render() + "\n")
    return EXIT_OK if res.holds else EXIT_VIOLATION


def _survey_points(args):
    def rng(flag, default=None):
        val = getattr(args, flag)
        if val is None:
            if default is None:
                raise UsageError(f"survey {args.family} needs -{flag}")
            return default
        return parse_int_range(val)

    ics = args.ics
    if args.family == "conway":
        return conway_points(rng("k"), rng("a"), rng("b"), ics)
    if args.family == "variant":
        return variant_points(rng("k"), rng("a"), rng("b"), rng("c"), ics)
    if args.family == "conolly":
        return conolly_points(rng("s"), ics or ["ones:3"])
    if not args.terms:
        raise UsageError("survey general needs --terms")
    return general_points([_parse_terms(t) for t in args.terms], ics)


def cmd_survey(args, out, err) -> int:
    points = list(_survey_points(args))
    jobs = None if args.jobs == 0 else args.jobs
    records = []
    status = EXIT_OK
    try:
        for rec in iter_survey(points, args.horizon, jobs):
            records.append(rec)
    except TheoremContradiction as exc:
        print(f"theorem contradiction: {exc}", file=err)
        status = EXIT_VIOLATION

    report = {
        "metadata": {
            "tool": "metafib",
            "version": __version__,
            "family": args.family,
            "horizon": args.horizon,
            "generated_at": None
            if args.no_timestamp
            else datetime.now(timezone.utc).isoformat(timespec="seconds"),
        },
        "records": [r.to_dict() for r in records],
    }
    text = json.dumps(report, indent=1) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            w.writerows(r.csv_row() for r in records)
    summary = {}
    for r in records:
        summary[r.outcome.kind] = summary.get(r.outcome.kind, 0) + 1
    target = err if not args.out else out
    print(
        f"{len(records)} points: " + ", ".join(f"{k} {v}" for k, v in sorted(summary.items())),
        file=target,
    )
    return status


def cmd_ratio(args, out, err) -> int:
    cfg = _config(args)
    state = _state(cfg)
    if not state.is_active:
        return _halted(state, err)
    samples = _ints(args.samples, "--samples") if args.samples else cfg.samples or "geometric"
    tail = _ints(args.tail, "--tail") if args.tail else cfg.tail
    report = ratio_report(state, samples, cfg.reference, tail=tuple(tail) if tail else None)
    out.write((json.dumps(report.to_dict()) if args.json else report.render()) + "\n")
    return EXIT_OK


def cmd_trace(args, out, err) -> int:
    cfg = _config(args)
    state = _state(cfg, args.at)
    if len(state) < args.at:
        return _halted(state, err)
    tr = state.trace(args.at)
    sym = _symbol(state)
    if args.json:
        out.write(json.dumps({
            "n": tr.n,
            "composition_chains": [[list(step) for step in ch] for ch in tr.composition_chains],
            "summand_arguments": [list(s) for s in tr.summand_arguments],
            "result": tr.result,
        }) + "\n")
        return EXIT_OK
    out.write(f"{sym}({tr.n}) = " + " + ".join(f"{sym}({x})" for x, _ in tr.summand_arguments)
              + " = " + " + ".join(str(v) for _, v in tr.summand_arguments) + f" = {tr.result}\n")
    for i, chain in enumerate(tr.composition_chains, 1):
        out.write(f"  lookup {i}, starting at {chain[0][1]}:\n")
        for depth, arg, val in chain:
            out.write(f"    depth {depth}: {sym}({arg}) = {val}\n")
    for i, (x, v) in enumerate(tr.summand_arguments, 1):
        out.write(f"  summand {i}: {sym}({x}) = {v}\n")
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "validate": cmd_validate,
    "check": cmd_check,
    "survey": cmd_survey,
    "ratio": cmd_ratio,
    "trace": cmd_trace,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args, out, err)
    except (UsageError, SpecError, ConfigError, InitialConditionError, BFileError,
            TermIndexError, TraceOfInitialCondition, ValueError) as exc:
        print(f"metafib {args.command}: error: {exc}", file=err)
        return EXIT_USAGE
    except ArithmeticOverflow as exc:
        print(f"metafib {args.command}: {exc}", file=err)
        return EXIT_HALTED
    except (MetaFibError, OSError) as exc:
        print(f"metafib {args.command}: error: {exc}", file=err)
        return EXIT_USAGE


def run(argv) -> tuple[int, str, str]:
    """Invoke the CLI in-process and capture (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


if __name__ == "__main__":
    sys.exit(main())
