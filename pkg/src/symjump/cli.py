"""Command-line interface.

Subcommands: iterate, mean-index, jump, analyze, verify, realize.
Exit codes: 0 success, 1 usage or input error, 2 analysis raised a
finiteness-contradiction flag, 3 undecidable exact arithmetic.
Environment: SYMJUMP_BUDGET and SYMJUMP_WORKERS override defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import scenario as sc
from .analysis import run_analysis
from .errors import (ConstraintViolation, NoTupleFound, ScenarioError,
                     SymjumpError, UndecidableComparison)
from .iteration import iteration_rows, mean_index
from .jumps import find_complementary_tuples, find_jump_tuples, verify_tuple
from .normal_forms import realize

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONTRADICTION = 2
EXIT_UNDECIDABLE = 3


class _Parser(argparse.ArgumentParser):
    # usage problems must exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_ERROR)


def _fraction_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="symjump",
                     description="Exact index iteration and jump-tuple analysis "
                                 "for symplectic paths")
    parser.add_argument("--budget", type=int, default=None,
                        help="refinement steps per certified comparison "
                             "(default: scenario option or 64)")
    parser.add_argument("--format", choices=("text", "machine"), default="text",
                        help="output rendering")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("iterate", help="index/nullity table of iterates")
    p.add_argument("--seed", required=True, help="scenario file")
    p.add_argument("--seed-index", type=int, default=0)
    p.add_argument("--m-max", type=int, default=None)

    p = sub.add_parser("mean-index", help="exact or enclosed mean index")
    p.add_argument("--seed", required=True)
    p.add_argument("--seed-index", type=int, default=0)

    p = sub.add_parser("jump", help="search for common index jump tuples")
    p.add_argument("--seeds", required=True)
    p.add_argument("--delta", type=_fraction_arg, default=None)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--complement-of", type=int, default=None, metavar="N",
                   help="emit tuples complementary to the tuple at this N")
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("analyze", help="full two-elliptic-geodesics pipeline")
    p.add_argument("--system", required=True)
    p.add_argument("--delta", type=_fraction_arg, default=None)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--limit", type=int, default=None,
                   help="jump tuples to try for the first peak")
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("verify", help="re-verify stored jump tuples")
    p.add_argument("--seeds", required=True)
    p.add_argument("--tuple", required=True, dest="tuple_file",
                   help="machine-format jump tuple output")

    p = sub.add_parser("realize", help="floating-point endpoint matrix")
    p.add_argument("--seed", required=True)
    p.add_argument("--seed-index", type=int, default=0)
    p.add_argument("--precision", type=_fraction_arg, default=Fraction(1, 10**9))
    return parser


def _load(path: str):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    return sc.parse_scenario(data)


def _pick_seed(system, index: int):
    if not 0 <= index < len(system.seeds):
        raise ScenarioError(f"seed index {index} out of range (q = {len(system.seeds)})")
    return system.seeds[index]


def _emit(report, fmt: str) -> None:
    sys.stdout.buffer.write(sc.emit_report(report, fmt))
    sys.stdout.buffer.flush()


def _progress_printer(enabled: bool):
    if not enabled:
        return None
    def report(m_done: int, n_max: int) -> None:
        sys.stderr.write(f"  scanned lattice up to m = {m_done} (N <= {n_max})\n")
    return report


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _dispatch(args)
    except BrokenPipeError:
        # reader closed the pipe (e.g. | head); die quietly like cat does
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_ERROR
    except UndecidableComparison as exc:
        sys.stderr.write(f"undecidable: {exc}\n")
        return EXIT_UNDECIDABLE
    except (ScenarioError, NoTupleFound, ConstraintViolation, SymjumpError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR
    except (ValueError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


def _dispatch(args) -> int:
    env_budget = os.environ.get("SYMJUMP_BUDGET")
    env_workers = os.environ.get("SYMJUMP_WORKERS")

    if args.command == "iterate":
        system, options = _load(args.seed)
        budget = _resolve(args.budget, env_budget, options.budget)
        seed = _pick_seed(system, args.seed_index)
        m_max = args.m_max if args.m_max is not None else options.m_max
        rows = list(iteration_rows(seed, m_max, budget))
        _emit(rows, args.format)
        return EXIT_OK

    if args.command == "mean-index":
        system, options = _load(args.seed)
        seed = _pick_seed(system, args.seed_index)
        _emit(mean_index(seed), args.format)
        return EXIT_OK

    if args.command == "jump":
        system, options = _load(args.seeds)
        budget = _resolve(args.budget, env_budget, options.budget)
        workers = _resolve(args.workers, env_workers, 1)
        delta = args.delta if args.delta is not None else options.delta
        n_max = args.n_max if args.n_max is not None else options.n_max
        limit = args.limit if args.limit is not None else options.limit
        progress = _progress_printer(sys.stderr.isatty())
        if args.complement_of is not None:
            base = find_jump_tuples(system.seeds, delta, n_max=args.complement_of,
                                    n_min=args.complement_of, limit=1,
                                    budget=budget, workers=workers, progress=progress)
            tuples = find_complementary_tuples(system.seeds, base[0], n_max=n_max,
                                               limit=limit, budget=budget,
                                               workers=workers, progress=progress)
        else:
            tuples = find_jump_tuples(system.seeds, delta, n_max, limit,
                                      budget=budget, workers=workers,
                                      progress=progress)
        _emit(tuples, args.format)
        return EXIT_OK

    if args.command == "analyze":
        system, options = _load(args.system)
        budget = _resolve(args.budget, env_budget, options.budget)
        workers = _resolve(args.workers, env_workers, 1)
        delta = args.delta if args.delta is not None else options.delta
        n_max = args.n_max if args.n_max is not None else options.n_max
        limit = args.limit if args.limit is not None else max(options.limit, 5)
        report = run_analysis(system, delta=delta, n_max=n_max, tuple_limit=limit,
                              budget=budget, workers=workers,
                              progress=_progress_printer(sys.stderr.isatty()))
        _emit(report, args.format)
        return EXIT_OK if report.status == "two_elliptic_irrational" else EXIT_CONTRADICTION

    if args.command == "verify":
        system, options = _load(args.seeds)
        budget = _resolve(args.budget, env_budget, options.budget)
        try:
            raw = Path(args.tuple_file).read_bytes()
        except OSError as exc:
            raise ScenarioError(f"cannot read {args.tuple_file}: {exc}") from exc
        doc = json.loads(raw)
        if isinstance(doc, dict) and doc.get("type") == "jump_tuples":
            tuples = sc.parse_report(raw)
        elif isinstance(doc, dict) and "N" in doc:
            tuples = [sc.tuple_from_json(doc)]
        else:
            raise ScenarioError("tuple file must be a jump_tuples report or one tuple object")
        ok = True
        for t in tuples:
            result = verify_tuple(t, system.seeds, budget)
            ok = ok and result.passed
            _emit(result, args.format)
        return EXIT_OK if ok else EXIT_ERROR

    if args.command == "realize":
        system, options = _load(args.seed)
        seed = _pick_seed(system, args.seed_index)
        _emit(realize(seed.decomp, args.precision), args.format)
        return EXIT_OK

    raise ScenarioError(f"unknown command {args.command!r}")


def _resolve(cli_value, env_value, fallback):
    if cli_value is not None:
        return cli_value
    if env_value is not None:
        return int(env_value)
    return fallback


if __name__ == "__main__":
    sys.exit(main())
