"""
Command line surface: analyze, bounds, verify and catalog
"""

import argparse
import json
import logging
import sys

import numpy as np

from src.app.reporting import (
    AnalyzeOptions,
    AppSettings,
    emit_curves,
    emit_report,
    load_problem_file,
    load_settings,
    run_analyze,
    verify_gaussian,
    verify_oracle,
)
from src.classes.custom_exceptions import ParseError, QuadSemiError
from src.helpers.consts import (
    CATALOG_NAMES,
    CATALOG_PQ_PAIRS,
    CONFIG_FILENAME,
    EXIT_NUMERICAL,
    EXIT_SUCCESS,
    QUADSEMI_DEBUG_CONFIG_TITLE,
)
from src.helpers.py_logger import create_logger

DEFAULT_PQ = ((2.0, 2.0),)


def parse_exponent(text: str) -> float:
    """
    Reads a Lebesgue exponent, "inf" included
    """
    value = float(text.strip())
    if not value >= 1:
        raise ValueError(f"Exponent must be at least 1, got {text}")
    return value


def parse_pq(text: str) -> tuple:
    """
    Reads "p,q" such as "2,2" or "1,inf"
    """
    try:
        p_text, q_text = text.split(",")
        return parse_exponent(p_text), parse_exponent(q_text)
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"Expected p,q with 1 <= p, q <= inf, got {text!r}") from err


def build_parser() -> argparse.ArgumentParser:
    """
    Argument parser with one sub-parser per command
    """
    parser = argparse.ArgumentParser(
        prog="quadsemi", description="Decay and smoothing bounds for semigroups of quadratic operators"
    )
    parser.add_argument("--config", default=CONFIG_FILENAME, help="Path of the INI configuration")
    parser.add_argument("--seed", type=int, default=None, help="Seed for all randomized probes")
    parser.add_argument("--out-dir", default=None, help="Directory for reports and curves")
    parser.add_argument("--verbose", action="store_true", help="Log DEBUG lines to the console")
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser("analyze", help="Structure, spectrum and normal form of a symbol")
    analyze.add_argument("file", help="Problem JSON file or catalog name")
    analyze.add_argument("--structure-only", action="store_true", help="Stop after the singular space and spectrum")
    analyze.add_argument("--dump-normal-form", action="store_true", help="Print the normal form as JSON")
    analyze.add_argument("--e-max", type=float, default=None, help="Real cutoff of the spectrum listing")

    bounds = commands.add_parser("bounds", help="Upper envelopes and lower bounds for L^p -> L^q norms")
    bounds.add_argument("file", help="Problem JSON file or catalog name")
    bounds.add_argument("--pq", type=parse_pq, action="append", default=None, help="Exponent pair, repeatable")

    verify = commands.add_parser("verify", help="Cross-check bounds against Gaussian states or the oracle")
    verify.add_argument("file", help="Problem JSON file or catalog name")
    mode = verify.add_mutually_exclusive_group()
    mode.add_argument("--gaussian", action="store_true", help="Ground state lower bound against the envelope")
    mode.add_argument("--oracle", action="store_true", help="Hermite discretization corner norms")

    catalog = commands.add_parser("catalog", help="Built-in problems")
    catalog.add_argument("action", choices=("list", "dump"))
    catalog.add_argument("name", nargs="?", default=None)
    return parser


def _analyze(args, settings: AppSettings, seed: int, structure_only: bool = False, e_max: float = None):
    """
    Loads the problem named on the command line and runs the analysis on it
    """
    problem = load_problem_file(args.file)
    sym = problem.to_symbol(settings.tolerances)
    options = AnalyzeOptions(structure_only=structure_only, e_max=e_max, seed=seed)
    return run_analyze(sym, options, settings, name=problem.name)


def run_command(args, settings: AppSettings) -> int:
    """
    Dispatches a parsed command
    :return: Process exit code
    """
    if args.command == "catalog":
        return run_catalog(args)

    seed = settings.reporting.seed if args.seed is None else args.seed
    out_dir = args.out_dir or settings.reporting.output_location
    t_grid = settings.grids.default_grid()

    if args.command == "analyze":
        report = _analyze(args, settings, seed, args.structure_only, args.e_max)
        if report.propagation_ready:
            emit_curves(report, out_dir, (), t_grid, settings)
        if args.dump_normal_form and report.normal_form is not None:
            print(json.dumps(report.normal_form.to_dict(), indent=2, sort_keys=True))
    elif args.command == "bounds":
        report = _analyze(args, settings, seed)
        emit_curves(report, out_dir, args.pq or DEFAULT_PQ, t_grid, settings)
    else:
        report = _analyze(args, settings, seed)
        if args.oracle:
            _, slope = verify_oracle(report, out_dir, settings)
            print(f"oracle (2,2) decay slope: {slope:.8g} (expected {-report.gamma:.8g})")
        else:
            verify_gaussian(report, out_dir, CATALOG_PQ_PAIRS, t_grid, settings)

    emit_report(report, out_dir)
    print(report.summary_text())
    return EXIT_SUCCESS if report.status != "FAILED" else EXIT_NUMERICAL


def run_catalog(args) -> int:
    """
    Lists the built-in problems or prints one as JSON
    """
    if args.action == "list":
        for name in CATALOG_NAMES:
            problem = load_problem_file(name)
            print(f"{name}: n={problem.n} {problem.description}".rstrip())
        return EXIT_SUCCESS
    if args.name not in CATALOG_NAMES:
        logging.critical(f"Unknown catalog entry {args.name}, choose from {', '.join(CATALOG_NAMES)}")
        raise ParseError(f"Unknown catalog entry {args.name}", field="name", choices=list(CATALOG_NAMES))
    print(json.dumps(load_problem_file(args.name).to_dict(), indent=2, sort_keys=True))
    return EXIT_SUCCESS


def main(argv: list = None) -> int:
    """
    Entry point, returns the process exit code
    """
    args = build_parser().parse_args(argv)
    try:
        create_logger(QUADSEMI_DEBUG_CONFIG_TITLE, args.config, console_level="DEBUG" if args.verbose else None)
        settings = load_settings(args.config)
        return run_command(args, settings)
    except QuadSemiError as err:
        logging.critical(f"{err.code}: {err}")
        print(json.dumps(err.to_dict(), default=str), file=sys.stderr)
        return err.exit_code
    except np.linalg.LinAlgError as err:
        logging.critical(f"Linear algebra failure: {err}")
        print(json.dumps({"code": "LinAlgError", "message": str(err), "context": {}}), file=sys.stderr)
        return EXIT_NUMERICAL
