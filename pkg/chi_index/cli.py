"""Command-line entry point: parse flags, run the scan, print the report.

Exit codes: 0 ok, 1 usage, 2 computation error, 3 check-suite failure.
"""
import argparse
import json
import logging
import sys
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path

import pandas as pd

from chi_index import log
from chi_index.checks import run_checks
from chi_index.errors import ChiIndexError, PreconditionError, ReportWriteError, UsageError
from chi_index.fieldspec import Character, quotient_structure, rational_field, real_cyclotomic_field
from chi_index.modarith import is_prime
from chi_index.search import SearchConfig, full_run

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPUTATION = 2
EXIT_CHECK_FAILED = 3


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    p: int | None
    r: int | None
    field: object = None
    characters: tuple | None = None
    search: SearchConfig = dataclass_field(default_factory=SearchConfig)
    out: Path | None = None
    json: bool = False
    check: bool = False
    verbosity: int = 0


def _build_parser():
    parser = _ArgumentParser(
        prog="chi-index",
        description="Upper bounds on chi-indices of Soule cyclotomic elements via residual indices.",
    )
    parser.add_argument("--p", type=int, help="odd prime p")
    parser.add_argument("--r", type=int, help="odd twist r >= 3")
    parser.add_argument("--conductor", type=int, help="conductor f of F")
    parser.add_argument("--subgroup", help="comma-separated generators of H in (Z/f)^x")
    parser.add_argument("--field", help="shorthand: Q or real-cyclotomic:f")
    parser.add_argument("--char", default="all", help='"all" or a comma-separated exponent vector')
    defaults = SearchConfig()
    parser.add_argument("--ell-bound", type=int, default=defaults.ell_bound)
    parser.add_argument("--n-max", type=int, default=defaults.n_max)
    parser.add_argument("--primes-per-level", type=int, default=defaults.primes_per_level)
    parser.add_argument("--window", type=int, default=defaults.stabilization_window)
    parser.add_argument("--workers", type=int, default=defaults.workers)
    parser.add_argument("--processes", action="store_true", help="run the workers as processes instead of threads")
    parser.add_argument("--out", type=Path, help="also write the JSON report here")
    parser.add_argument("--json", action="store_true", help="print JSON instead of the table")
    parser.add_argument("--check", action="store_true", help="run the self-check suites and exit")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def _parse_int_list(text, flag):
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise UsageError(f"{flag} expects comma-separated integers, got {text!r}") from None


def _parse_field(args, p):
    if args.field is not None:
        if args.conductor is not None or args.subgroup is not None:
            raise UsageError("--field cannot be combined with --conductor/--subgroup")
        if args.field == "Q":
            return rational_field(p)
        kind, _, value = args.field.partition(":")
        if kind != "real-cyclotomic" or not value.isdigit():
            raise UsageError(f"unknown field shorthand {args.field!r}; use Q or real-cyclotomic:f")
        return real_cyclotomic_field(int(value), p)
    if args.conductor is None:
        raise UsageError("give --field, or --conductor with --subgroup")
    subgroup = _parse_int_list(args.subgroup or "", "--subgroup")
    return quotient_structure(args.conductor, subgroup, p)


def _parse_characters(text, field):
    if text == "all":
        return None
    exponents = _parse_int_list(text, "--char")
    orders = field.group.orders
    if len(exponents) != len(orders):
        raise UsageError(f"--char needs {len(orders)} exponent(s) for G with generator orders {list(orders)}")
    return (Character(tuple(k % o for k, o in zip(exponents, orders)), orders),)


def parse_args(argv=None):
    args = _build_parser().parse_args(argv)
    search = SearchConfig(
        ell_bound=args.ell_bound,
        n_max=args.n_max,
        primes_per_level=args.primes_per_level,
        stabilization_window=args.window,
        workers=args.workers,
        processes=args.processes,
    )
    if args.check:
        return RunConfig(args.p, args.r, search=search, check=True, verbosity=args.verbose)

    if args.p is None or args.r is None:
        raise UsageError("--p and --r are required")
    if args.p == 2 or not is_prime(args.p):
        raise UsageError("p must be an odd prime")
    if args.r < 3 or args.r % 2 == 0:
        raise UsageError("r must be odd and >= 3")
    try:
        field = _parse_field(args, args.p)
        characters = _parse_characters(args.char, field)
        search.levels(field)
    except UsageError:
        raise
    except PreconditionError as exc:
        raise UsageError(str(exc)) from exc
    return RunConfig(
        p=args.p,
        r=args.r,
        field=field,
        characters=characters,
        search=search,
        out=args.out,
        json=args.json,
        verbosity=args.verbose,
    )


def report_payload(reports, field, r):
    return {
        "p": field.p,
        "r": r,
        "field": {"conductor": field.conductor, "subgroup": list(field.subgroup_generators())},
        "classes": [report.to_dict() for report in reports],
    }


def report_table(reports):
    rows = []
    for report in reports:
        chi = report.character_class.representative
        accepted = sum(record.accepted for record in report.candidates)
        rows.append({
            "character": ",".join(str(k) for k in chi.exponents) or "-",
            "order": chi.order,
            "d_chi": report.character_class.degree,
            "bound": "-" if report.upper_bound_valuation is None else report.upper_bound_valuation,
            "stabilized": report.stabilized,
            "witness": "-" if report.witness is None else f"ell={report.witness.ell} n={report.witness.n}",
            "accepted": f"{accepted}/{len(report.candidates)}",
        })
    return pd.DataFrame(rows).to_string(index=False)


def emit_report(reports, field, r, fmt="json"):
    """Serialize reports as deterministic JSON or as a plain-text table."""
    if fmt == "json":
        return json.dumps(report_payload(reports, field, r), indent=2)
    if fmt == "table":
        return report_table(reports)
    raise PreconditionError(f"unknown report format {fmt!r}")


def write_report(text, path):
    try:
        path.write_text(text + "\n", encoding="utf-8")
    except OSError as exc:
        raise ReportWriteError(path, exc.strerror or exc) from exc


def main(argv=None):
    try:
        config = parse_args(argv)
    except UsageError as exc:
        sys.stderr.write(f"chi-index: error: {exc}\n")
        return EXIT_USAGE

    log.configure(config.verbosity)

    if config.check:
        results = run_checks()
        for result in results:
            status = "ok" if result.passed else "FAILED"
            print(f"{result.name}: {status}{' ' + result.detail if result.detail else ''}")
        return EXIT_OK if all(result.passed for result in results) else EXIT_CHECK_FAILED

    try:
        reports = full_run(config.field, config.r, config.search, config.characters)
        document = emit_report(reports, config.field, config.r, "json")
        if config.out is not None:
            write_report(document, config.out)
    except ChiIndexError as exc:
        logger.error("%s", exc)
        if config.json:
            print(json.dumps({"error": str(exc), "kind": type(exc).__name__}))
        return EXIT_COMPUTATION

    print(document if config.json else emit_report(reports, config.field, config.r, "table"))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
