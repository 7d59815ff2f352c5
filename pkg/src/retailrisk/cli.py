"""Command-line interface: one subcommand per analysis artifact.

Exit codes: 0 on success, 1 on data/validation/file errors, 2 on usage
errors. Reports go to stdout (or ``--out``) in markdown, CSV, or JSON.
"""

from __future__ import annotations

import argparse
import sys

from .dataset import (
    DataParseError,
    DataValidationError,
    Dataset,
    dataset_to_csv,
    embedded_dataset,
    parse_dataset,
)
from .pipeline import (
    REFERENCE_MODEL_COEFFICIENTS,
    fit_final_model,
    predict_probability,
    run_screen,
    table_from_coefficients,
)
from .report import (
    FORMATS,
    ReportDocument,
    Section,
    correlation_section,
    describe_section,
    document_meta,
    drift_section,
    final_model_section,
    fmt_number,
    probability_section,
    render,
    screen_section,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 2 instead of argparse's sys.exit
        raise _UsageError(message)


def build_parser() -> _Parser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--data", metavar="PATH",
                        help="CSV dataset in the canonical schema (default: embedded data)")
    shared.add_argument("--format", choices=FORMATS, default="markdown",
                        help="output format (default: markdown)")
    shared.add_argument("--out", metavar="PATH", help="write output to a file instead of stdout")
    shared.add_argument("--ratios", choices=("full", "printed"), default="full",
                        help="revenue-ratio precision: full floating point or "
                             "rounded to two decimals (default: full)")

    coef = argparse.ArgumentParser(add_help=False)
    coef.add_argument("--coef", choices=("fitted", "rounded"), default="fitted",
                      help="use fitted coefficients or the published rounded "
                           "ones (embedded data only; default: fitted)")

    parser = _Parser(prog="retailrisk",
                     description="Retail chain failure statistics and prediction")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    commands.required = True

    commands.add_parser("export-data", parents=[shared],
                        help="emit the dataset as canonical CSV")
    commands.add_parser("describe", parents=[shared],
                        help="means, standard deviations, Shapiro-Wilk tests")
    commands.add_parser("correlate", parents=[shared],
                        help="full Pearson correlation matrix")
    fit = commands.add_parser("fit", parents=[shared],
                              help="univariate logistic screen for one factor group")
    fit.add_argument("--group", choices=("external", "internal", "ratios"), required=True)
    commands.add_parser("fit-final", parents=[shared],
                        help="penalized-likelihood failure prediction model")
    predict = commands.add_parser("predict", parents=[shared, coef],
                                  help="failure probability grid or a single chain-year cell")
    predict.add_argument("--chain", help="chain name (with --year: a single cell)")
    predict.add_argument("--year", type=int, help="calendar year (with --chain)")
    commands.add_parser("report", parents=[shared, coef],
                        help="all sections in one document")
    return parser


def _load_dataset(args) -> Dataset:
    if args.data is None:
        return embedded_dataset(ratio_precision=args.ratios)
    with open(args.data, "r", encoding="utf-8") as handle:
        return parse_dataset(handle.read(), ratio_precision=args.ratios)


def _final_coefficients(args, dataset: Dataset):
    if getattr(args, "coef", "fitted") == "rounded":
        if args.data is not None:
            raise _UsageError("--coef rounded applies to the embedded dataset only")
        return REFERENCE_MODEL_COEFFICIENTS
    return tuple(fit_final_model(dataset).beta)


def _predict_sections(args, dataset: Dataset) -> list[Section]:
    if (args.chain is None) != (args.year is None):
        raise _UsageError("--chain and --year must be given together")
    beta = _final_coefficients(args, dataset)
    if args.chain is not None:
        records = dataset.chain_records(args.chain)  # KeyError -> exit 1
        record = next((r for r in records if r.year == args.year), None)
        if record is None:
            raise DataValidationError(
                f"{args.chain}: no observation for year {args.year} "
                f"(observed {records[0].year}-{records[-1].year})"
            )
        prob = predict_probability(beta, record, dataset.ratio_precision)
        cell = Section(
            title="Failure probability",
            columns=("Chain", "Year", "Probability"),
            rows=((args.chain, str(args.year), fmt_number(prob, 3)),),
        )
        return [cell]
    table = table_from_coefficients(beta, dataset)
    sections = [probability_section(table)]
    drift = drift_section(table)
    if drift.rows:
        sections.append(drift)
    return sections


def _sections_for(args, dataset: Dataset) -> list[Section]:
    command = args.command
    if command == "describe":
        return [describe_section(dataset)]
    if command == "correlate":
        return [correlation_section(dataset)]
    if command == "fit":
        return [screen_section(run_screen(dataset, args.group))]
    if command == "fit-final":
        return [final_model_section(fit_final_model(dataset), dataset.n)]
    if command == "predict":
        return _predict_sections(args, dataset)
    if command == "report":
        sections = [
            describe_section(dataset),
            correlation_section(dataset),
            screen_section(run_screen(dataset, "external")),
            screen_section(run_screen(dataset, "internal")),
            screen_section(run_screen(dataset, "ratios")),
        ]
        fit = fit_final_model(dataset)
        sections.append(final_model_section(fit, dataset.n))
        beta = _final_coefficients(args, dataset)
        table = table_from_coefficients(beta, dataset)
        sections.append(probability_section(table))
        drift = drift_section(table)
        if drift.rows:
            sections.append(drift)
        return sections
    raise _UsageError(f"unknown command {command!r}")


def _emit(text: str, args, stdout) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        stdout.write(text)


def run_command(argv, stdout=None, stderr=None) -> int:
    """Execute one CLI invocation; returns the process exit status."""
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        stderr.write(f"error: {exc}\n")
        stderr.write(parser.format_usage())
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    try:
        dataset = _load_dataset(args)
        if args.command == "export-data":
            _emit(dataset_to_csv(dataset), args, stdout)
            return 0
        sections = _sections_for(args, dataset)
        document = ReportDocument(
            sections=tuple(sections), format=args.format, meta=document_meta(dataset)
        )
        _emit(render(document), args, stdout)
        return 0
    except _UsageError as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    except (DataParseError, DataValidationError) as exc:
        stderr.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        stderr.write(f"error: {exc}\n")
        return 1
    except KeyError as exc:
        stderr.write(f"error: {exc.args[0] if exc.args else exc}\n")
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
