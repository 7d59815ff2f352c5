"""Report document model and deterministic renderers (markdown, CSV, JSON).

Rounding happens exactly once, here, when a section is built; the pipeline
itself always works at full precision. Cells are stored as already-formatted
strings so that the three output formats agree character-for-character on
every value and rendering stays byte-deterministic.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .dataset import Dataset
from .descriptive import CorrelationMatrix, correlation_matrix, describe
from .firth import FirthFit
from .logistic import significance_code
from .pipeline import (
    CELL_CEASED,
    CELL_NOT_AVAILABLE,
    CELL_PROBABILITY,
    PredictionTable,
    ScreenReport,
    probability_drift,
)

SCHEMA_VERSION = 1

#: Decimal places per column class.
ROUNDING = {
    "summary": 4,       # means / standard deviations
    "coefficient": 4,   # estimates and standard errors
    "statistic": 3,     # W, chi-square, AIC, test statistics
    "p_value": 3,       # below 10^-3 rendered as "<0.001"
    "correlation": 2,
    "probability": 3,
}

#: Human-readable names for dataset columns, in report output.
COLUMN_LABELS = {
    "year": "Year",
    "fail": "Fail",
    "revenue": "Revenue (M$)",
    "cost_of_revenue": "Cost of revenue (M$)",
    "sga": "SGA (M$)",
    "ebitda": "EBITDA (M$)",
    "stores": "Stores",
    "us_interest_rate": "US interest rate (%)",
    "us_inflation_rate": "US inflation rate (%)",
    "long_term_debt": "Long-term debt (M$)",
    "pandemic": "Pandemic",
    "acsi": "ACSI score",
    "sga_over_rev": "SGA/Revenue",
    "cor_over_rev": "Cost of revenue/Revenue",
    "ebitda_over_rev": "EBITDA/Revenue",
    "ltd_over_rev": "Long-term debt/Revenue",
}

SIGNIF_LEGEND = "Signif. codes: 0 '***' 0.001 '**' 0.01 '*' 0.05 '.' 0.1 ' ' 1"

SCREEN_TITLES = {
    "external": "external factors",
    "internal": "internal factors",
    "ratios": "internal factors as revenue ratios",
}


def fmt_number(value: float, decimals: int) -> str:
    text = f"{value:.{decimals}f}"
    # Avoid "-0.000"-style output when the rounded value is zero.
    if float(text) == 0.0:
        text = f"{0.0:.{decimals}f}"
    return text


def fmt_p(value: float) -> str:
    if value < 0.001:
        return "<0.001"
    return fmt_number(value, ROUNDING["p_value"])


@dataclass(frozen=True)
class Section:
    title: str
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class ReportDocument:
    sections: tuple[Section, ...]
    format: str = "markdown"
    meta: dict = field(default_factory=dict)


def describe_section(dataset: Dataset) -> Section:
    rows = []
    for summary in describe(dataset):
        rows.append(
            (
                COLUMN_LABELS[summary.name],
                fmt_number(summary.mean, ROUNDING["summary"]),
                fmt_number(summary.std, ROUNDING["summary"]),
                fmt_number(summary.sw_w, ROUNDING["statistic"]),
                fmt_p(summary.sw_p),
            )
        )
    return Section(
        title="Descriptive statistics",
        columns=("Variable", "Mean", "Std. deviation", "Shapiro-Wilk W", "p-value"),
        rows=tuple(rows),
    )


def correlation_section(dataset: Dataset, matrix: CorrelationMatrix | None = None) -> Section:
    matrix = matrix if matrix is not None else correlation_matrix(dataset)
    labels = [COLUMN_LABELS.get(name, name) for name in matrix.labels]
    rows = []
    for i, label in enumerate(labels):
        rows.append(
            (label, *(fmt_number(matrix.r[i, j], ROUNDING["correlation"]) for j in range(len(labels))))
        )
    return Section(
        title="Correlation matrix",
        columns=("Variable", *labels),
        rows=tuple(rows),
    )


def screen_section(report: ScreenReport) -> Section:
    predictors = [name for name, _ in report.fits]
    fits = [fit for _, fit in report.fits]

    def across(fn) -> tuple[str, ...]:
        return tuple(fn(fit) for fit in fits)

    coef_nd = ROUNDING["coefficient"]
    rows = (
        ("Intercept", *across(lambda f: fmt_number(f.beta[0], coef_nd))),
        ("Intercept (p-value)", *across(lambda f: fmt_p(f.p_values[0]))),
        ("Intercept [s.e.]", *across(lambda f: fmt_number(f.se[0], coef_nd))),
        ("Intercept signif.", *across(lambda f: significance_code(f.p_values[0]))),
        ("Slope", *across(lambda f: fmt_number(f.beta[1], coef_nd))),
        ("Slope (p-value)", *across(lambda f: fmt_p(f.p_values[1]))),
        ("Slope [s.e.]", *across(lambda f: fmt_number(f.se[1], coef_nd))),
        ("Slope signif.", *across(lambda f: significance_code(f.p_values[1]))),
        ("AIC", *across(lambda f: fmt_number(f.aic, ROUNDING["statistic"]))),
    )
    return Section(
        title=f"Univariate logistic screen: {SCREEN_TITLES.get(report.group, report.group)}",
        columns=("Estimates", *(COLUMN_LABELS.get(name, name) for name in predictors)),
        rows=rows,
        notes=(SIGNIF_LEGEND,),
    )


def final_model_section(fit: FirthFit, n: int) -> Section:
    coef_nd = ROUNDING["coefficient"]
    stat_nd = ROUNDING["statistic"]
    rows = []
    for i, label in enumerate(fit.labels):
        display = "Intercept" if label == "intercept" else COLUMN_LABELS.get(label, label)
        rows.append(
            (
                display,
                fmt_number(fit.beta[i], coef_nd),
                fmt_number(fit.se[i], coef_nd),
                fmt_number(fit.chisq[i], stat_nd),
                fmt_p(fit.p_values[i]),
            )
        )
    notes = (
        f"Likelihood ratio test={fmt_number(fit.lr_stat, stat_nd)} "
        f"on {fit.lr_df} df, p={fmt_p(fit.lr_p)}, n={n}",
        f"Wald test={fmt_number(fit.wald_stat, stat_nd)} "
        f"on {fit.wald_df} df, p={fmt_p(fit.wald_p)}",
        SIGNIF_LEGEND,
    )
    return Section(
        title="Failure prediction model",
        columns=("Term", "Estimate", "Std. Error", "Chi-sq.", "p-value"),
        rows=tuple(rows),
        notes=notes,
    )


def _cell_text(cell) -> str:
    if cell.kind == CELL_PROBABILITY:
        return fmt_number(cell.probability, ROUNDING["probability"])
    if cell.kind == CELL_NOT_AVAILABLE:
        return "-"
    if cell.kind == CELL_CEASED:
        return "*"
    raise ValueError(f"unknown cell kind {cell.kind!r}")


def probability_section(table: PredictionTable) -> Section:
    rows = tuple(
        (str(year), *(_cell_text(cell) for cell in row))
        for year, row in zip(table.years, table.cells)
    )
    return Section(
        title="Failure probability by chain and year",
        columns=("Year", *table.chains),
        rows=rows,
        notes=("'-': not available", "'*': firm has ceased operations"),
    )


def drift_section(table: PredictionTable) -> Section:
    nd = ROUNDING["probability"]
    rows = tuple(
        (chain, str(year), fmt_number(computed, nd), fmt_number(published, nd),
         fmt_number(delta, nd))
        for chain, year, computed, published, delta in probability_drift(table)
    )
    return Section(
        title="Failure probability drift vs published estimates",
        columns=("Chain", "Year", "Computed", "Published", "Delta"),
        rows=rows,
        notes=("Published estimates are not exactly reproducible from the "
               "published model's printed precision; deltas are reported "
               "instead of forcing agreement.",),
    )


def _render_markdown(document: ReportDocument) -> str:
    lines = ["# Retail chain failure analysis", ""]
    for section in document.sections:
        lines.append(f"## {section.title}")
        lines.append("")
        lines.append("| " + " | ".join(section.columns) + " |")
        lines.append("| " + " | ".join("---" for _ in section.columns) + " |")
        for row in section.rows:
            lines.append("| " + " | ".join(row) + " |")
        lines.append("")
        for note in section.notes:
            lines.append(note)
        if section.notes:
            lines.append("")
    return "\n".join(lines).rstrip("\n") + "\n"


def _render_csv(document: ReportDocument) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    for index, section in enumerate(document.sections):
        if index:
            out.write("\n")
        out.write(f"# {section.title}\n")
        writer.writerow(section.columns)
        for row in section.rows:
            writer.writerow(row)
        for note in section.notes:
            out.write(f"# {note}\n")
    return out.getvalue()


def _render_json(document: ReportDocument) -> str:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "sections": [
            {
                "title": section.title,
                "columns": list(section.columns),
                "rows": [list(row) for row in section.rows],
                "notes": list(section.notes),
            }
            for section in document.sections
        ],
        "meta": document.meta,
    }
    return json.dumps(payload, indent=2) + "\n"


_RENDERERS = {
    "markdown": _render_markdown,
    "csv": _render_csv,
    "json": _render_json,
}

FORMATS = tuple(_RENDERERS)


def render(document: ReportDocument) -> str:
    """Serialize a document; identical inputs yield byte-identical output."""
    try:
        renderer = _RENDERERS[document.format]
    except KeyError:
        raise ValueError(
            f"unknown format {document.format!r}; valid: {', '.join(_RENDERERS)}"
        ) from None
    return renderer(document)


def document_meta(dataset: Dataset) -> dict:
    return {
        "n": dataset.n,
        "chains": list(dataset.chains),
        "failures": int(sum(r.fail for r in dataset.records)),
    }
