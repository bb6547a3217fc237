"""Rendering of reports for the terminal and for report files."""

from collections import Counter
from pathlib import Path

import click
from tabulate import tabulate

from src.jetcheck.config import Settings
from src.jetcheck.enums import CheckStatus, OutputFormat
from src.jetcheck.parser.reports import reports_to_json
from src.jetcheck.system.models import CheckReport

HEADERS = ("check", "status", "residual")


def summary_line(reports: list[CheckReport], seed: int) -> str:
    """Return ``summary: 3 zero, 1 residual, 0 error; seed 1729``."""
    counts = Counter(r.status for r in reports)
    parts = ", ".join(f"{counts[s]} {s.value}" for s in CheckStatus)
    return f"summary: {parts}; seed {seed}"


def render_reports(reports: list[CheckReport], settings: Settings) -> str:
    """Render reports sorted by check id, as a plain table or as JSON.

    Parameters
    ----------
    reports : list of CheckReport
        Reports to render.
    settings : Settings
        Output format and seed.

    Returns
    -------
    str
        Text without a trailing newline.
    """
    if settings.output_format is OutputFormat.JSON:
        return reports_to_json(reports, settings.seed)
    ordered = sorted(reports, key=lambda r: r.check_id)
    rows = [(r.check_id, r.status.value, r.residual_text) for r in ordered]
    table = tabulate(rows, headers=HEADERS, tablefmt="plain", disable_numparse=True)
    return f"{table}\n{summary_line(reports, settings.seed)}"


def exit_code(reports: list[CheckReport]) -> int:
    """0 when every report is zero, 1 with a residual, 3 with an error."""
    statuses = {r.status for r in reports}
    if CheckStatus.ERROR in statuses:
        return 3
    if CheckStatus.RESIDUAL in statuses:
        return 1
    return 0


def emit(reports: list[CheckReport], settings: Settings) -> None:
    """Print the reports, or write them to ``settings.out`` and print the summary."""
    text = render_reports(reports, settings)
    if settings.out:
        Path(settings.out).write_text(text + "\n", encoding="utf-8")
        click.echo(summary_line(reports, settings.seed))
        click.echo(f"reports written to {settings.out}")
    else:
        click.echo(text)


def emit_table(rows: list[tuple], headers: tuple[str, ...]) -> None:
    """Print a plain table that is not made of reports (catalog listings)."""
    click.echo(tabulate(rows, headers=headers, tablefmt="plain", disable_numparse=True))
