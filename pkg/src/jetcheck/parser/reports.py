"""JSON serialization of check reports."""

import json

from src.jetcheck.enums import CheckStatus
from src.jetcheck.system.models import CheckReport

REPORT_KEYS = ("check_id", "status", "residual_text", "passes", "millis")


def report_to_dict(report: CheckReport) -> dict:
    """Return the JSON object of one report."""
    return {
        "check_id": report.check_id,
        "status": report.status.value,
        "residual_text": report.residual_text,
        "passes": report.passes,
        "millis": report.millis,
    }


def reports_to_json(reports: list[CheckReport], seed: int) -> str:
    """Serialize reports, sorted by check id, with the RNG seed.

    Parameters
    ----------
    reports : list of CheckReport
        Reports to write.
    seed : int
        Seed used by numeric checks.

    Returns
    -------
    str
        Indented JSON text.
    """
    ordered = sorted(reports, key=lambda r: r.check_id)
    document = {"seed": seed, "reports": [report_to_dict(r) for r in ordered]}
    return json.dumps(document, indent=2)


def validate_document(document: dict) -> None:
    """Raise ValueError unless ``document`` has the report schema."""
    if set(document) != {"seed", "reports"} or not isinstance(document["seed"], int):
        raise ValueError("A report document has exactly the keys 'seed' and 'reports'.")
    statuses = {s.value for s in CheckStatus}
    for item in document["reports"]:
        if tuple(sorted(item)) != tuple(sorted(REPORT_KEYS)):
            raise ValueError(f"Report keys must be {', '.join(REPORT_KEYS)}.")
        if item["status"] not in statuses:
            raise ValueError(f"Unknown status {item['status']!r}.")
        if not isinstance(item["passes"], int) or not isinstance(item["millis"], int):
            raise ValueError("'passes' and 'millis' must be integers.")


def reports_from_json(text: str) -> tuple[int, list[CheckReport]]:
    """Read a report document back; residuals are kept as text."""
    document = json.loads(text)
    validate_document(document)
    reports = [
        CheckReport(
            check_id=item["check_id"],
            status=CheckStatus(item["status"]),
            passes=item["passes"],
            millis=item["millis"],
            text=item["residual_text"],
        )
        for item in document["reports"]
    ]
    return document["seed"], reports
