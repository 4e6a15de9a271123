"""Utility functions for report output."""

import json
from typing import List

from pydantic import BaseModel
from slugify import slugify as python_slugify

from .report_models import DescentReport, ScanReport, VerifyReport


def slugify(text: str, max_length: int = 100) -> str:
    """Convert text to a filename-friendly slug.

    Args:
        text: The text to convert to a slug.
        max_length: Maximum length of the slug (default: 100).

    Returns:
        A slug version of the text.
    """
    return python_slugify(text, max_length=max_length)


def report_filename(kind: str, curve_label: str) -> str:
    """Generate a filename for a report on one curve.

    Minus signs become "n" so distinct curves never share a slug, e.g.
    ("descent", "-6,0,6") -> "descent-n6-0-6.json".

    Args:
        kind: Report kind ("descent", "verify").
        curve_label: The curve label "e1,e2,e3".

    Returns:
        A filename ending in .json.
    """
    return f"{slugify(kind + ' ' + curve_label.replace('-', 'n'))}.json"


def report_to_json(report: BaseModel) -> str:
    """Serialize a report with sorted keys and no volatile fields.

    Identical reports serialize to identical bytes.
    """
    return json.dumps(report.model_dump(mode="json"), sort_keys=True, indent=2) + "\n"


def format_report_text(report: DescentReport) -> str:
    """Human-readable summary of a descent report."""
    lines: List[str] = [
        f"Curve: y^2 = (x - e1)(x - e2)(x - e3) with roots {report.curve} (sorted; triples follow this order)",
        f"Discriminant: {report.discriminant}",
        f"dim S^2: {report.selmer_dimension}",
    ]
    for b in report.selmer_basis:
        lines.append(f"  basis element ({b[0]}, {b[1]}, {b[2]})")
    if report.point_images:
        lines.append("Points:")
        for pi in report.point_images:
            lines.append(f"  ({pi.point[0]}, {pi.point[1]}) -> ({pi.image[0]}, {pi.image[1]}, {pi.image[2]})")
    lines.append("Pairing matrix:")
    lines.extend(f"  {row}" for row in report.pairing_matrix or ["(empty)"])
    lines.append(f"Matrix rank: {report.matrix_rank}")
    lines.append(f"Rank bound from 2-descent: {report.plain_rank_bound}")
    lines.append(f"Rank upper bound: {report.rank_upper_bound}")
    lines.append(f"Sha[2] lower bound (F2-dimension): {report.sha2_lower_bound}")
    lines.append(f"Places used: {', '.join(report.places_used)}")
    if report.second_coverings:
        lines.append("Second coverings:")
        for key, equations in report.second_coverings.items():
            lines.append(f"  ({key}):")
            lines.extend(f"    {eq}" for eq in equations)
    if report.contradiction:
        lines.append("WARNING: searched points exceed the rank upper bound")
    return "\n".join(lines) + "\n"


def format_verify_text(report: VerifyReport) -> str:
    """One line per property, PASS or FAIL."""
    lines = [f"Property suite for roots {report.curve}:"]
    for prop in report.properties:
        status = "PASS" if prop.passed else "FAIL"
        suffix = f" ({prop.details})" if prop.details else ""
        lines.append(f"  {status} {prop.name} [{prop.checked}]{suffix}")
    return "\n".join(lines) + "\n"


def format_scan_text(report: ScanReport) -> str:
    lines = ["roots            dim  rank  bound  plain  points"]
    for entry in report.curves:
        if entry.error:
            lines.append(f"{entry.curve:<16} error: {entry.error}")
            continue
        lines.append(
            f"{entry.curve:<16} {entry.selmer_dimension:>3}  {entry.matrix_rank:>4}  "
            f"{entry.rank_upper_bound:>5}  {entry.plain_rank_bound:>5}  {entry.independent_points:>6}"
        )
    lines.append(f"Improved bounds: {', '.join(report.improved) if report.improved else 'none'}")
    return "\n".join(lines) + "\n"
