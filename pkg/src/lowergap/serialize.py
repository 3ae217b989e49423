"""Byte-stable JSON and CSV renderings of certificate reports and scans.

Exact rationals appear as ``{"rational": "p/q", "decimal": x}`` in JSON and as
``p/q`` in CSV. Field order is fixed, so equal reports give equal bytes.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from typing import Any

from .certify import CertificateReport, CheckResult, Part

REPORT_FIELDS = ("instance", "n", "d", "mu", "mu2", "kappa", "eigenvalues", "constants", "profile", "freiman",
                 "checks", "overall")
CHECK_CSV_FIELDS = ("instance", "id", "title", "hypothesis_satisfied", "status", "lhs", "rhs", "margin",
                    "borderline", "note")


def encode_number(x: Any) -> Any:
    if isinstance(x, Fraction):
        return {"rational": f"{x.numerator}/{x.denominator}", "decimal": float(x)}
    return x


def decode_number(x: Any) -> Any:
    if isinstance(x, dict) and "rational" in x:
        return Fraction(x["rational"])
    return x


def _part_dict(p: Part) -> dict:
    return {"name": p.name, "relation": p.relation, "lhs": encode_number(p.lhs), "rhs": encode_number(p.rhs),
            "margin": p.margin, "count": p.count}


def _check_dict(c: CheckResult) -> dict:
    return {
        "id": c.id,
        "title": c.title,
        "hypothesis_satisfied": c.hypothesis_satisfied,
        "lhs": encode_number(c.lhs),
        "rhs": encode_number(c.rhs),
        "margin": c.margin,
        "status": c.status,
        "borderline": c.borderline,
        "note": c.note,
        "parts": [_part_dict(p) for p in c.parts],
    }


def report_to_dict(report: CertificateReport) -> dict:
    return {
        "instance": report.instance,
        "n": report.n,
        "d": report.d,
        "mu": report.mu,
        "mu2": report.mu2,
        "kappa": report.kappa,
        "eigenvalues": list(report.eigenvalues),
        "constants": {k: encode_number(v) for k, v in report.constants.items()},
        "profile": report.profile,
        "freiman": report.freiman,
        "checks": [_check_dict(c) for c in report.checks],
        "overall": "pass" if report.overall else "fail",
    }


def report_from_dict(data: dict) -> CertificateReport:
    checks = tuple(
        CheckResult(
            id=c["id"], title=c["title"], hypothesis_satisfied=c["hypothesis_satisfied"],
            lhs=decode_number(c["lhs"]), rhs=decode_number(c["rhs"]), margin=c["margin"], status=c["status"],
            parts=tuple(Part(p["name"], decode_number(p["lhs"]), decode_number(p["rhs"]), p["count"], p["relation"])
                        for p in c["parts"]),
            note=c["note"], borderline=c["borderline"],
        )
        for c in data["checks"]
    )
    return CertificateReport(
        instance=data["instance"], n=data["n"], d=data["d"], mu=data["mu"], mu2=data["mu2"], kappa=data["kappa"],
        eigenvalues=tuple(data["eigenvalues"]),
        constants={k: decode_number(v) for k, v in data["constants"].items()},
        profile=data["profile"], freiman=data["freiman"], checks=checks,
    )


def _csv_cell(x: Any) -> Any:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return x


def _dump_json(obj: Any) -> bytes:
    return (json.dumps(obj, indent=2, allow_nan=False) + "\n").encode()


def _dump_csv(header: tuple[str, ...], rows: list[list[Any]]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_csv_cell(x) for x in r])
    return buf.getvalue().encode()


def serialize_report(report: CertificateReport, fmt: str = "json") -> bytes:
    if fmt == "json":
        return _dump_json(report_to_dict(report))
    if fmt == "csv":
        label = report.instance["label"]
        rows = [[label, c.id, c.title, c.hypothesis_satisfied, c.status, c.lhs, c.rhs, c.margin, c.borderline, c.note]
                for c in report.checks]
        return _dump_csv(CHECK_CSV_FIELDS, rows)
    raise ValueError(f"unknown format {fmt!r}")


def parse_report(data: bytes) -> CertificateReport:
    return report_from_dict(json.loads(data))


def serialize_reports(reports: list[CertificateReport], fmt: str = "json") -> bytes:
    """Several reports in one stream: a JSON list, or one CSV with a row per check."""
    if fmt == "json":
        return _dump_json([report_to_dict(r) for r in reports])
    if fmt == "csv":
        body = [serialize_report(r, "csv").decode().split("\n", 1)[1] for r in reports]
        return (",".join(CHECK_CSV_FIELDS) + "\n" + "".join(body)).encode()
    raise ValueError(f"unknown format {fmt!r}")


SCAN_CSV_FIELDS = ("label", "kind", "group_order", "n", "d", "status", "reason", "mu", "mu2", "kappa", "c1_ratio",
                   "overall", "passed", "failed", "vacuous", "failed_checks")


def _row_values(row) -> list[Any]:
    return [
        row.label, row.kind, row.group_order, row.n, row.d, row.status, row.reason, row.mu, row.mu2, row.kappa,
        row.c1_ratio, "" if row.overall is None else ("pass" if row.overall else "fail"),
        row.passed, row.failed, row.vacuous, " ".join(row.failed_checks),
    ]


def scan_summary_dict(summary) -> dict:
    best = summary.min_row
    return {
        "instances": len(summary.rows),
        "certified": len(summary.certified),
        "failed": len(summary.failed_instances),
        "skipped": summary.skipped,
        "min_c1_ratio": None if best is None else best.c1_ratio,
        "min_c1_instance": None if best is None else best.label,
        "overall": "pass" if summary.ok else "fail",
    }


def serialize_scan(summary, fmt: str = "json", include_summary: bool = True) -> bytes:
    """Per-instance rows, plus (by default) a summary: a JSON object, or a final CSV row.

    The CSV summary row has status ``summary``; its c1_ratio column holds the
    minimum ratio, reason names the minimizing instance, and passed / failed /
    vacuous hold the certified, failed and skipped instance counts.
    """
    if fmt == "json":
        body: dict[str, Any] = {"rows": [dict(zip(SCAN_CSV_FIELDS, _row_values(r))) for r in summary.rows]}
        for r in body["rows"]:
            r["failed_checks"] = r["failed_checks"].split()
            r["overall"] = r["overall"] or None
        if include_summary:
            body["summary"] = scan_summary_dict(summary)
        return _dump_json(body)
    if fmt == "csv":
        rows = [_row_values(r) for r in summary.rows]
        if include_summary:
            s = scan_summary_dict(summary)
            rows.append(["summary", "", "", "", "", "summary", s["min_c1_instance"], "", "", "", s["min_c1_ratio"],
                         s["overall"], s["certified"], s["failed"], len(summary.rows) - s["certified"], ""])
        return _dump_csv(SCAN_CSV_FIELDS, rows)
    raise ValueError(f"unknown format {fmt!r}")
