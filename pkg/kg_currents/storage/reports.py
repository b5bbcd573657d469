"""CSV / JSON 报告: 版本化, 一次写入"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Literal

from kg_currents.core.basic_dir import atomic_write
from kg_currents.core.constants import FLOAT_FORMAT, REPORT_SCHEMA
from kg_currents.storage.models import REPORT_COLUMNS, ExperimentReport

ReportFormat = Literal["csv", "json"]


def _cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, FLOAT_FORMAT)
    return str(value)


def render_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    buf.write(f"schema={REPORT_SCHEMA}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for row in report.rows:
        values = row.model_dump()
        writer.writerow([_cell(values[c]) for c in REPORT_COLUMNS])
    return buf.getvalue()


def render_json(report: ExperimentReport) -> str:
    doc = {
        "schema": REPORT_SCHEMA,
        "experiment": report.experiment,
        "seed": report.seed,
        "passed": report.passed,
        "rows": [row.model_dump(exclude_none=True) for row in report.rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def render(report: ExperimentReport, fmt: ReportFormat) -> str:
    return render_csv(report) if fmt == "csv" else render_json(report)


def write_report(report: ExperimentReport, path: Path, fmt: ReportFormat) -> Path:
    atomic_write(Path(path), render(report, fmt))
    return Path(path)


def default_report_path(reports_dir: Path, experiment: str, seed: int, fmt: ReportFormat) -> Path:
    return reports_dir / f"{experiment}-{seed}.{fmt}"
