"""Thread-safe writer for suite reports."""

from __future__ import annotations

import csv
import io
import json
import threading
from pathlib import Path
from typing import Literal

from ..models import SuiteReport

ReportFormat = Literal["json", "jsonl", "csv"]
CSV_FIELDS = ("suite", "name", "residual", "tolerance", "passed", "oracle")


class ReportWriter:
    """Writes SuiteReports as one JSON document, JSON lines or CSV rows.

    A directory target gets one append-only ``<suite>.jsonl`` per suite with a
    line per check.
    """

    def __init__(self, target: str | Path, fmt: ReportFormat = "json") -> None:
        self.target = Path(target)
        self.fmt = fmt
        self._lock = threading.Lock()
        if self.target.suffix == "" and fmt != "json":
            self.target.mkdir(parents=True, exist_ok=True)
        else:
            self.target.parent.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def render_json(reports: list[SuiteReport]) -> str:
        payload = [report.model_dump(mode="json") for report in reports]
        return json.dumps(payload if len(payload) != 1 else payload[0], indent=2, sort_keys=True)

    @staticmethod
    def render_lines(report: SuiteReport) -> str:
        lines = []
        for check in report.checks:
            row = check.model_dump(mode="json")
            row["version"] = report.version
            lines.append(json.dumps(row, sort_keys=True))
        return "".join(line + "\n" for line in lines)

    @staticmethod
    def render_csv(reports: list[SuiteReport]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for report in reports:
            for check in report.checks:
                writer.writerow(
                    [report.suite, check.name, f"{check.residual:.6e}", f"{check.tolerance:.1e}", check.passed, check.oracle]
                )
        return buffer.getvalue()

    def write(self, reports: list[SuiteReport]) -> list[Path]:
        written: list[Path] = []
        with self._lock:
            if self.target.is_dir():
                for report in reports:
                    path = self.target / f"{report.suite}.jsonl"
                    with path.open("a", encoding="utf-8") as handle:
                        handle.write(self.render_lines(report))
                    written.append(path)
                return written
            if self.fmt == "json":
                text = self.render_json(reports)
            elif self.fmt == "jsonl":
                text = "".join(self.render_lines(report) for report in reports)
            else:
                text = self.render_csv(reports)
            self.target.write_text(text, encoding="utf-8")
            written.append(self.target)
        return written
