"""
Abstract base class for benchmark report exporters.

This module provides a common interface for writing BenchmarkReports to
different file formats (CSV, JSON). Output is deterministic: fixed field
order, values rounded to 6 significant digits, "\\n" line endings.
"""

from abc import ABC, abstractmethod
import json
import os

import pandas as pd

from harness import BenchmarkReport
from helpers import format_sig, setup_logger

CSV_COLUMNS = ["strategy", "fit_acc", "pred_acc", "pred_se", "frugality", "sens", "spec", "wall_ms"]


class ReportExporter(ABC):
    """Abstract base class for report exporters.

    Subclasses implement render(); write() handles the file and logging.
    """

    def __init__(self, name: str):
        """Initialize the exporter.

        Args:
            name: Display name for logging (e.g., "CSV", "JSON").
        """
        self._name = name

    @abstractmethod
    def render(self, report: BenchmarkReport) -> str:
        """Render the report as text.

        Args:
            report: Report to render.

        Returns:
            The complete file contents.
        """
        pass

    def write(self, report: BenchmarkReport, path: str) -> str:
        """Write the rendered report to path; I/O errors propagate unchanged.

        Returns:
            The path written.
        """
        text = self.render(report)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        self._log(f"Report written to {path}")
        return path

    def _log(self, message: str) -> None:
        logger = setup_logger(f"report_exporter.{self._name}")
        logger.info(f"[Export] {message}")


class CsvReportExporter(ReportExporter):
    """One row per strategy; failed strategies leave their numeric fields empty."""

    def __init__(self):
        super().__init__("CSV")

    def render(self, report: BenchmarkReport) -> str:
        rows = [[r.name, *[format_sig(getattr(r, column)) for column in CSV_COLUMNS[1:]]] for r in report.results]
        return pd.DataFrame(rows, columns=CSV_COLUMNS).to_csv(index=False, lineterminator="\n")


class JsonReportExporter(ReportExporter):
    def __init__(self):
        super().__init__("JSON")

    def render(self, report: BenchmarkReport) -> str:
        return json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n"


def get_exporter(fmt: str) -> ReportExporter:
    """Exporter for 'csv' or 'json'."""
    fmt = fmt.lower().lstrip(".")
    if fmt == "csv":
        return CsvReportExporter()
    if fmt == "json":
        return JsonReportExporter()
    raise ValueError(f"Unsupported report format: {fmt}")


def emit_report(report: BenchmarkReport, fmt: str | None, path: str) -> str:
    """Write a report; the format defaults to the path's extension."""
    fmt = fmt or os.path.splitext(path)[1]
    return get_exporter(fmt).write(report, path)


def load_report(path: str) -> BenchmarkReport:
    """Read a JSON report back into a BenchmarkReport."""
    with open(path, "r", encoding="utf-8") as f:
        return BenchmarkReport.from_dict(json.load(f))
