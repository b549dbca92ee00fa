"""
Comparison Summary Generator
Persists comparison tables per leverage (CSV + aligned text), equity curves,
and one workbook with a sheet per leverage. Can re-render everything from
the persisted CSVs without re-running a backtest.
"""

import csv
import math
import re
from pathlib import Path
from typing import Dict, List

from openpyxl import Workbook
from openpyxl.styles import Alignment, Font, PatternFill

from core.backtest.backtest_engine import ComparisonTable
from core.errors import MissingArtifactsError
from core.metrics.performance_metrics import EquityCurve, PerformanceReport
from utils.constants import (
    COMPARISON_CSV,
    COMPARISON_TXT,
    COMPARISON_XLSX,
    EQUITY_CSV,
    ERROR_MISSING_ARTIFACTS,
    REPORT_COLUMNS,
    REPORT_HEADERS,
)
from utils.logger import get_logger


logger = get_logger(__name__)

PERCENT_COLUMNS = {"roi", "max_drawdown", "avg_position"}
HEADER_FILL = PatternFill(start_color="2ECC71", end_color="2ECC71", fill_type="solid")


def leverage_tag(leverage: float) -> str:
    return f"{leverage:g}"


def _slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9]+", "_", label).strip("_")


def format_cell(column: str, value) -> str:
    """Human-readable cell: percentages for ROI/MD/AP, 4 decimals otherwise"""
    if column == "strategy":
        return str(value)
    if column == "trading_days":
        return str(int(value))
    if column == "leverage":
        return f"1:{leverage_tag(value)}"
    value = float(value)
    if math.isnan(value):
        return "n/a"
    if column in PERCENT_COLUMNS:
        return f"{value * 100:.2f}%"
    return f"{value:.4f}"


def render_text(rows: List[PerformanceReport]) -> str:
    """Aligned plain-text table, one row per strategy"""
    cells = [[REPORT_HEADERS[c] for c in REPORT_COLUMNS]]
    cells += [[format_cell(c, v) for c, v in zip(REPORT_COLUMNS, r.row())] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(REPORT_COLUMNS))]

    def line(row):
        first = row[0].ljust(widths[0])
        rest = [cell.rjust(width) for cell, width in zip(row[1:], widths[1:])]
        return "  ".join([first, *rest]).rstrip()

    rule = "-" * len(line(cells[0]))
    return "\n".join([line(cells[0]), rule, *(line(r) for r in cells[1:])]) + "\n"


class ComparisonSummaryGenerator:
    """Write and reload comparison tables under one output directory."""

    def __init__(self, output_dir):
        self.output_dir = Path(output_dir)
        self.tables: Dict[float, List[PerformanceReport]] = {}

    # ========================================================================
    # WRITING
    # ========================================================================

    def add_table(self, table: ComparisonTable, leverage: float) -> List[Path]:
        """Persist one leverage's table and its equity curves"""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        rows = table.rows
        self.tables[leverage] = rows

        written = [self._write_csv(rows, leverage), self._write_text(rows, leverage)]
        for result in table.results:
            written.append(self.write_equity(result.equity, result.report.strategy, leverage))
        logger.info(f"Comparison at leverage 1:{leverage_tag(leverage)} written ({len(rows)} rows)")
        return written

    def _write_csv(self, rows: List[PerformanceReport], leverage: float) -> Path:
        path = self.output_dir / COMPARISON_CSV.format(leverage=leverage_tag(leverage))
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(REPORT_COLUMNS)
            for report in rows:
                writer.writerow(report.row())
        return path

    def _write_text(self, rows: List[PerformanceReport], leverage: float) -> Path:
        path = self.output_dir / COMPARISON_TXT.format(leverage=leverage_tag(leverage))
        path.write_text(render_text(rows), encoding="utf-8")
        return path

    def write_equity(self, curve: EquityCurve, strategy: str, leverage: float) -> Path:
        path = self.output_dir / EQUITY_CSV.format(strategy=_slug(strategy), leverage=leverage_tag(leverage))
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["timestamp", "balance"])
            for ts, balance in zip(curve.timestamps, curve.balance):
                writer.writerow([int(ts), repr(float(balance))])
        return path

    def write_workbook(self) -> Path:
        """One sheet per leverage, formatted like the text tables"""
        if not self.tables:
            raise MissingArtifactsError(ERROR_MISSING_ARTIFACTS.format(self.output_dir / "comparison_L*.csv"))
        workbook = Workbook()
        workbook.remove(workbook.active)

        for leverage in sorted(self.tables):
            sheet = workbook.create_sheet(title=f"Leverage 1-{leverage_tag(leverage)}")
            sheet.append([REPORT_HEADERS[c] for c in REPORT_COLUMNS])
            for cell in sheet[1]:
                cell.font = Font(bold=True, color="FFFFFF")
                cell.fill = HEADER_FILL
                cell.alignment = Alignment(horizontal="center")
            for report in self.tables[leverage]:
                sheet.append([format_cell(c, v) for c, v in zip(REPORT_COLUMNS, report.row())])
            for index, column in enumerate(REPORT_COLUMNS, start=1):
                letter = sheet.cell(row=1, column=index).column_letter
                sheet.column_dimensions[letter].width = 14 if column != "strategy" else 18

        path = self.output_dir / COMPARISON_XLSX
        workbook.save(path)
        workbook.close()
        logger.info(f"Workbook saved: {path}")
        return path

    # ========================================================================
    # RELOADING
    # ========================================================================

    def load_tables(self) -> Dict[float, List[PerformanceReport]]:
        """Read every persisted comparison CSV back into report rows"""
        paths = sorted(self.output_dir.glob(COMPARISON_CSV.format(leverage="*")))
        if not paths:
            raise MissingArtifactsError(ERROR_MISSING_ARTIFACTS.format(self.output_dir / "comparison_L*.csv"))

        self.tables = {}
        for path in paths:
            with open(path, "r", encoding="utf-8", newline="") as f:
                rows = [_report_from_record(record) for record in csv.DictReader(f)]
            if rows:
                self.tables[rows[0].leverage] = rows
            logger.debug(f"Loaded {len(rows)} rows from {path.name}")
        return self.tables

    def render_all(self) -> str:
        """Text of every loaded table, lowest leverage first"""
        blocks = []
        for leverage in sorted(self.tables):
            blocks.append(f"Leverage 1:{leverage_tag(leverage)}\n{render_text(self.tables[leverage])}")
        return "\n".join(blocks)


def _report_from_record(record: Dict[str, str]) -> PerformanceReport:
    values = {}
    for column in REPORT_COLUMNS:
        raw = record[column]
        if column == "strategy":
            values[column] = raw
        elif column == "trading_days":
            values[column] = int(raw)
        else:
            values[column] = float(raw)
    return PerformanceReport(**values)
