"""Build-report rendering: a delimited summary plus figures.

Writes build_report.json (full detail, includes wall time), report.csv (one
row per table with its row count), and two PNG charts: the per-table row
counts and the row-vs-column layout size comparison.
"""

from __future__ import annotations

from pathlib import Path

from .export import write_csv
from .ingest import ColumnSpec, RawTable, TableSchema

REPORT_SCHEMA = TableSchema(
    "report",
    (ColumnSpec("table", "text"), ColumnSpec("rows", "integer")),
)


def report_table(report) -> RawTable:
    rows = [(name, count) for name, count in sorted(report.table_rows.items())]
    return RawTable(REPORT_SCHEMA, rows)


def write_report(report, report_dir, *, figures: bool = True) -> Path:
    report_dir = Path(report_dir)
    report_dir.mkdir(parents=True, exist_ok=True)
    (report_dir / "build_report.json").write_text(
        report.to_json() + "\n", encoding="utf-8"
    )
    write_csv(report_table(report), report_dir / "report.csv")
    if figures:
        render_figures(report, report_dir / "figures")
    return report_dir


def render_figures(report, fig_dir) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig_dir = Path(fig_dir)
    fig_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    if report.table_rows:
        names = sorted(report.table_rows)
        counts = [report.table_rows[n] for n in names]
        fig, ax = plt.subplots(
            figsize=(8, max(2.0, 0.35 * len(names) + 1.2))
        )
        ax.barh(range(len(names)), counts, color="#4878a8")
        ax.set_yticks(range(len(names)))
        ax.set_yticklabels(names, fontsize=8)
        ax.invert_yaxis()
        ax.set_xlabel("rows")
        ax.set_title("Rows per table")
        fig.tight_layout()
        path = fig_dir / "table_rows.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)

    layout = report.layout
    if layout.get("row_bytes") is not None:
        fig, ax = plt.subplots(figsize=(5, 4))
        sizes = [layout["row_bytes"], layout["column_bytes"]]
        ax.bar(["row layout", "column layout"], sizes,
               color=["#a85048", "#48a870"])
        ax.set_ylabel("serialized bytes")
        ax.set_title(
            f"Layout sizes ({layout['row_records']} row records vs "
            f"{layout['column_records']} wide records)"
        )
        for i, size in enumerate(sizes):
            ax.text(i, size, f"{size:,}", ha="center", va="bottom",
                    fontsize=9)
        fig.tight_layout()
        path = fig_dir / "layout_sizes.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        written.append(path)
    return written
