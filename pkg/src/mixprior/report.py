"""Result documents: aligned text tables and the CSV result file.

Text output is deterministic for a given config (no timestamps), so two
runs of the same analysis print byte-identical tables.  The CSV
document carries full-precision cells, a commented provenance block and
one ``[section]`` header per table.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["ResultDocument", "Table", "format_text", "render_csv", "write_csv"]


@dataclass(frozen=True)
class Table:
    name: str
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]


@dataclass(frozen=True)
class ResultDocument:
    command: str
    config_text: str
    tables: tuple[Table, ...]
    seed: int
    engine_version: str
    created: str


def _text_cell(value, full_precision: bool) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{value:.12g}" if full_precision else f"{value:.3f}"
    return str(value)


def _csv_cell(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def format_text(doc: ResultDocument, full_precision: bool = False) -> str:
    """Aligned plain-text tables, one block per table."""
    out = [f"# {doc.command} (mixprior {doc.engine_version}, seed {doc.seed})"]
    for table in doc.tables:
        cells = [list(table.columns)]
        for row in table.rows:
            cells.append([_text_cell(v, full_precision) for v in row])
        widths = [max(len(r[j]) for r in cells) for j in range(len(table.columns))]
        out.append("")
        out.append(f"== {table.name} ==")
        for i, row in enumerate(cells):
            line = "  ".join(
                cell.ljust(w) if j == 0 else cell.rjust(w)
                for j, (cell, w) in enumerate(zip(row, widths))
            )
            out.append(line.rstrip())
            if i == 0:
                out.append("-" * len(line.rstrip()))
    return "\n".join(out) + "\n"


def render_csv(doc: ResultDocument) -> str:
    """Comma-separated tables with section headers and provenance comments."""
    lines = [
        f"# mixprior {doc.engine_version}",
        f"# command: {doc.command}",
        f"# seed: {doc.seed}",
        f"# created: {doc.created}",
        "# config:",
    ]
    lines += [f"#   {line}" for line in doc.config_text.rstrip("\n").split("\n")]
    for table in doc.tables:
        lines.append(f"[{table.name}]")
        lines.append(",".join(table.columns))
        for row in table.rows:
            lines.append(",".join(_csv_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def write_csv(doc: ResultDocument, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_csv(doc))
