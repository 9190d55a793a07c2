"""Static SVG line charts from trace and sweep CSV files."""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .errors import ParseError


def read_table(path) -> tuple[list[str], dict[str, np.ndarray]]:
    """Parse a CSV with optional ``#`` comment lines into named float columns.

    Every data cell must parse as a float; otherwise :class:`ParseError`
    names the offending line.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    header = None
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        cells = next(csv.reader(io.StringIO(line)))
        if header is None:
            header = [c.strip() for c in cells]
            continue
        if len(cells) != len(header):
            raise ParseError(f"{path}: line {lineno}: expected {len(header)} fields, got {len(cells)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError as exc:
            raise ParseError(f"{path}: line {lineno}: {exc}") from exc
    if header is None:
        raise ParseError(f"{path}: no header row")
    if not rows:
        raise ParseError(f"{path}: no data rows")
    data = np.array(rows, dtype=float)
    return header, {name: data[:, i] for i, name in enumerate(header)}


def emit_plot(csv_path, out_path, x: str | None = None, y=None, title: str | None = None) -> Path:
    """Render ``y`` columns against ``x`` (default: first column vs ``objective``) as SVG.

    Output is byte-for-byte reproducible for the same input: the SVG id salt
    is fixed and the date stamp is omitted.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    header, cols = read_table(csv_path)
    x = header[0] if x is None else x
    if y is None:
        y = ["objective"] if "objective" in cols else [h for h in header if h != x][:1]
    elif isinstance(y, str):
        y = [y]
    for name in [x, *y]:
        if name not in cols:
            raise ParseError(f"{csv_path}: no column named {name!r}")

    with matplotlib.rc_context({"svg.hashsalt": "gqab", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        for name in y:
            ax.plot(cols[x], cols[name], marker="o", markersize=3, linewidth=1.2, label=name, gid=f"series-{name}")
        ax.set_xlabel(x)
        ax.set_ylabel(", ".join(y))
        if title:
            ax.set_title(title)
        if len(y) > 1:
            ax.legend()
        ax.grid(True, linewidth=0.4)
        fig.tight_layout()
        out = Path(out_path)
        fig.savefig(out, format="svg", metadata={"Date": None})
        plt.close(fig)
    return out
