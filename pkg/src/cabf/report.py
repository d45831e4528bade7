"""Per-class census tables from sweep counters (CSV, aligned text or LaTeX rows)."""

from __future__ import annotations

import csv
import io

from .affine import default_registry
from .sweep import ClassCounters
from .transforms import algebraic_degree

FORMATS = ("csv", "text", "latex")
TABLES = ("properties", "preservation")

# (header, counter column) pairs; every count is followed by its percentage.
PROPERTY_COLUMNS = [
    ("sac", "sac"), ("ci1", "ci1"), ("balanced", "balanced"),
    ("pc2", "pc2"), ("pc3", "pc3"), ("pc4", "pc4"), ("pc5", "pc5"),
]
# The preservation table merges PC 2..5 into one column; PC2 preservation bounds the rest.
PRESERVATION_COLUMNS = [
    ("sac_pres", "sac_pres"), ("ci1_pres", "ci1_pres"), ("balanced_pres", "balanced_pres"),
    ("pc_pres", "pc2_pres"), ("deg_ge_pres", "deg_ge_pres"), ("nonlin_pres", "nonlin_pres"),
]


def floor_percent(count: int, total: int) -> str:
    """100 * count / total rounded down to 4 decimals, trailing zeros dropped."""
    if total <= 0:
        return "0"
    q = count * 1_000_000 // total
    whole, frac = divmod(q, 10_000)
    return f"{whole}.{frac:04d}".rstrip("0").rstrip(".")


def _header(table: str) -> list[str]:
    if table == "properties":
        out = ["class", "degree", "linear"]
        for name, _ in PROPERTY_COLUMNS:
            out += [f"{name}_count", f"{name}_pct"]
    else:
        out = ["class"]
        for name, _ in PRESERVATION_COLUMNS:
            out += [name, f"{name}_pct"]
    return out


def rows(counters: ClassCounters, table: str = "properties") -> list[list[str]]:
    """Header plus one row per class plus a Total row."""
    if table not in TABLES:
        raise ValueError(f"unknown table {table!r}; choose from {TABLES}")
    registry = default_registry()
    cols = PROPERTY_COLUMNS if table == "properties" else PRESERVATION_COLUMNS
    out = [_header(table)]
    totals = counters.totals()
    for entry in registry:
        r = counters.row(entry.rep_hex)
        line = [entry.rep_hex]
        if table == "properties":
            degree = algebraic_degree(entry.rep)
            line += [str(degree), "YES" if degree <= 1 else "NO"]
        for _, key in cols:
            line += [str(r[key]), floor_percent(r[key], r["total"])]
        out.append(line)
    line = ["Total"] + (["", ""] if table == "properties" else [])
    for _, key in cols:
        line += [str(totals[key]), floor_percent(totals[key], totals["total"])]
    out.append(line)
    return out


def render(counters: ClassCounters, fmt: str = "csv", table: str = "properties",
           comments: list[str] | None = None) -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
    data = rows(counters, table)
    buf = io.StringIO()
    for c in comments or ():
        buf.write(f"# {c}\n")
    if fmt == "csv":
        csv.writer(buf, lineterminator="\n").writerows(data)
    elif fmt == "latex":
        for line in data[1:]:
            buf.write(" & ".join(line) + " \\\\\n")
    else:
        widths = [max(len(line[i]) for line in data) for i in range(len(data[0]))]
        for line in data:
            buf.write("  ".join(cell.rjust(w) for cell, w in zip(line, widths)).rstrip() + "\n")
    return buf.getvalue()
