"""Per-relation metric tables and their serialization.

A report row is one relation; columns are mean asymmetry per resource,
rank agreement (with significance) per compared resource pair, and
thresholded direction agreement per gamma. Two summary rows close the
table: SA weights every relation by its share of all evaluated pairs, SR
does the same after dropping the catch-all relation, whose pairs carry no
curated relation and would otherwise dominate.

Rows only use pairs every involved resource can score. Resources may
legitimately lack pairs (an LM table has no entry for words that never
co-occur), so coverage is reconciled here, once, instead of every metric
call failing; what was excluded is reported next to the result.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import UndefinedCorrelationError, ValidationError
from .evocation_data import ConditionalTable
from .metrics import (
    LarMap,
    alar,
    cam,
    directional_accuracy,
    lar,
    spearman_pvalue_t,
)
from .relation_annotator import FALLBACK_RELATION

__all__ = [
    "ReportRow",
    "MetricReport",
    "lenient_lar_map",
    "assemble_report",
    "write_report_tsv",
    "format_report_text",
    "write_bin_csv",
    "signed_log_scale",
]


@dataclass(frozen=True)
class ReportRow:
    label: str
    count: int
    values: dict[str, float | None]


@dataclass(frozen=True)
class MetricReport:
    columns: tuple[str, ...]
    rows: tuple[ReportRow, ...]
    summary: tuple[ReportRow, ...]
    excluded: dict[str, int]  # relation -> pairs dropped for missing coverage


def lenient_lar_map(
    table: ConditionalTable, pairs: Iterable[tuple[str, str]]
) -> tuple[LarMap, list[tuple[str, str]]]:
    """Asymmetries for the pairs the table covers, plus the uncovered rest."""
    entries: dict[tuple[str, str], float] = {}
    missing: list[tuple[str, str]] = []
    for a, b in pairs:
        p_ba = table.get(a, b)
        p_ab = table.get(b, a)
        if p_ba is None or p_ab is None:
            missing.append((a, b))
        else:
            entries[(a, b)] = lar(p_ba, p_ab)
    return LarMap(resource_id=table.resource_id, entries=entries), missing


def _weighted_summary(
    label: str,
    rows: Sequence[ReportRow],
    columns: Sequence[str],
    skip_relation: str | None = None,
) -> ReportRow:
    kept = [r for r in rows if r.label != skip_relation]
    total = sum(r.count for r in kept)
    values: dict[str, float | None] = {}
    for col in columns:
        if col.startswith("p:"):
            values[col] = None  # averaging p-values is meaningless
            continue
        usable = [(r.count, r.values[col]) for r in kept if r.values[col] is not None]
        mass = sum(c for c, _ in usable)
        if not usable or mass == 0:
            values[col] = None
            continue
        values[col] = math.fsum(c * v for c, v in usable) / mass
    return ReportRow(label=label, count=total, values=values)


def assemble_report(
    relation_pairs: Mapping[str, Sequence[tuple[str, str]]],
    tables: Mapping[str, ConditionalTable],
    compare: Sequence[tuple[str, str]],
    gammas: Sequence[float],
    alar_resources: Sequence[str] | None = None,
    slog_scale: float | None = None,
) -> MetricReport:
    """Build the full per-relation metric table.

    relation_pairs gives each relation's ordered pair set; tables maps
    resource ids to their conditional tables. Every comparison within a
    row runs over the same effective pair set: the relation's pairs that
    all involved resources cover in both directions.

    slog_scale, when given, adds a sign-preserving log view of each mean
    asymmetry column (see signed_log_scale) for plotting.
    """
    involved: list[str] = []
    for i, j in compare:
        for r in (i, j):
            if r not in involved:
                involved.append(r)
    if alar_resources is None:
        alar_resources = list(involved)
    for r in alar_resources:
        if r not in involved:
            involved.append(r)
    for r in involved:
        if r not in tables:
            raise ValidationError(f"no conditional table for resource {r!r}")

    columns: list[str] = [f"alar:{r}" for r in alar_resources]
    if slog_scale is not None:
        columns += [f"alarslog:{r}" for r in alar_resources]
    for i, j in compare:
        columns.append(f"cam:{i}-{j}")
        columns.append(f"p:{i}-{j}")
    for gamma in gammas:
        for i, j in compare:
            columns.append(f"dir:{i}-{j}:g{gamma:g}")

    maps: dict[str, LarMap] = {}
    rows: list[ReportRow] = []
    excluded: dict[str, int] = {}
    for relation in sorted(relation_pairs):
        pairs = list(relation_pairs[relation])
        effective = pairs
        per_resource: dict[str, LarMap] = {}
        for r in involved:
            lmap, _ = lenient_lar_map(tables[r], pairs)
            per_resource[r] = lmap
            effective = [p for p in effective if lmap.get(*p) is not None]
        excluded[relation] = len(pairs) - len(effective)
        if not effective:
            continue
        values: dict[str, float | None] = {}
        for r in alar_resources:
            mean_asym = alar(per_resource[r], effective)
            values[f"alar:{r}"] = mean_asym
            if slog_scale is not None:
                values[f"alarslog:{r}"] = signed_log_scale(mean_asym, slog_scale)
        for i, j in compare:
            if len(effective) >= 2:
                try:
                    rho = cam(effective, per_resource[i], per_resource[j])
                    values[f"cam:{i}-{j}"] = rho
                    values[f"p:{i}-{j}"] = (
                        spearman_pvalue_t(rho, len(effective))
                        if len(effective) >= 3
                        else None
                    )
                except UndefinedCorrelationError:
                    # constant asymmetry vector: agreement is undefined
                    values[f"cam:{i}-{j}"] = None
                    values[f"p:{i}-{j}"] = None
            else:
                values[f"cam:{i}-{j}"] = None
                values[f"p:{i}-{j}"] = None
        for gamma in gammas:
            for i, j in compare:
                values[f"dir:{i}-{j}:g{gamma:g}"] = directional_accuracy(
                    per_resource[i], per_resource[j], effective, gamma
                )
        rows.append(ReportRow(label=relation, count=len(effective), values=values))
        maps.update(per_resource)

    if not rows:
        raise ValidationError("no relation had any fully covered pair")
    summary = (
        _weighted_summary("SA", rows, columns),
        _weighted_summary("SR", rows, columns, skip_relation=FALLBACK_RELATION),
    )
    return MetricReport(
        columns=tuple(columns), rows=tuple(rows), summary=summary, excluded=excluded
    )


def _cell_tsv(value: float | None) -> str:
    return "-" if value is None else f"{value:.17g}"


def write_report_tsv(report: MetricReport, target, header_lines: Iterable[str] = ()) -> None:
    own = isinstance(target, (str, Path))
    fh = open(target, "w", encoding="utf-8", newline="\n") if own else target
    try:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for relation, dropped in sorted(report.excluded.items()):
            if dropped:
                fh.write(f"# excluded {relation}: {dropped} pairs lacking full coverage\n")
        fh.write("relation\tcount\t" + "\t".join(report.columns) + "\n")
        for row in (*report.rows, *report.summary):
            cells = [_cell_tsv(row.values.get(col)) for col in report.columns]
            fh.write(f"{row.label}\t{row.count}\t" + "\t".join(cells) + "\n")
    finally:
        if own:
            fh.close()


def format_report_text(report: MetricReport) -> str:
    """Aligned table for reading, 4 decimal places."""
    headers = ["relation", "count", *report.columns]
    lines_data: list[list[str]] = []
    for row in (*report.rows, *report.summary):
        cells = [row.label, str(row.count)]
        for col in report.columns:
            value = row.values.get(col)
            cells.append("-" if value is None else f"{value:.4f}")
        lines_data.append(cells)
    widths = [
        max(len(headers[k]), *(len(r[k]) for r in lines_data)) for k in range(len(headers))
    ]
    out = ["  ".join(h.ljust(widths[k]) for k, h in enumerate(headers))]
    out.append("  ".join("-" * w for w in widths))
    for cells in lines_data:
        out.append("  ".join(c.ljust(widths[k]) for k, c in enumerate(cells)))
    return "\n".join(out) + "\n"


def write_bin_csv(
    bins: Sequence[tuple[float, float, int]], target, header_lines: Iterable[str] = ()
) -> None:
    own = isinstance(target, (str, Path))
    fh = open(target, "w", encoding="utf-8", newline="\n") if own else target
    try:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("mean_factor,accuracy,n_pairs\n")
        for mean_factor, accuracy, n_pairs in bins:
            fh.write(f"{mean_factor:.17g},{accuracy:.17g},{n_pairs}\n")
    finally:
        if own:
            fh.close()


def signed_log_scale(value: float, scale: float) -> float:
    """Sign-preserving log compression used for plotting wide-range means.

    Zero maps to zero; otherwise sign(v) * ln(scale * |v|). Purely a
    presentation transform for report columns, never an input to metrics.
    """
    if value == 0.0:
        return 0.0
    return math.copysign(math.log(scale * abs(value)), value)
