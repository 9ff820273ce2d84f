#!/usr/bin/env python3
"""Convert USF Free Association norms to the canonical 3-column TSV.

Input: the University of South Florida free association norms appendix
file, a comma-separated table whose header names (at least) ``CUE``,
``TARGET``, and ``#P`` columns; ``#P`` is the number of participants
who produced the target for that cue, which is exactly the raw count
the pipeline wants. Other columns (normed flags, group sizes, strength
ratios) are ignored: strengths are recomputed downstream from counts.

Output rows are ``cue<TAB>response<TAB>count`` with words lowercased
and internal whitespace joined by underscores, sorted, duplicates
summed. Rows whose count is missing or not a positive integer are
skipped with a note on stderr.

Usage: convert_usf_fa.py INPUT.csv OUTPUT.tsv
"""

from __future__ import annotations

import argparse
import csv
import sys
from collections import Counter
from pathlib import Path

REQUIRED = ("CUE", "TARGET", "#P")


def normalize(raw: str) -> str:
    return "_".join(raw.strip().lower().split())


def convert(in_path: Path, out_path: Path) -> tuple[int, int, int]:
    counts: Counter[tuple[str, str]] = Counter()
    rows = skipped = 0
    with open(in_path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        header = [name.strip() for name in reader.fieldnames or []]
        lookup = {name.strip(): name for name in reader.fieldnames or []}
        missing = [c for c in REQUIRED if c not in header]
        if missing:
            raise SystemExit(f"input lacks required columns: {', '.join(missing)}")
        for row in reader:
            rows += 1
            cue = normalize(row[lookup["CUE"]] or "")
            target = normalize(row[lookup["TARGET"]] or "")
            raw_count = (row[lookup["#P"]] or "").strip()
            if not cue or not target or not raw_count.isdigit() or int(raw_count) < 1:
                skipped += 1
                continue
            counts[(cue, target)] += int(raw_count)
    with open(out_path, "w", encoding="utf-8") as handle:
        for (cue, response), n in sorted(counts.items()):
            handle.write(f"{cue}\t{response}\t{n}\n")
    return rows, len(counts), skipped


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("input", type=Path, help="USF norms CSV")
    parser.add_argument("output", type=Path, help="canonical 3-column TSV to write")
    args = parser.parse_args()
    rows, pairs, skipped = convert(args.input, args.output)
    note = f", {skipped} rows skipped" if skipped else ""
    print(f"{args.output}: {pairs} cue-response rows from {rows} source rows{note}",
          file=sys.stderr)


if __name__ == "__main__":
    main()
