#!/usr/bin/env python3
"""Convert a SWOW participant-response CSV to the canonical 3-column TSV.

Input: the Small World of Words English distribution in its
participant-level form, a CSV whose header names a ``cue`` column and
three response-slot columns ``R1``, ``R2``, ``R3`` (any other columns
are ignored). Each data row is one participant's three answers to one
cue.

The three response slots are summed with uniform weight: an R3 answer
counts exactly as much as an R1 answer. The source does not rank slots
by strength and no weighting scheme is assumed; if slot position turns
out to matter for a study, reconvert with a different tool rather than
reinterpreting this output.

Slot entries that mark a non-response are dropped: empty cells and the
markers "No more responses", "Unknown word", "NA" (case-insensitive).

Output rows are ``cue<TAB>response<TAB>count`` with words lowercased
and internal whitespace joined by underscores (the pipeline's canonical
word form), sorted, duplicates summed.

Usage: convert_swow.py INPUT.csv OUTPUT.tsv
"""

from __future__ import annotations

import argparse
import csv
import sys
from collections import Counter
from pathlib import Path

SLOT_COLUMNS = ("R1", "R2", "R3")
NON_RESPONSES = {"", "no more responses", "unknown word", "na"}


def normalize(raw: str) -> str:
    return "_".join(raw.strip().lower().split())


def convert(in_path: Path, out_path: Path) -> tuple[int, int]:
    counts: Counter[tuple[str, str]] = Counter()
    rows = 0
    with open(in_path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        missing = [c for c in ("cue", *SLOT_COLUMNS) if c not in (reader.fieldnames or [])]
        if missing:
            raise SystemExit(f"input lacks required columns: {', '.join(missing)}")
        for row in reader:
            rows += 1
            cue = normalize(row["cue"] or "")
            if not cue:
                continue
            for slot in SLOT_COLUMNS:
                response = (row[slot] or "").strip()
                if response.lower() in NON_RESPONSES:
                    continue
                counts[(cue, normalize(response))] += 1
    with open(out_path, "w", encoding="utf-8") as handle:
        for (cue, response), n in sorted(counts.items()):
            handle.write(f"{cue}\t{response}\t{n}\n")
    return rows, len(counts)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("input", type=Path, help="participant-level SWOW CSV")
    parser.add_argument("output", type=Path, help="canonical 3-column TSV to write")
    args = parser.parse_args()
    rows, pairs = convert(args.input, args.output)
    print(f"{args.output}: {pairs} cue-response rows from {rows} participant rows",
          file=sys.stderr)


if __name__ == "__main__":
    main()
