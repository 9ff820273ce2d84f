#!/usr/bin/env python3
"""Convert tabulated EAT stimulus-response counts to the canonical TSV.

Input: the Edinburgh Associative Thesaurus reduced to flat triples, one
``stimulus, response, count`` record per line. The EAT has circulated
in several container formats over the years; this converter stays out
of the scraping business and takes the already-tabulated form, which
every distribution reduces to. Both tab- and comma-separated input are
accepted (sniffed per file), an optional header line is skipped when
its count column is not numeric.

EAT words are historically upper-case; everything is folded to the
pipeline's canonical form (lowercase, internal whitespace joined by
underscores). Duplicate records after folding are summed. Rows whose
count is not a positive integer are skipped with a note on stderr.

Usage: convert_eat.py INPUT OUTPUT.tsv
"""

from __future__ import annotations

import argparse
import csv
import sys
from collections import Counter
from pathlib import Path


def normalize(raw: str) -> str:
    return "_".join(raw.strip().lower().split())


def convert(in_path: Path, out_path: Path) -> tuple[int, int, int]:
    counts: Counter[tuple[str, str]] = Counter()
    rows = skipped = 0
    with open(in_path, newline="", encoding="utf-8") as handle:
        sample = handle.read(4096)
        handle.seek(0)
        delimiter = "\t" if "\t" in sample.splitlines()[0] else ","
        for record in csv.reader(handle, delimiter=delimiter):
            if not record or all(not cell.strip() for cell in record):
                continue
            rows += 1
            if len(record) < 3:
                skipped += 1
                continue
            stimulus, response, raw_count = (cell.strip() for cell in record[:3])
            if not raw_count.isdigit() or int(raw_count) < 1:
                # header line or malformed count
                skipped += 1
                continue
            if not stimulus or not response:
                skipped += 1
                continue
            counts[(normalize(stimulus), normalize(response))] += int(raw_count)
    with open(out_path, "w", encoding="utf-8") as handle:
        for (cue, resp), n in sorted(counts.items()):
            handle.write(f"{cue}\t{resp}\t{n}\n")
    return rows, len(counts), skipped


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("input", type=Path, help="tabulated EAT triples (TSV or CSV)")
    parser.add_argument("output", type=Path, help="canonical 3-column TSV to write")
    args = parser.parse_args()
    rows, pairs, skipped = convert(args.input, args.output)
    note = f", {skipped} rows skipped" if skipped else ""
    print(f"{args.output}: {pairs} cue-response rows from {rows} source rows{note}",
          file=sys.stderr)


if __name__ == "__main__":
    main()
