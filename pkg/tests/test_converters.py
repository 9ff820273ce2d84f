"""Standalone dataset converters: native formats to the canonical TSV.

The SWOW test builds a 100-row participant-level fixture and checks the
converted output against an independent spreadsheet-style sum of the
response slots, then pushes the result through the normal ingest path.
"""

from __future__ import annotations

import csv
import random
import subprocess
import sys
from collections import Counter
from pathlib import Path

import pytest

from asymgauge.evocation_data import ingest_evocation

TOOLS = Path(__file__).resolve().parent.parent / "tools"

CUES = ["dog", "bread", "king", "Ice Cream", "fire"]
RESPONSES = ["cat", "butter", "queen", "cone", "smoke", "heat", "crown", "loaf"]
MARKERS = ["No more responses", "Unknown word", "", "NA"]


def run_tool(script: str, *args: str) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, str(TOOLS / script), *map(str, args)],
        capture_output=True,
        text=True,
    )


def write_swow_fixture(path: Path, rows: int = 100) -> list[dict]:
    """Participant-level CSV in the distributed shape, extra columns included."""
    rng = random.Random(20240817)
    records = []
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(
            handle, fieldnames=["participantID", "age", "cue", "R1", "R2", "R3"]
        )
        writer.writeheader()
        for i in range(rows):
            record = {
                "participantID": str(1000 + i),
                "age": str(rng.randrange(18, 80)),
                "cue": rng.choice(CUES),
                "R1": rng.choice(RESPONSES),
                "R2": rng.choice(RESPONSES + MARKERS),
                "R3": rng.choice(RESPONSES + MARKERS * 2),
            }
            writer.writerow(record)
            records.append(record)
    return records


def spreadsheet_sums(records: list[dict]) -> tuple[Counter, Counter]:
    """Independent tally: per-cue totals and per-(cue, response) counts."""
    drop = {m.lower() for m in MARKERS}
    per_cue: Counter = Counter()
    per_pair: Counter = Counter()
    for record in records:
        cue = "_".join(record["cue"].lower().split())
        for slot in ("R1", "R2", "R3"):
            answer = record[slot].strip()
            if answer.lower() in drop:
                continue
            per_cue[cue] += 1
            per_pair[(cue, "_".join(answer.lower().split()))] += 1
    return per_cue, per_pair


def read_tsv(path: Path) -> list[tuple[str, str, int]]:
    rows = []
    for line in path.read_text(encoding="utf-8").splitlines():
        cue, response, count = line.split("\t")
        rows.append((cue, response, int(count)))
    return rows


def test_swow_converter_matches_spreadsheet_sum(tmp_path):
    source = tmp_path / "swow_sample.csv"
    records = write_swow_fixture(source, rows=100)
    out = tmp_path / "swow.tsv"
    done = run_tool("convert_swow.py", source, out)
    assert done.returncode == 0, done.stderr

    per_cue, per_pair = spreadsheet_sums(records)
    rows = read_tsv(out)
    assert Counter({(c, r): n for c, r, n in rows}) == per_pair
    # uniform slot weighting: per-cue totals are plain slot sums
    totals: Counter = Counter()
    for cue, _, count in rows:
        totals[cue] += count
    assert totals == per_cue

    # and the output is directly ingestible
    dataset = ingest_evocation(out, "swow_sample")
    assert dataset.cue_totals == dict(per_cue)
    assert "ice_cream" in dataset.cue_totals  # multiword folded to underscores


def test_swow_converter_requires_slot_columns(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("cue,R1\ndog,cat\n", encoding="utf-8")
    done = run_tool("convert_swow.py", bad, tmp_path / "out.tsv")
    assert done.returncode != 0
    assert "R2" in done.stderr


def test_usf_converter_extracts_counts(tmp_path):
    source = tmp_path / "usf.csv"
    source.write_text(
        "CUE, TARGET, NORMED?, #G, #P, FSG\n"
        "DOG, CAT, YES, 150, 90, .60\n"
        "DOG, BONE, YES, 150, 20, .13\n"
        "ICE CREAM, CONE, YES, 140, 55, .39\n"
        "DOG, CAT, YES, 152, 3, .02\n"
        "BAD, ROW, NO, 10, x, .1\n",
        encoding="utf-8",
    )
    out = tmp_path / "usf.tsv"
    done = run_tool("convert_usf_fa.py", source, out)
    assert done.returncode == 0, done.stderr
    assert read_tsv(out) == [
        ("dog", "bone", 20),
        ("dog", "cat", 93),
        ("ice_cream", "cone", 55),
    ]
    assert "1 rows skipped" in done.stderr


@pytest.mark.parametrize("delimiter", ["\t", ","])
def test_eat_converter_folds_case_and_sums(tmp_path, delimiter):
    source = tmp_path / "eat.txt"
    rows = [
        ("STIMULUS", "RESPONSE", "COUNT"),  # header: skipped, count not numeric
        ("DOG", "CAT", "12"),
        ("Dog", "cat", "3"),
        ("KING", "QUEEN", "9"),
        ("KING", "", "4"),  # malformed: skipped
    ]
    source.write_text(
        "".join(delimiter.join(row) + "\n" for row in rows), encoding="utf-8"
    )
    out = tmp_path / "eat.tsv"
    done = run_tool("convert_eat.py", source, out)
    assert done.returncode == 0, done.stderr
    assert read_tsv(out) == [("dog", "cat", 15), ("king", "queen", 9)]
    assert "2 rows skipped" in done.stderr
