"""Free-association (evocation) datasets and count-based conditional estimates.

A dataset is a sparse cue -> response -> count map. The conditional
probability of a response given a cue is its count divided by the cue's
total response count. Cue totals are fixed at ingest time, over the full
unfiltered data, and are never recomputed after pair filtering; filtering
only selects which pairs are evaluated, not what the underlying
distribution was.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, TextIO

from .errors import ParseError, PreconditionError, ValidationError

__all__ = [
    "EvocationDataset",
    "ConditionalTable",
    "ingest_evocation",
    "clean_pair_filter",
    "conditionals",
    "pair_vocabulary",
    "write_conditional_tsv",
    "read_conditional_tsv",
]


def normalize_word(raw: str) -> str:
    """Lowercase and join internal whitespace with underscores."""
    return "_".join(raw.strip().lower().split())


@dataclass(frozen=True)
class EvocationDataset:
    """Immutable cue -> response -> count store with frozen cue totals."""

    name: str
    entries: dict[str, dict[str, int]]
    cue_totals: dict[str, int]

    def count(self, cue: str, response: str) -> int:
        return self.entries.get(cue, {}).get(response, 0)

    def vocabulary(self) -> set[str]:
        """All words appearing as a cue or a response."""
        vocab = set(self.entries)
        for responses in self.entries.values():
            vocab.update(responses)
        return vocab

    def __len__(self) -> int:
        return sum(len(r) for r in self.entries.values())


@dataclass(frozen=True)
class ConditionalTable:
    """Sparse map (a, b) -> P(b | a) for one resource.

    Absent pairs are absent, not zero: ``get`` returns None so callers can
    tell "never estimated" apart from "estimated at some tiny value".
    """

    resource_id: str
    probs: dict[tuple[str, str], float] = field(default_factory=dict)

    def get(self, a: str, b: str) -> float | None:
        return self.probs.get((a, b))

    def __contains__(self, pair: tuple[str, str]) -> bool:
        return pair in self.probs

    def __len__(self) -> int:
        return len(self.probs)


def _iter_lines(source: str | Path | TextIO | Iterable[str]) -> Iterator[str]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            yield from fh
    elif isinstance(source, io.TextIOBase):
        yield from source
    else:
        yield from source


def ingest_evocation(source, name: str) -> EvocationDataset:
    """Read canonical TSV rows ``cue<TAB>response<TAB>count`` into a dataset.

    Words are lowercased and internal whitespace becomes an underscore, so
    multi-word stimuli stay single tokens. Duplicate (cue, response) rows
    are summed. Lines starting with ``#`` are metadata and are skipped.

    Raises ParseError for rows that do not have exactly three fields or a
    non-integer count, ValidationError for counts <= 0.
    """
    entries: dict[str, dict[str, int]] = {}
    for line_no, line in enumerate(_iter_lines(source), start=1):
        line = line.rstrip("\n").rstrip("\r")
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(f"expected 3 tab-separated fields, got {len(fields)}", line_no)
        raw_cue, raw_response, raw_count = fields
        try:
            count = int(raw_count)
        except ValueError:
            raise ParseError(f"count is not an integer: {raw_count!r}", line_no) from None
        if count <= 0:
            raise ValidationError(f"line {line_no}: count must be positive, got {count}")
        cue = normalize_word(raw_cue)
        response = normalize_word(raw_response)
        if not cue or not response:
            raise ParseError("empty cue or response", line_no)
        entries.setdefault(cue, {})
        entries[cue][response] = entries[cue].get(response, 0) + count
    if not entries:
        raise ValidationError(f"dataset {name!r}: no data rows")
    totals = {cue: sum(responses.values()) for cue, responses in entries.items()}
    return EvocationDataset(name=name, entries=entries, cue_totals=totals)


def clean_pair_filter(dataset: EvocationDataset) -> set[tuple[str, str]]:
    """Unordered pairs {a, b} observed in both directions.

    A pair survives only if a evoked b at least once and b evoked a at
    least once; one-directional pairs say nothing about asymmetry versus
    sparsity. Pairs are returned as (min, max) tuples. Self pairs (a == a)
    are excluded: a pair needs two distinct members.
    """
    kept: set[tuple[str, str]] = set()
    for cue, responses in dataset.entries.items():
        for response in responses:
            if response == cue:
                continue
            if dataset.count(response, cue) >= 1:
                kept.add((cue, response) if cue < response else (response, cue))
    return kept


def pair_vocabulary(pairs: Iterable[tuple[str, str]]) -> set[str]:
    """All words appearing in a pair collection."""
    vocab: set[str] = set()
    for a, b in pairs:
        vocab.add(a)
        vocab.add(b)
    return vocab


def conditionals(
    dataset: EvocationDataset, pairs: Iterable[tuple[str, str]]
) -> ConditionalTable:
    """Both directional conditionals for each unordered pair.

    P(b | a) = count(a -> b) / total responses to cue a, with the total
    taken over the unfiltered dataset. Every requested pair must have been
    observed in both directions (i.e. be a clean pair); anything else is a
    PreconditionError, because a zero count would make the ratio of the two
    directions meaningless.
    """
    table: dict[tuple[str, str], float] = {}
    for a, b in pairs:
        c_ab = dataset.count(a, b)
        c_ba = dataset.count(b, a)
        if c_ab < 1 or c_ba < 1:
            raise PreconditionError(
                f"pair ({a}, {b}) is not a clean pair in dataset {dataset.name!r}: "
                f"counts {c_ab} / {c_ba}"
            )
        table[(a, b)] = c_ab / dataset.cue_totals[a]
        table[(b, a)] = c_ba / dataset.cue_totals[b]
    return ConditionalTable(resource_id=dataset.name, probs=table)


def write_conditional_tsv(table: ConditionalTable, target, header_lines: Iterable[str] = ()) -> None:
    """Serialize as ``a<TAB>b<TAB>prob`` rows, 17 significant digits.

    17 digits round-trip any float64 exactly. Rows are sorted by (a, b) so
    identical tables serialize byte-identically.
    """
    own = isinstance(target, (str, Path))
    fh = open(target, "w", encoding="utf-8", newline="\n") if own else target
    try:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for (a, b) in sorted(table.probs):
            fh.write(f"{a}\t{b}\t{table.probs[(a, b)]:.17g}\n")
    finally:
        if own:
            fh.close()


def read_conditional_tsv(source, resource_id: str | None = None) -> ConditionalTable:
    """Inverse of write_conditional_tsv. ``#`` lines are skipped."""
    probs: dict[tuple[str, str], float] = {}
    for line_no, line in enumerate(_iter_lines(source), start=1):
        line = line.rstrip("\n").rstrip("\r")
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(f"expected 3 fields, got {len(fields)}", line_no)
        a, b, raw = fields
        try:
            p = float(raw)
        except ValueError:
            raise ParseError(f"bad probability: {raw!r}", line_no) from None
        probs[(a, b)] = p
    if resource_id is None:
        resource_id = getattr(source, "name", None) or "table"
        resource_id = Path(str(resource_id)).stem
    return ConditionalTable(resource_id=resource_id, probs=probs)
