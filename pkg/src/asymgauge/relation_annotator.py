"""Annotate word pairs with knowledge-graph relations.

Edges come from a ConceptNet 5 assertion dump. Every relation is treated
as directional, in the direction the edge states it; edge weights are
ignored (an edge either matches a pair or it does not). Pairs that no edge
covers fall back to a catch-all "relatedTo" set ordered lexicographically,
so every evaluated pair belongs to at least one relation set.
"""

from __future__ import annotations

import gzip
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import PreconditionError
from .evocation_data import _iter_lines

logger = logging.getLogger(__name__)

FALLBACK_RELATION = "relatedTo"

__all__ = [
    "KgEdge",
    "RelationPairSet",
    "parse_conceptnet",
    "build_pair_sets",
    "intersect_vocabularies",
    "open_assertions",
    "write_pair_tsv",
    "read_pair_tsv",
    "FALLBACK_RELATION",
]


@dataclass(frozen=True)
class KgEdge:
    head: str
    relation: str
    tail: str


@dataclass(frozen=True)
class RelationPairSet:
    """Ordered (head, tail) pairs sharing one relation. No duplicates."""

    relation: str
    pairs: tuple[tuple[str, str], ...]

    def __len__(self) -> int:
        return len(self.pairs)


def _concept_word(uri: str, language_tag: str) -> str | None:
    # URI shape: /c/<lang>/<word>[/<sense>...]; the word may itself contain
    # underscores, which are kept as-is.
    parts = uri.split("/")
    if len(parts) < 4 or parts[0] != "" or parts[1] != "c":
        return None
    if parts[2] != language_tag:
        return None
    return parts[3] or None


def _relation_name(uri: str) -> str | None:
    parts = uri.split("/")
    if len(parts) < 3 or parts[0] != "" or parts[1] != "r" or not parts[-1]:
        return None
    name = parts[-1]
    return name[0].lower() + name[1:]


def open_assertions(path: str | Path):
    """Open a ConceptNet assertion CSV, transparently ungzipping by suffix."""
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "rt", encoding="utf-8")
    return open(path, "r", encoding="utf-8")


def parse_conceptnet(source, language_tag: str = "en") -> list[KgEdge]:
    """Extract edges between single-language surface words from a dump.

    Each data row is tab-separated: assertion URI, relation URI, start URI,
    end URI, JSON metadata. The metadata (weights, sources) is ignored.
    Rows whose endpoints are not both in ``language_tag``, and malformed
    rows, are skipped; malformed rows are counted and reported in one
    summary warning rather than one warning per row.
    """
    edges: list[KgEdge] = []
    malformed = 0
    for line in _iter_lines(source):
        line = line.rstrip("\n")
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) < 5:
            malformed += 1
            continue
        relation = _relation_name(fields[1])
        if relation is None:
            malformed += 1
            continue
        head = _concept_word(fields[2], language_tag)
        tail = _concept_word(fields[3], language_tag)
        if head is None or tail is None:
            # Usually just a different language; only flag broken URIs.
            if not fields[2].startswith("/c/") or not fields[3].startswith("/c/"):
                malformed += 1
            continue
        edges.append(KgEdge(head=head, relation=relation, tail=tail))
    if malformed:
        logger.warning("skipped %d malformed assertion rows", malformed)
    return edges


def build_pair_sets(
    pairs: Iterable[tuple[str, str]],
    edges: Iterable[KgEdge],
    vocab: set[str],
) -> dict[str, RelationPairSet]:
    """Group evaluation pairs into per-relation ordered pair sets.

    Pairs with a word outside ``vocab`` are dropped. A pair matched by n
    distinct edges contributes one ordered entry per edge (so it can appear
    in several relation sets, or twice in one set with both orientations
    when the dump asserts both directions). Unmatched pairs land in the
    fallback set, oriented (min, max).

    Deterministic: pair order follows the input when it is a sequence and
    lexicographic order when it is an unordered set; duplicate ordered
    entries within one relation are dropped.
    """
    if not vocab:
        raise PreconditionError("vocabulary is empty")
    if isinstance(pairs, (set, frozenset)):
        ordered_input = sorted(pairs)
    else:
        ordered_input = list(pairs)

    canonical: list[tuple[str, str]] = []
    seen_pairs: set[tuple[str, str]] = set()
    for a, b in ordered_input:
        key = (a, b) if a <= b else (b, a)
        if key not in seen_pairs:
            seen_pairs.add(key)
            canonical.append(key)

    by_pair: dict[tuple[str, str], list[KgEdge]] = {}
    seen_edges: set[tuple[str, str, str]] = set()
    for edge in edges:
        if edge.head == edge.tail:
            continue  # self loops carry no direction to measure
        triple = (edge.head, edge.relation, edge.tail)
        if triple in seen_edges:
            continue
        seen_edges.add(triple)
        key = (edge.head, edge.tail) if edge.head <= edge.tail else (edge.tail, edge.head)
        by_pair.setdefault(key, []).append(edge)

    grouped: dict[str, list[tuple[str, str]]] = {}
    dedup: dict[str, set[tuple[str, str]]] = {}
    for key in canonical:
        a, b = key
        if a not in vocab or b not in vocab:
            continue
        matched = by_pair.get(key)
        if matched:
            for edge in matched:
                bucket = grouped.setdefault(edge.relation, [])
                seen = dedup.setdefault(edge.relation, set())
                entry = (edge.head, edge.tail)
                if entry not in seen:
                    seen.add(entry)
                    bucket.append(entry)
        else:
            bucket = grouped.setdefault(FALLBACK_RELATION, [])
            seen = dedup.setdefault(FALLBACK_RELATION, set())
            if key not in seen:
                seen.add(key)
                bucket.append(key)

    return {
        rel: RelationPairSet(relation=rel, pairs=tuple(entries))
        for rel, entries in grouped.items()
    }


def intersect_vocabularies(vocabularies: Iterable[set[str]]) -> set[str]:
    """Words present in every given vocabulary. At least one must be given."""
    vocabularies = list(vocabularies)
    if not vocabularies:
        raise PreconditionError("need at least one vocabulary to intersect")
    common = set(vocabularies[0])
    for vocab in vocabularies[1:]:
        common &= vocab
    return common


def write_pair_tsv(pair_set: RelationPairSet, target, header_lines: Iterable[str] = ()) -> None:
    own = isinstance(target, (str, Path))
    fh = open(target, "w", encoding="utf-8", newline="\n") if own else target
    try:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for a, b in pair_set.pairs:
            fh.write(f"{a}\t{b}\n")
    finally:
        if own:
            fh.close()


def read_pair_tsv(source, relation: str | None = None) -> RelationPairSet:
    pairs: list[tuple[str, str]] = []
    for line in _iter_lines(source):
        line = line.rstrip("\n").rstrip("\r")
        if not line or line.startswith("#"):
            continue
        a, b = line.split("\t")
        pairs.append((a, b))
    if relation is None:
        relation = Path(str(getattr(source, "name", source))).stem
    return RelationPairSet(relation=relation, pairs=tuple(pairs))
