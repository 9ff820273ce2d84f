"""Paragraph-level inverted index over a plain-text corpus.

Paragraphs are the context unit: blank-line-delimited blocks, truncated at
a sentence boundary if they run past 10,000 characters (downstream scorers
have input-length ceilings). The index maps each lowercased token to the
paragraphs it occurs in, with per-occurrence character offsets, so a
co-occurrence query can say exactly where both words sit in the text.

Tokens are maximal runs of letters, digits, apostrophes and hyphens. Words
carrying underscores (multi-word stimuli) never match corpus tokens and
simply find no contexts.
"""

from __future__ import annotations

import logging
import pickle
import random
import re
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .errors import IndexFormatError, ValidationError

logger = logging.getLogger(__name__)

_MAGIC = b"ASYX1"
_VERSION = 1
_MAX_PARAGRAPH_CHARS = 10_000

_TOKEN_RE = re.compile(r"(?:[^\W_]|['-])+", re.UNICODE)
_PARAGRAPH_SPLIT_RE = re.compile(r"\n\s*\n")

__all__ = [
    "ContextRecord",
    "ParagraphStore",
    "tokenize",
    "build_index",
    "read_corpus_dir",
    "read_corpus_stream",
    "contexts_for_pair",
    "co_occurrence_count",
    "context_count",
    "save_index",
    "load_index",
]


def tokenize(text: str) -> list[tuple[str, int]]:
    """(lowercased token, start offset) for every token in reading order."""
    return [(m.group(0).lower(), m.start()) for m in _TOKEN_RE.finditer(text)]


@dataclass(frozen=True)
class ContextRecord:
    """One paragraph containing both words of a pair."""

    ordinal: int
    text: str
    a_offsets: tuple[int, ...]
    b_offsets: tuple[int, ...]

    @property
    def weight_a(self) -> int:
        """Occurrence count of the first word; a paragraph with k
        occurrences counts as k contexts for that word."""
        return len(self.a_offsets)

    @property
    def weight_b(self) -> int:
        return len(self.b_offsets)

    @property
    def min_char_distance(self) -> int:
        return min(abs(oa - ob) for oa in self.a_offsets for ob in self.b_offsets)


class ParagraphStore:
    """Immutable-after-construction paragraph list plus inverted postings."""

    def __init__(
        self,
        paragraphs: list[tuple[str, str]],
        postings: dict[str, list[tuple[int, tuple[int, ...]]]],
        truncated_count: int = 0,
        skipped_docs: int = 0,
    ):
        self.paragraphs = paragraphs  # (doc_id, text), position is the ordinal
        self.postings = postings
        self.truncated_count = truncated_count
        self.skipped_docs = skipped_docs

    def __len__(self) -> int:
        return len(self.paragraphs)

    def text(self, ordinal: int) -> str:
        return self.paragraphs[ordinal][1]


def _truncate_paragraph(text: str) -> str:
    if len(text) <= _MAX_PARAGRAPH_CHARS:
        return text
    head = text[:_MAX_PARAGRAPH_CHARS]
    cut = max(head.rfind("."), head.rfind("!"), head.rfind("?"))
    return head[: cut + 1] if cut > 0 else head


def _split_paragraphs(text: str) -> list[str]:
    return [p.strip() for p in _PARAGRAPH_SPLIT_RE.split(text) if p.strip()]


def build_index(documents: Iterable[tuple[str, str]]) -> ParagraphStore:
    """Index a stream of (doc_id, text) documents.

    Deterministic: ordinals follow document order, postings follow ordinal
    order. Oversized paragraphs are truncated and counted.
    """
    paragraphs: list[tuple[str, str]] = []
    postings: dict[str, list[tuple[int, tuple[int, ...]]]] = {}
    truncated = 0
    for doc_id, text in documents:
        for block in _split_paragraphs(text):
            kept = _truncate_paragraph(block)
            if kept is not block:
                truncated += 1
            ordinal = len(paragraphs)
            paragraphs.append((doc_id, kept))
            offsets_by_word: dict[str, list[int]] = {}
            for token, start in tokenize(kept):
                offsets_by_word.setdefault(token, []).append(start)
            for token, offsets in offsets_by_word.items():
                postings.setdefault(token, []).append((ordinal, tuple(offsets)))
    if truncated:
        logger.warning("truncated %d oversized paragraphs", truncated)
    return ParagraphStore(paragraphs, postings, truncated_count=truncated)


def read_corpus_dir(path: str | Path) -> list[tuple[str, str]]:
    """Read every .txt file in a directory, one document per file.

    Files are taken in sorted name order. Undecodable files are skipped
    with one summary warning.
    """
    path = Path(path)
    docs: list[tuple[str, str]] = []
    skipped = 0
    for file in sorted(path.glob("*.txt")):
        try:
            docs.append((file.stem, file.read_text(encoding="utf-8")))
        except UnicodeDecodeError:
            skipped += 1
    if skipped:
        logger.warning("skipped %d undecodable corpus files", skipped)
    if not docs and skipped == 0:
        raise ValidationError(f"no .txt files under {path}")
    return docs


def read_corpus_stream(fh) -> Iterator[tuple[str, str]]:
    """Split a concatenated stream into documents at form-feed characters."""
    text = fh.read()
    for i, chunk in enumerate(text.split("\f")):
        if chunk.strip():
            yield (f"stream:{i:04d}", chunk)


def _co_occurring_ordinals(
    store: ParagraphStore, a: str, b: str
) -> list[tuple[int, tuple[int, ...], tuple[int, ...]]]:
    a_posts = {ordinal: offs for ordinal, offs in store.postings.get(a.lower(), [])}
    out = []
    for ordinal, b_offs in store.postings.get(b.lower(), []):
        a_offs = a_posts.get(ordinal)
        if a_offs is not None:
            out.append((ordinal, a_offs, b_offs))
    return out


def co_occurrence_count(store: ParagraphStore, a: str, b: str) -> int:
    """Number of paragraphs containing both words."""
    return len(_co_occurring_ordinals(store, a, b))


def context_count(store: ParagraphStore, word: str) -> int:
    """Total occurrences of a word; each occurrence is one context."""
    return sum(len(offs) for _, offs in store.postings.get(word.lower(), []))


def contexts_for_pair(
    store: ParagraphStore, a: str, b: str, cap: int = 1000, seed: int = 0
) -> list[ContextRecord]:
    """Paragraphs containing both words, capped by uniform sampling.

    When more than ``cap`` paragraphs co-occur, a without-replacement
    sample of size ``cap`` is drawn with the given seed; same seed, same
    sample, bit for bit. Records come back in ordinal order either way.
    """
    if cap <= 0:
        raise ValidationError(f"cap must be positive, got {cap}")
    found = _co_occurring_ordinals(store, a, b)
    if len(found) > cap:
        rng = random.Random(seed)
        found = sorted(rng.sample(found, cap), key=lambda item: item[0])
    return [
        ContextRecord(
            ordinal=ordinal,
            text=store.text(ordinal),
            a_offsets=a_offs,
            b_offsets=b_offs,
        )
        for ordinal, a_offs, b_offs in found
    ]


def save_index(store: ParagraphStore, path: str | Path) -> None:
    """Write the store as a versioned binary file."""
    payload = {
        "paragraphs": store.paragraphs,
        "postings": store.postings,
        "truncated_count": store.truncated_count,
        "skipped_docs": store.skipped_docs,
    }
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack(">H", _VERSION))
        pickle.dump(payload, fh, protocol=4)


def load_index(path: str | Path) -> ParagraphStore:
    with open(path, "rb") as fh:
        magic = fh.read(len(_MAGIC))
        if magic != _MAGIC:
            raise IndexFormatError(f"{path}: not an index file (magic {magic!r})")
        (version,) = struct.unpack(">H", fh.read(2))
        if version != _VERSION:
            raise IndexFormatError(
                f"{path}: index version {version} not supported (expected {_VERSION})"
            )
        payload = pickle.load(fh)
    return ParagraphStore(
        payload["paragraphs"],
        payload["postings"],
        truncated_count=payload["truncated_count"],
        skipped_docs=payload.get("skipped_docs", 0),
    )
