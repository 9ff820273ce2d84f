"""Context framing: sentence splitting, special tokens, mask placement.

A paragraph is framed as ``[CLS] sentence [SEP] sentence [SEP] ...``
with one separator after every sentence. Sentence boundaries come from
a deliberately simple heuristic: a period, question mark, or
exclamation mark followed by whitespace. No abbreviation handling; the
split only decides where separator tokens go, it never alters the
scored text, so a wrong boundary costs one misplaced separator and
nothing else.

Character offsets are tracked per token through tokenization so the
requested occurrence can be located exactly. Over-length inputs are
clipped to a window centered on the mask.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_SENTENCE_BREAK = re.compile(r"(?<=[.?!])\s+")


def sentence_spans(text: str) -> list[tuple[int, int]]:
    """Half-open character spans of the sentences in ``text``.

    Spans never include the inter-sentence whitespace; whitespace-only
    segments are dropped.
    """
    spans = []
    start = 0
    for brk in _SENTENCE_BREAK.finditer(text):
        spans.append((start, brk.start()))
        start = brk.end()
    spans.append((start, len(text)))
    return [(a, b) for a, b in spans if text[a:b].strip()]


@dataclass
class FramedContext:
    """A tokenized paragraph with per-token source character spans.

    ``char_spans[i]`` is the half-open span of ``token_ids[i]`` in the
    original text, or None for special tokens, which have no source.
    """

    token_ids: list[int]
    char_spans: list[tuple[int, int] | None]


def frame(text: str, tokenizer) -> FramedContext:
    """Tokenize ``text`` as [CLS] + sentences, [SEP] after each."""
    ids: list[int] = [tokenizer.cls_token_id]
    spans: list[tuple[int, int] | None] = [None]
    for a, b in sentence_spans(text):
        enc = tokenizer(
            text[a:b], add_special_tokens=False, return_offsets_mapping=True
        )
        for tid, (x, y) in zip(enc["input_ids"], enc["offset_mapping"]):
            ids.append(tid)
            spans.append((a + x, a + y))
        ids.append(tokenizer.sep_token_id)
        spans.append(None)
    return FramedContext(ids, spans)


def aligned_token_index(framed: FramedContext, start: int, end: int) -> int | None:
    """Index of the single token covering exactly [start, end).

    None when the slice does not sit on one token's boundaries, e.g. an
    offset into the middle of a longer word: the occurrence cannot then
    be replaced by one mask token.
    """
    for i, span in enumerate(framed.char_spans):
        if span == (start, end):
            return i
    return None


def centered_window(
    token_ids: list[int],
    mask_index: int,
    max_len: int,
    cls_id: int,
    sep_id: int,
) -> tuple[list[int], int, bool]:
    """Clip an over-length sequence around the mask.

    Keeps [CLS] in front and a window of up to max_len - 2 tokens
    centered on the mask, then closes with [SEP] unless the window
    already ends on one. Returns (ids, new mask index, truncated flag).
    Requires max_len >= 4 and mask_index >= 1 (never the [CLS] slot).
    """
    if len(token_ids) <= max_len:
        return token_ids, mask_index, False
    budget = max_len - 2
    body = token_ids[1:]
    m = mask_index - 1
    start = min(max(m - budget // 2, 0), len(body) - budget)
    window = body[start : start + budget]
    out = [cls_id] + window
    if window[-1] != sep_id:
        out.append(sep_id)
    return out, 1 + (m - start), True
