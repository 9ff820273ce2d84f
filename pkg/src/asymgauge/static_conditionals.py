"""Conditional probabilities read out of static word embeddings.

A direction-free vector space is turned into conditionals by projecting
candidate words onto the conditioning word's direction and softmaxing the
projections over a support set. The support is the evaluation vocabulary,
not the whole table, so probabilities are comparable across resources
probed on the same pairs.

Dual-space tables keep separate word and context matrices; conditioning
uses the word space, prediction candidates come from the context space.
"""

from __future__ import annotations

import logging
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    AbsentWordError,
    ConfigurationError,
    DimensionError,
    ParseError,
)
from .evocation_data import ConditionalTable, _iter_lines

logger = logging.getLogger(__name__)

__all__ = [
    "VectorTable",
    "DualVectorTable",
    "load_vectors",
    "load_dual_vectors",
    "projection",
    "cosine",
    "conditional",
    "SoftmaxConditionals",
]


class VectorTable:
    """Read-only word -> vector map with a fixed dimension."""

    def __init__(self, name: str, vectors: dict[str, np.ndarray], dim: int):
        self.name = name
        self.vectors = vectors
        self.dim = dim

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def vocabulary(self) -> set[str]:
        return set(self.vectors)

    def query_vector(self, word: str) -> np.ndarray:
        """Vector used when the word conditions (the 'given' side)."""
        v = self.vectors.get(word)
        if v is None:
            raise AbsentWordError(word, f"vector table {self.name!r}")
        return v

    def target_vector(self, word: str) -> np.ndarray:
        """Vector used when the word is predicted. Same space here."""
        return self.query_vector(word)


class DualVectorTable:
    """Separate conditioning (word) and prediction (context) spaces."""

    def __init__(self, name: str, word_table: VectorTable, context_table: VectorTable):
        if word_table.dim != context_table.dim:
            raise DimensionError(
                f"word space is {word_table.dim}-d but context space is "
                f"{context_table.dim}-d"
            )
        self.name = name
        self.word_table = word_table
        self.context_table = context_table
        self.dim = word_table.dim

    def __contains__(self, word: str) -> bool:
        return word in self.word_table and word in self.context_table

    def vocabulary(self) -> set[str]:
        return self.word_table.vocabulary() & self.context_table.vocabulary()

    def query_vector(self, word: str) -> np.ndarray:
        return self.word_table.query_vector(word)

    def target_vector(self, word: str) -> np.ndarray:
        return self.context_table.query_vector(word)


def load_vectors(source, name: str = "vectors") -> VectorTable:
    """Read whitespace-separated text vectors, one word per line.

    An optional first line ``count dim`` (two integers) is accepted and
    checked against the rows that follow. Words are lowercased; duplicates
    after folding keep the first row. Zero vectors are dropped (they have
    no direction to project onto). Both drops get one summary warning.
    Inconsistent dimensions and non-finite values are hard parse errors.
    """
    vectors: dict[str, np.ndarray] = {}
    dim: int | None = None
    declared: tuple[int, int] | None = None
    duplicates = 0
    zeros = 0
    first_row = True
    for line_no, line in enumerate(_iter_lines(source), start=1):
        line = line.rstrip("\n").rstrip("\r")
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if first_row and len(fields) == 2:
            try:
                declared = (int(fields[0]), int(fields[1]))
                first_row = False
                continue
            except ValueError:
                pass  # a word with a 1-d vector, fall through
        first_row = False
        word = fields[0].lower()
        try:
            values = np.array([float(f) for f in fields[1:]], dtype=np.float64)
        except ValueError:
            raise ParseError("unparseable vector component", line_no) from None
        if dim is None:
            dim = len(values)
            if dim == 0:
                raise ParseError("row has a word but no vector", line_no)
            if declared is not None and declared[1] != dim:
                raise ParseError(
                    f"header declares dim {declared[1]} but rows have {dim}", line_no
                )
        elif len(values) != dim:
            raise ParseError(
                f"expected {dim} components, got {len(values)}", line_no
            )
        if not np.isfinite(values).all():
            raise ParseError("non-finite vector component", line_no)
        if not values.any():
            zeros += 1
            continue
        if word in vectors:
            duplicates += 1
            continue
        values.setflags(write=False)
        vectors[word] = values
    if dim is None:
        raise ParseError("no vector rows found")
    if duplicates:
        logger.warning("%s: dropped %d duplicate words (first row kept)", name, duplicates)
    if zeros:
        logger.warning("%s: dropped %d zero vectors", name, zeros)
    return VectorTable(name=name, vectors=vectors, dim=dim)


def load_dual_vectors(word_source, context_source, name: str = "dual") -> DualVectorTable:
    word_table = load_vectors(word_source, name=f"{name}:word")
    context_table = load_vectors(context_source, name=f"{name}:context")
    return DualVectorTable(name=name, word_table=word_table, context_table=context_table)


def projection(table, b: str, a: str) -> float:
    """Scalar projection of b's vector onto a's direction."""
    u = table.query_vector(a)
    v = table.target_vector(b)
    return float(v @ u) / float(np.linalg.norm(u))


def cosine(table, a: str, b: str) -> float:
    u = table.query_vector(a)
    v = table.query_vector(b)
    return float(u @ v) / (float(np.linalg.norm(u)) * float(np.linalg.norm(v)))


class SoftmaxConditionals:
    """Softmax of projections over a fixed support, with per-cue caching.

    The support is sorted once at construction so the softmax denominator
    is summed in a canonical order; repeated runs produce bit-identical
    probabilities. The per-cue cache holds (max, denominator, unit vector)
    and is idempotent: concurrent fills recompute the same values.
    """

    def __init__(self, table, support: Iterable[str]):
        self.table = table
        self.support = sorted(set(support))
        if not self.support:
            raise ConfigurationError("support set is empty")
        self._matrix = np.stack([table.target_vector(w) for w in self.support])
        self._column = {w: i for i, w in enumerate(self.support)}
        self._cue_cache: dict[str, tuple[float, float, np.ndarray]] = {}

    def _cue_state(self, a: str) -> tuple[float, float, np.ndarray]:
        state = self._cue_cache.get(a)
        if state is None:
            u = self.table.query_vector(a)
            unit = u / float(np.linalg.norm(u))
            proj = self._matrix @ unit
            peak = float(proj.max())
            denom = float(np.exp(proj - peak).sum())
            state = (peak, denom, unit)
            self._cue_cache[a] = state
        return state

    def prob(self, a: str, b: str) -> float:
        """P(b | a) over the support; b must be a support member."""
        col = self._column.get(b)
        if col is None:
            raise ConfigurationError(f"word {b!r} is not in the support set")
        peak, denom, unit = self._cue_state(a)
        proj_b = float(self._matrix[col] @ unit)
        return math.exp(proj_b - peak) / denom

    def table_for_pairs(
        self, pairs: Sequence[tuple[str, str]], resource_id: str | None = None
    ) -> ConditionalTable:
        """Both directional conditionals for each unordered pair.

        Pairs with a word missing from the underlying vector table are
        skipped (they fall out at vocabulary intersection); pairs with a
        word missing from the support are an error, since that breaks the
        softmax contract.
        """
        probs: dict[tuple[str, str], float] = {}
        for a, b in pairs:
            if a not in self.table or b not in self.table:
                continue
            probs[(a, b)] = self.prob(a, b)
            probs[(b, a)] = self.prob(b, a)
        return ConditionalTable(
            resource_id=resource_id or getattr(self.table, "name", "static"),
            probs=probs,
        )


def conditional(table, a: str, b: str, support: Iterable[str]) -> float:
    """One-off P(b | a); builds a throwaway conditioner.

    For anything beyond a couple of queries hold a SoftmaxConditionals
    instance instead, which caches per-cue denominators.
    """
    return SoftmaxConditionals(table, support).prob(a, b)
