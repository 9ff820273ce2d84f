"""Directional relatedness metrics.

The primitive quantity is the log asymmetry of a word pair: how much more
likely b is given a than a given b, as a difference of natural-log
conditionals. Everything else is built on top: per-relation averages of
the asymmetry, rank agreement between two resources' asymmetry maps,
thresholded direction agreement, factor binning, and a geometric-mean
similarity read off the same conditionals.

Rank correlation uses average ranks for ties and is intentionally strict:
a constant input is an error, never a silent NaN.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.special import stdtr

from .errors import (
    CoverageError,
    DimensionError,
    DomainError,
    UndefinedCorrelationError,
    ValidationError,
)
from .evocation_data import ConditionalTable, normalize_word, _iter_lines

__all__ = [
    "lar",
    "LarMap",
    "lar_map",
    "alar",
    "average_ranks",
    "spearman",
    "spearman_pvalue_t",
    "spearman_pvalue_exact",
    "cam",
    "direction_sign",
    "directional_accuracy",
    "bin_analysis",
    "geometric_mean_similarity",
    "similarity_eval",
    "SimilarityEvalResult",
    "read_similarity_gold",
]


def _check_prob(p: float, label: str) -> None:
    if not (0.0 < p <= 1.0) or math.isnan(p):
        raise DomainError(f"{label} must be in (0, 1], got {p!r}")


def lar(p_b_given_a: float, p_a_given_b: float) -> float:
    """Log asymmetry: ln P(b|a) - ln P(a|b).

    Positive means a evokes b more strongly than the reverse. Exactly
    antisymmetric under swapping the two arguments.
    """
    _check_prob(p_b_given_a, "P(b|a)")
    _check_prob(p_a_given_b, "P(a|b)")
    return math.log(p_b_given_a) - math.log(p_a_given_b)


@dataclass(frozen=True)
class LarMap:
    """Ordered pair -> log asymmetry, for one resource."""

    resource_id: str
    entries: dict[tuple[str, str], float] = field(default_factory=dict)

    def get(self, a: str, b: str) -> float | None:
        """Asymmetry for (a, b), using the antisymmetric flip if only the
        opposite orientation is stored."""
        value = self.entries.get((a, b))
        if value is None:
            rev = self.entries.get((b, a))
            return None if rev is None else -rev
        return value

    def __len__(self) -> int:
        return len(self.entries)


def lar_map(
    table: ConditionalTable, pairs: Iterable[tuple[str, str]]
) -> LarMap:
    """Compute the asymmetry of each ordered pair from a conditional table.

    Both directions must be present in the table; pairs with a missing
    direction are reported together in one CoverageError.
    """
    entries: dict[tuple[str, str], float] = {}
    missing: list[tuple[str, str]] = []
    for a, b in pairs:
        p_ba = table.get(a, b)
        p_ab = table.get(b, a)
        if p_ba is None or p_ab is None:
            missing.append((a, b))
            continue
        entries[(a, b)] = lar(p_ba, p_ab)
    if missing:
        raise CoverageError(
            f"table {table.resource_id!r} lacks a direction for", missing
        )
    return LarMap(resource_id=table.resource_id, entries=entries)


def alar(lars: LarMap, pairs: Sequence[tuple[str, str]]) -> float:
    """Mean asymmetry over an ordered pair set."""
    if not pairs:
        raise ValidationError("cannot average over an empty pair set")
    missing = [p for p in pairs if lars.get(*p) is None]
    if missing:
        raise CoverageError(f"asymmetry map {lars.resource_id!r} is missing", missing)
    return math.fsum(lars.get(a, b) for a, b in pairs) / len(pairs)


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks; tied values share the mean of their positions."""
    v = np.asarray(values, dtype=float)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v), dtype=float)
    i = 0
    while i < len(v):
        j = i
        while j + 1 < len(v) and v[order[j + 1]] == v[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Rank correlation with average-rank ties.

    Pearson correlation of the two rank vectors. Raises DimensionError on
    length mismatch and UndefinedCorrelationError when either input is
    constant (zero rank variance), rather than returning NaN.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DimensionError(f"mismatched vectors: {x.shape} vs {y.shape}")
    if len(x) < 2:
        raise UndefinedCorrelationError("need at least two observations")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise DomainError("rank correlation inputs must be finite")
    rx = average_ranks(x)
    ry = average_ranks(y)
    if np.ptp(rx) == 0.0 or np.ptp(ry) == 0.0:
        raise UndefinedCorrelationError("constant vector has no rank ordering")
    if np.array_equal(rx, ry):
        return 1.0  # sqrt rounding must not push self-correlation off 1
    rx -= rx.mean()
    ry -= ry.mean()
    rho = float(rx @ ry) / math.sqrt(float(rx @ rx) * float(ry @ ry))
    return max(-1.0, min(1.0, rho))


def spearman_pvalue_t(rho: float, n: int) -> float:
    """Two-sided significance via the t approximation with n - 2 df."""
    if n < 3:
        raise DomainError("t approximation needs n >= 3")
    if abs(rho) >= 1.0:
        return 0.0
    df = n - 2
    t = abs(rho) * math.sqrt(df / (1.0 - rho * rho))
    return float(2.0 * stdtr(df, -t))


def spearman_pvalue_exact(x: Sequence[float], y: Sequence[float]) -> float:
    """Two-sided permutation p-value, exact over all n! orderings.

    Only for tiny samples: n is capped at 10 (3.6M permutations). Ties are
    handled by permuting the average-rank vector, i.e. the test conditions
    on the observed tie pattern.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise DimensionError("mismatched vectors")
    n = len(x)
    if n > 10:
        raise ValidationError(f"exact permutation test capped at n=10, got {n}")
    observed = abs(spearman(x, y))
    rx = average_ranks(x)
    ry = average_ranks(y)
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    den = math.sqrt(float(rx @ rx) * float(ry @ ry))

    hits = 0
    total = 0
    chunk: list[tuple[float, ...]] = []
    # a hair of slack so permutations tied with the observed value count
    threshold = observed - 1e-12

    def flush(chunk_rows: list[tuple[float, ...]]) -> int:
        mat = np.array(chunk_rows)
        r = (mat @ rx) / den
        return int(np.count_nonzero(np.abs(r) >= threshold))

    for perm in itertools.permutations(ry):
        chunk.append(perm)
        total += 1
        if len(chunk) == 100_000:
            hits += flush(chunk)
            chunk = []
    if chunk:
        hits += flush(chunk)
    return hits / total


def cam(
    pairs: Sequence[tuple[str, str]], lars_i: LarMap, lars_j: LarMap
) -> float:
    """Rank agreement of two asymmetry maps over a shared pair set.

    Walks the pair set once, pulls the asymmetry of each pair from both
    maps, and correlates the two aligned vectors. Invariant to flipping
    the orientation convention of every pair, since both maps negate
    together.
    """
    if len(pairs) < 2:
        raise ValidationError("need at least two shared pairs")
    vec_i: list[float] = []
    vec_j: list[float] = []
    missing: list[tuple[str, str]] = []
    for a, b in pairs:
        vi = lars_i.get(a, b)
        vj = lars_j.get(a, b)
        if vi is None or vj is None:
            missing.append((a, b))
            continue
        vec_i.append(vi)
        vec_j.append(vj)
    if missing:
        raise CoverageError("pairs missing from an asymmetry map", missing)
    return spearman(vec_i, vec_j)


def direction_sign(value: float, gamma: float) -> int:
    """Thresholded direction: +1 above gamma, -1 below -gamma, else 0."""
    if gamma < 0:
        raise DomainError(f"gamma must be nonnegative, got {gamma}")
    if value > gamma:
        return 1
    if value < -gamma:
        return -1
    return 0


def directional_accuracy(
    lars_ref: LarMap,
    lars_other: LarMap,
    pairs: Sequence[tuple[str, str]],
    gamma: float,
) -> float:
    """Fraction of pairs whose thresholded directions agree."""
    if not pairs:
        raise ValidationError("cannot score an empty pair set")
    missing = [p for p in pairs if lars_ref.get(*p) is None or lars_other.get(*p) is None]
    if missing:
        raise CoverageError("pairs missing from an asymmetry map", missing)
    agree = sum(
        1
        for a, b in pairs
        if direction_sign(lars_ref.get(a, b), gamma)
        == direction_sign(lars_other.get(a, b), gamma)
    )
    return agree / len(pairs)


def bin_analysis(
    factor_log: Sequence[tuple[tuple[str, str], float]],
    accuracy_fn: Callable[[tuple[str, str]], float],
    bin_size: int,
) -> list[tuple[float, float, int]]:
    """Mean factor and mean per-pair accuracy over consecutive sorted bins.

    Pairs are sorted ascending by factor (stable, so equal factors keep
    input order) and chopped into runs of ``bin_size``. A trailing partial
    bin smaller than a quarter of ``bin_size`` is dropped as too noisy to
    plot. Returns (mean factor, mean accuracy, pair count) per bin.
    """
    if bin_size <= 0:
        raise ValidationError(f"bin_size must be positive, got {bin_size}")
    ordered = sorted(factor_log, key=lambda item: item[1])
    bins: list[tuple[float, float, int]] = []
    for start in range(0, len(ordered), bin_size):
        chunk = ordered[start : start + bin_size]
        if len(chunk) < bin_size and len(chunk) < bin_size / 4:
            break
        mean_factor = math.fsum(f for _, f in chunk) / len(chunk)
        mean_acc = math.fsum(accuracy_fn(pair) for pair, _ in chunk) / len(chunk)
        bins.append((mean_factor, mean_acc, len(chunk)))
    return bins


def geometric_mean_similarity(p_b_given_a: float, p_a_given_b: float) -> float:
    """Symmetric similarity: the geometric mean of the two conditionals."""
    for p, label in ((p_b_given_a, "P(b|a)"), (p_a_given_b, "P(a|b)")):
        if not (0.0 <= p <= 1.0) or math.isnan(p):
            raise DomainError(f"{label} must be in [0, 1], got {p!r}")
    return math.sqrt(p_b_given_a * p_a_given_b)


@dataclass(frozen=True)
class SimilarityEvalResult:
    rho: float
    p_value: float
    n_shared: int
    n_excluded: int


def similarity_eval(
    scores: Mapping[tuple[str, str], float],
    gold: Mapping[tuple[str, str], float],
) -> SimilarityEvalResult:
    """Rank-correlate model similarity scores against human gold ratings.

    Pairs are unordered for similarity, so keys are canonicalized to
    (min, max) on both sides. Gold pairs with no model score are excluded
    and counted; fewer than two shared pairs is a CoverageError.
    """
    canon_scores = {tuple(sorted(k)): v for k, v in scores.items()}
    canon_gold = {tuple(sorted(k)): v for k, v in gold.items()}
    shared = sorted(k for k in canon_gold if k in canon_scores)
    excluded = len(canon_gold) - len(shared)
    if len(shared) < 2:
        raise CoverageError(
            f"only {len(shared)} gold pairs have model scores", shared
        )
    model_vec = [canon_scores[k] for k in shared]
    gold_vec = [canon_gold[k] for k in shared]
    rho = spearman(model_vec, gold_vec)
    p = spearman_pvalue_t(rho, len(shared)) if len(shared) >= 3 else float("nan")
    return SimilarityEvalResult(
        rho=rho, p_value=p, n_shared=len(shared), n_excluded=excluded
    )


def read_similarity_gold(source) -> dict[tuple[str, str], float]:
    """Read ``word1<TAB>word2<TAB>rating`` gold rows; last duplicate wins."""
    from .errors import ParseError

    gold: dict[tuple[str, str], float] = {}
    for line_no, line in enumerate(_iter_lines(source), start=1):
        line = line.rstrip("\n").rstrip("\r")
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise ParseError(f"expected 3 fields, got {len(fields)}", line_no)
        w1, w2, raw = fields
        try:
            rating = float(raw)
        except ValueError:
            raise ParseError(f"bad rating: {raw!r}", line_no) from None
        key = tuple(sorted((normalize_word(w1), normalize_word(w2))))
        gold[key] = rating
    return gold
