"""Conditional probabilities probed from a masked language model.

The model lives behind a scoring channel: newline-delimited JSON requests
go out, one per masked occurrence, and probabilities come back. This
module owns everything around that channel: turning co-occurrence contexts
into scoring tasks, the aggregation arithmetic, checkpointing, and the
channel implementations themselves (in-process callables for tests and
mocks, a subprocess pipe for real scorers).

Aggregation, for the pair (a, b) in the direction "b given a": every
paragraph c containing both words contributes the mean predicted
probability of b over its masked b-occurrences, weighted by how many times
a occurs in c (a paragraph with k occurrences of the conditioning word
counts as k contexts). The weighted sum is divided by the total occurrence
count of a across the corpus, and scaled by population/sample when only a
sample of co-occurring paragraphs was scored. All sums use math.fsum, so
result order cannot change the output.

Wire protocol, one JSON object per line:

    request:  {"id", "text", "offset", "length", "target"}
    response: {"id", "prob"}  or  {"id", "refused": "<reason>"}

A blank line terminates a batch in both directions. The reserved id
``__distsum__`` asks the scorer for its total vocabulary mass at the
masked position, which must come back as 1 within 1e-4. File-based
channels may carry leading ``#`` comment lines; stream channels are pure
JSON lines.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import subprocess
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Mapping, Protocol, Sequence

from .corpus_index import (
    ContextRecord,
    ParagraphStore,
    co_occurrence_count,
    context_count,
    contexts_for_pair,
)
from .errors import (
    IncompleteBatchError,
    PreconditionError,
    ScorerChannelError,
    ScorerProtocolError,
    StaleCheckpointError,
    ValidationError,
)
from .evocation_data import ConditionalTable, _iter_lines
from .relation_annotator import RelationPairSet

PROBE_ID = "__distsum__"
PROBABILITY_FLOOR = 1e-12

__all__ = [
    "ScoringTask",
    "ScoreResult",
    "PairEstimate",
    "FactorRecord",
    "emit_tasks",
    "aggregate",
    "lm_conditional_table",
    "CallableScorer",
    "ProcessScorer",
    "make_scorer",
    "request_line",
    "parse_result_line",
    "write_task_file",
    "read_result_file",
    "distribution_sum_probe",
    "store_fingerprint",
    "PROBE_ID",
    "PROBABILITY_FLOOR",
]


@dataclass(frozen=True)
class ScoringTask:
    """One masked occurrence to score."""

    task_id: str
    context_text: str
    mask_char_offset: int
    target_word: str
    pair: tuple[str, str]
    direction: str  # "b_given_a" masks b; "a_given_b" masks a
    context_ordinal: int

    def __post_init__(self):
        end = self.mask_char_offset + len(self.target_word)
        got = self.context_text[self.mask_char_offset : end].lower()
        if got != self.target_word:
            raise ValidationError(
                f"task {self.task_id}: offset {self.mask_char_offset} reads "
                f"{got!r}, not {self.target_word!r}"
            )
        if self.direction not in ("b_given_a", "a_given_b"):
            raise ValidationError(f"bad direction {self.direction!r}")


@dataclass(frozen=True)
class ScoreResult:
    """Either a probability or a typed refusal, never both."""

    task_id: str
    prob: float | None = None
    refused: str | None = None
    model_id: str = ""

    def __post_init__(self):
        if (self.prob is None) == (self.refused is None):
            raise ValidationError("result must carry exactly one of prob/refused")


@dataclass(frozen=True)
class PairEstimate:
    """Aggregated directional probabilities for one unordered pair."""

    pair: tuple[str, str]
    p_b_given_a: float
    p_a_given_b: float
    n_contexts_used: int
    sum_weight_a: int
    sum_weight_b: int
    total_count_a: int
    total_count_b: int
    population: int
    mean_char_distance: float


@dataclass(frozen=True)
class FactorRecord:
    """Per-pair co-occurrence factors, kept even for pairs with no output."""

    pair: tuple[str, str]
    population: int
    mean_char_distance: float
    n_contexts_used: int
    status: str  # ok | no_context | refused


# ---------------------------------------------------------------------------
# wire protocol


def request_line(task: ScoringTask) -> str:
    return json.dumps(
        {
            "id": task.task_id,
            "text": task.context_text,
            "offset": task.mask_char_offset,
            "length": len(task.target_word),
            "target": task.target_word,
        },
        sort_keys=True,
        separators=(",", ":"),
    )


def parse_result_line(line: str, model_id: str = "") -> ScoreResult:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError:
        raise ScorerChannelError(f"malformed response line: {line!r}") from None
    if not isinstance(obj, dict) or not isinstance(obj.get("id"), str):
        raise ScorerChannelError(f"malformed response line: {line!r}")
    has_prob = "prob" in obj
    has_refused = "refused" in obj
    if has_prob == has_refused:
        raise ScorerProtocolError(
            f"response must carry exactly one of prob/refused: {line!r}"
        )
    if has_refused:
        if not isinstance(obj["refused"], str):
            raise ScorerProtocolError(f"refusal reason must be a string: {line!r}")
        return ScoreResult(task_id=obj["id"], refused=obj["refused"], model_id=model_id)
    prob = obj["prob"]
    if isinstance(prob, bool) or not isinstance(prob, (int, float)) or not math.isfinite(prob):
        raise ScorerProtocolError(f"prob must be a finite number: {line!r}")
    return ScoreResult(task_id=obj["id"], prob=float(prob), model_id=model_id)


def write_task_file(tasks: Iterable[ScoringTask], target, header_lines: Iterable[str] = ()) -> None:
    """Requests as JSON lines, one batch, terminated by a blank line."""
    own = isinstance(target, (str, Path))
    fh = open(target, "w", encoding="utf-8", newline="\n") if own else target
    try:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for task in tasks:
            fh.write(request_line(task) + "\n")
        fh.write("\n")
    finally:
        if own:
            fh.close()


def read_result_file(source, model_id: str = "") -> list[ScoreResult]:
    results = []
    for line in _iter_lines(source):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        results.append(parse_result_line(line, model_id=model_id))
    return results


# ---------------------------------------------------------------------------
# scoring channels


class ScorerChannel(Protocol):
    model_id: str

    def score_batch(self, tasks: Sequence[ScoringTask]) -> list[ScoreResult]: ...


class CallableScorer:
    """In-process channel wrapping fn(task) -> probability or ScoreResult."""

    def __init__(self, fn: Callable[[ScoringTask], float | ScoreResult], model_id: str = "callable"):
        self._fn = fn
        self.model_id = model_id

    def score_batch(self, tasks: Sequence[ScoringTask]) -> list[ScoreResult]:
        out = []
        for task in tasks:
            got = self._fn(task)
            if isinstance(got, ScoreResult):
                out.append(got)
            else:
                out.append(ScoreResult(task_id=task.task_id, prob=float(got), model_id=self.model_id))
        return out


class ProcessScorer:
    """Channel to a scorer subprocess speaking the line protocol on stdio.

    The child is spawned lazily and kept alive across batches; if it dies,
    the next batch respawns it, which is what makes channel errors
    retriable from the caller's side.
    """

    def __init__(self, argv: Sequence[str], model_id: str | None = None):
        self.argv = list(argv)
        self.model_id = model_id or " ".join(self.argv)
        self._proc: subprocess.Popen | None = None

    def _ensure_child(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                self.argv,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="utf-8",
                bufsize=1,
            )
        return self._proc

    def score_batch(self, tasks: Sequence[ScoringTask]) -> list[ScoreResult]:
        proc = self._ensure_child()
        try:
            for task in tasks:
                proc.stdin.write(request_line(task) + "\n")
            proc.stdin.write("\n")
            proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise ScorerChannelError(f"scorer pipe failed: {exc}") from exc
        results = []
        while True:
            line = proc.stdout.readline()
            if line == "":
                raise ScorerChannelError("scorer closed its stream mid-batch")
            line = line.strip()
            if not line:
                break
            results.append(parse_result_line(line, model_id=self.model_id))
        return results

    def close(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            self._proc.wait(timeout=10)
        self._proc = None


def _closed_form_mock(task: ScoringTask) -> float:
    # Deterministic stand-in used by pipeline tests: a small rational that
    # depends only on the mask position, so expected aggregates have a
    # pencil-and-paper closed form.
    if task.task_id == PROBE_ID:
        return 1.0
    return 1.0 / (1.0 + task.mask_char_offset % 7)


MOCK_SCORERS: dict[str, Callable[[ScoringTask], float]] = {
    "closed-form": _closed_form_mock,
}


def make_scorer(channel_spec: str) -> ScorerChannel:
    """Build a channel from a spec string: ``mock:<name>`` or ``cmd:<argv>``."""
    kind, _, rest = channel_spec.partition(":")
    if kind == "mock":
        fn = MOCK_SCORERS.get(rest)
        if fn is None:
            raise ValidationError(
                f"unknown mock scorer {rest!r}; have {sorted(MOCK_SCORERS)}"
            )
        return CallableScorer(fn, model_id=channel_spec)
    if kind == "cmd":
        if not rest.strip():
            raise ValidationError("cmd scorer needs a command line")
        return ProcessScorer(rest.split(), model_id=channel_spec)
    raise ValidationError(f"unknown scorer channel kind {kind!r}")


def distribution_sum_probe(channel: ScorerChannel, template: ScoringTask) -> float:
    """Check the scorer normalizes: full-vocabulary mass must be ~1."""
    probe = replace(template, task_id=PROBE_ID)
    results = [r for r in channel.score_batch([probe]) if r.task_id == PROBE_ID]
    if len(results) != 1 or results[0].prob is None:
        raise ScorerProtocolError("scorer did not answer the distribution probe")
    total = results[0].prob
    if abs(total - 1.0) > 1e-4:
        raise ScorerProtocolError(
            f"scorer distribution sums to {total!r}, expected 1 within 1e-4"
        )
    return total


# ---------------------------------------------------------------------------
# task emission and aggregation


def _task_id(pair: tuple[str, str], ordinal: int, direction: str, offset: int) -> str:
    tag = "ba" if direction == "b_given_a" else "ab"
    return f"{pair[0]}|{pair[1]}|{ordinal}|{tag}|{offset}"


def emit_tasks(contexts: Sequence[ContextRecord], pair: tuple[str, str]) -> list[ScoringTask]:
    """One task per maskable occurrence, both directions.

    Direction "b_given_a" masks each occurrence of b (the predicted word);
    "a_given_b" masks each occurrence of a. Task ids are deterministic
    functions of (pair, paragraph ordinal, direction, offset).
    """
    a, b = pair
    tasks: list[ScoringTask] = []
    for rec in contexts:
        for off in rec.b_offsets:
            tasks.append(
                ScoringTask(
                    task_id=_task_id(pair, rec.ordinal, "b_given_a", off),
                    context_text=rec.text,
                    mask_char_offset=off,
                    target_word=b,
                    pair=pair,
                    direction="b_given_a",
                    context_ordinal=rec.ordinal,
                )
            )
        for off in rec.a_offsets:
            tasks.append(
                ScoringTask(
                    task_id=_task_id(pair, rec.ordinal, "a_given_b", off),
                    context_text=rec.text,
                    mask_char_offset=off,
                    target_word=a,
                    pair=pair,
                    direction="a_given_b",
                    context_ordinal=rec.ordinal,
                )
            )
    return tasks


def _match_results(
    results: Iterable[ScoreResult], tasks: Sequence[ScoringTask]
) -> dict[str, ScoreResult]:
    by_id: dict[str, ScoreResult] = {}
    for r in results:
        if r.task_id in by_id:
            raise ScorerProtocolError(f"duplicate result id {r.task_id!r}")
        by_id[r.task_id] = r
    missing = [t.task_id for t in tasks if t.task_id not in by_id]
    if missing:
        raise IncompleteBatchError(missing)
    return by_id


def aggregate(
    results: Iterable[ScoreResult],
    tasks: Sequence[ScoringTask],
    counts: tuple[int, int],
    sample_info: tuple[int, int],
    mean_char_distance: float = float("nan"),
) -> PairEstimate:
    """Fold per-occurrence probabilities into the two directional estimates.

    counts is (total occurrences of a, total occurrences of b) over the
    whole corpus; sample_info is (co-occurring population P, sample size
    n). With n < P the sampled co-occurrence mass is extrapolated by P/n.
    The estimate is capped at 1.0: extrapolation from a skewed sample can
    overshoot, and a probability cannot.

    Refused results must be handled by the caller beforehand; they are a
    precondition violation here.
    """
    if not tasks:
        raise PreconditionError("no tasks to aggregate")
    population, n = sample_info
    if n <= 0 or population < n:
        raise PreconditionError(f"bad sample info: population={population}, n={n}")
    total_a, total_b = counts
    by_id = _match_results(results, tasks)

    pair = tasks[0].pair
    a, b = pair
    probs_by_ctx: dict[tuple[int, str], list[float]] = {}
    occurrences: dict[tuple[int, str], int] = {}
    for task in tasks:
        if task.pair != pair:
            raise PreconditionError("aggregate called with tasks from several pairs")
        result = by_id[task.task_id]
        if result.refused is not None:
            raise PreconditionError(
                f"refused task {task.task_id!r} passed to aggregate ({result.refused})"
            )
        if not (0.0 <= result.prob <= 1.0):
            raise ScorerProtocolError(
                f"probability {result.prob!r} outside [0, 1] for task {task.task_id!r}"
            )
        key = (task.context_ordinal, task.direction)
        probs_by_ctx.setdefault(key, []).append(result.prob)
        occurrences[key] = occurrences.get(key, 0) + 1

    ordinals = sorted({ordinal for ordinal, _ in probs_by_ctx})
    # occurrences of a word in a context = number of tasks masking it there
    weight_a = {o: occurrences.get((o, "a_given_b"), 0) for o in ordinals}
    weight_b = {o: occurrences.get((o, "b_given_a"), 0) for o in ordinals}

    def mean_prob(ordinal: int, direction: str) -> float:
        vals = probs_by_ctx.get((ordinal, direction))
        return math.fsum(vals) / len(vals) if vals else 0.0

    scale = population / n
    mass_b = math.fsum(weight_a[o] * mean_prob(o, "b_given_a") for o in ordinals)
    mass_a = math.fsum(weight_b[o] * mean_prob(o, "a_given_b") for o in ordinals)
    if total_a <= 0 or total_b <= 0:
        raise PreconditionError("conditioning word with zero corpus occurrences")
    p_b_given_a = min(scale * mass_b / total_a, 1.0)
    p_a_given_b = min(scale * mass_a / total_b, 1.0)

    return PairEstimate(
        pair=pair,
        p_b_given_a=p_b_given_a,
        p_a_given_b=p_a_given_b,
        n_contexts_used=len(ordinals),
        sum_weight_a=sum(weight_a.values()),
        sum_weight_b=sum(weight_b.values()),
        total_count_a=total_a,
        total_count_b=total_b,
        population=population,
        mean_char_distance=mean_char_distance,
    )


# ---------------------------------------------------------------------------
# checkpointing


def store_fingerprint(store: ParagraphStore) -> str:
    h = hashlib.sha256()
    for doc_id, text in store.paragraphs:
        h.update(doc_id.encode("utf-8"))
        h.update(b"\x00")
        h.update(text.encode("utf-8"))
        h.update(b"\x01")
    return h.hexdigest()[:16]


def _state_hash(
    pairs: Sequence[tuple[str, str]],
    store: ParagraphStore,
    scorer_id: str,
    cap: int,
    seed: int,
    floor: float,
) -> str:
    h = hashlib.sha256()
    h.update(f"cap={cap};seed={seed};floor={floor!r};scorer={scorer_id};".encode())
    h.update(store_fingerprint(store).encode())
    for a, b in pairs:
        h.update(f"{a}\t{b}\n".encode("utf-8"))
    return h.hexdigest()[:16]


_CKPT_FIELDS = (
    "status a b p_b_given_a p_a_given_b n_contexts sum_weight_a sum_weight_b "
    "total_count_a total_count_b population mean_char_distance"
).split()


@dataclass(frozen=True)
class _CheckpointRow:
    status: str
    estimate: PairEstimate | None
    factor: FactorRecord


def _format_ckpt_row(row: _CheckpointRow) -> str:
    f = row.factor
    a, b = f.pair
    if row.estimate is None:
        est = ["-", "-", "0", "0", "0", "0", "0"]
    else:
        e = row.estimate
        est = [
            f"{e.p_b_given_a:.17g}",
            f"{e.p_a_given_b:.17g}",
            str(e.n_contexts_used),
            str(e.sum_weight_a),
            str(e.sum_weight_b),
            str(e.total_count_a),
            str(e.total_count_b),
        ]
    dist = "-" if math.isnan(f.mean_char_distance) else f"{f.mean_char_distance:.17g}"
    return "\t".join([row.status, a, b, *est, str(f.population), dist])


def _parse_ckpt_row(line: str) -> _CheckpointRow | None:
    fields = line.split("\t")
    if len(fields) != len(_CKPT_FIELDS):
        return None
    status, a, b, p_ba, p_ab, n_ctx, sw_a, sw_b, tc_a, tc_b, pop, dist = fields
    try:
        population = int(pop)
        distance = float("nan") if dist == "-" else float(dist)
        if status == "ok":
            estimate = PairEstimate(
                pair=(a, b),
                p_b_given_a=float(p_ba),
                p_a_given_b=float(p_ab),
                n_contexts_used=int(n_ctx),
                sum_weight_a=int(sw_a),
                sum_weight_b=int(sw_b),
                total_count_a=int(tc_a),
                total_count_b=int(tc_b),
                population=population,
                mean_char_distance=distance,
            )
            n_used = estimate.n_contexts_used
        else:
            estimate = None
            n_used = 0
    except ValueError:
        return None
    factor = FactorRecord(
        pair=(a, b),
        population=population,
        mean_char_distance=distance,
        n_contexts_used=n_used,
        status=status,
    )
    return _CheckpointRow(status=status, estimate=estimate, factor=factor)


def _load_checkpoint(
    path: Path, expected_hash: str
) -> dict[tuple[str, str], _CheckpointRow]:
    """Parse completed rows and drop a torn final line from a killed run.

    The file is truncated back to the last complete row, so appending
    resumes cleanly and the finished checkpoint is byte-identical to one
    from an uninterrupted run.
    """
    rows: dict[tuple[str, str], _CheckpointRow] = {}
    with open(path, "r+", encoding="utf-8", newline="") as fh:
        first = fh.readline()
        if first.rstrip("\n") != f"# state={expected_hash}":
            raise StaleCheckpointError(
                f"checkpoint {path} was written under a different configuration"
            )
        consumed = fh.tell()
        while True:
            line = fh.readline()
            if not line:
                break
            if not line.endswith("\n"):
                fh.seek(consumed)
                fh.truncate()
                break
            consumed = fh.tell()
            parsed = _parse_ckpt_row(line.rstrip("\n"))
            if parsed is not None:
                rows[parsed.factor.pair] = parsed
    return rows


# ---------------------------------------------------------------------------
# orchestration


def _pair_seed(seed: int, a: str, b: str) -> int:
    digest = hashlib.sha256(f"{seed}|{a}|{b}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _score_with_retries(
    scorer: ScorerChannel, tasks: Sequence[ScoringTask], retries: int
) -> list[ScoreResult]:
    attempt = 0
    while True:
        try:
            return scorer.score_batch(tasks)
        except ScorerChannelError:
            attempt += 1
            if attempt > retries:
                raise


def collect_pairs(pair_sets: Iterable[RelationPairSet]) -> list[tuple[str, str]]:
    """Distinct unordered pairs across relation sets, sorted (min, max)."""
    seen: set[tuple[str, str]] = set()
    for ps in pair_sets:
        for a, b in ps.pairs:
            seen.add((a, b) if a <= b else (b, a))
    return sorted(seen)


def lm_conditional_table(
    pair_sets: Iterable[RelationPairSet],
    store: ParagraphStore,
    scorer: ScorerChannel,
    *,
    cap: int = 1000,
    seed: int = 0,
    floor: float = PROBABILITY_FLOOR,
    retries: int = 2,
    checkpoint_path: str | Path | None = None,
    resource_id: str | None = None,
    probe: bool = True,
) -> tuple[ConditionalTable, list[FactorRecord]]:
    """Probe every pair against the corpus through the scoring channel.

    Pairs with no co-occurring paragraph are absent from the table (absent,
    not zero) but still appear in the factor log. Pairs with any refused
    task are dropped whole and flagged. With a checkpoint path, completed
    pairs are skipped on resume and the final table is identical to an
    uninterrupted run; a checkpoint from a different configuration is a
    StaleCheckpointError.
    """
    pairs = collect_pairs(pair_sets)
    state = _state_hash(pairs, store, scorer.model_id, cap, seed, floor)

    done: dict[tuple[str, str], _CheckpointRow] = {}
    ckpt_fh = None
    if checkpoint_path is not None:
        checkpoint_path = Path(checkpoint_path)
        if checkpoint_path.exists():
            done = _load_checkpoint(checkpoint_path, state)
        else:
            checkpoint_path.parent.mkdir(parents=True, exist_ok=True)
            with open(checkpoint_path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(f"# state={state}\n")
                fh.flush()
                os.fsync(fh.fileno())
        ckpt_fh = open(checkpoint_path, "a", encoding="utf-8", newline="\n")

    probed = False
    rows: dict[tuple[str, str], _CheckpointRow] = dict(done)
    try:
        for pair in pairs:
            if pair in rows:
                continue
            a, b = pair
            population = co_occurrence_count(store, a, b)
            if population == 0:
                row = _CheckpointRow(
                    status="no_context",
                    estimate=None,
                    factor=FactorRecord(pair, 0, float("nan"), 0, "no_context"),
                )
            else:
                contexts = contexts_for_pair(
                    store, a, b, cap=cap, seed=_pair_seed(seed, a, b)
                )
                tasks = emit_tasks(contexts, pair)
                if probe and not probed:
                    distribution_sum_probe(scorer, tasks[0])
                    probed = True
                try:
                    results = _score_with_retries(scorer, tasks, retries)
                except ScorerChannelError:
                    if ckpt_fh is not None:
                        ckpt_fh.flush()
                        os.fsync(ckpt_fh.fileno())
                    raise
                mean_dist = math.fsum(r.min_char_distance for r in contexts) / len(contexts)
                by_id = _match_results(results, tasks)
                if any(by_id[t.task_id].refused is not None for t in tasks):
                    row = _CheckpointRow(
                        status="refused",
                        estimate=None,
                        factor=FactorRecord(pair, population, mean_dist, 0, "refused"),
                    )
                else:
                    estimate = aggregate(
                        results,
                        tasks,
                        counts=(context_count(store, a), context_count(store, b)),
                        sample_info=(population, len(contexts)),
                        mean_char_distance=mean_dist,
                    )
                    row = _CheckpointRow(
                        status="ok",
                        estimate=estimate,
                        factor=FactorRecord(
                            pair, population, mean_dist, estimate.n_contexts_used, "ok"
                        ),
                    )
            rows[pair] = row
            if ckpt_fh is not None:
                ckpt_fh.write(_format_ckpt_row(row) + "\n")
                ckpt_fh.flush()
                os.fsync(ckpt_fh.fileno())
    finally:
        if ckpt_fh is not None:
            ckpt_fh.close()

    probs: dict[tuple[str, str], float] = {}
    factor_log: list[FactorRecord] = []
    for pair in pairs:
        row = rows[pair]
        factor_log.append(row.factor)
        if row.estimate is not None:
            a, b = pair
            probs[(a, b)] = min(max(row.estimate.p_b_given_a, floor), 1.0)
            probs[(b, a)] = min(max(row.estimate.p_a_given_b, floor), 1.0)
    table = ConditionalTable(
        resource_id=resource_id or scorer.model_id, probs=probs
    )
    return table, factor_log


def write_factor_log(
    factor_log: Sequence[FactorRecord], target, header_lines: Iterable[str] = ()
) -> None:
    own = isinstance(target, (str, Path))
    fh = open(target, "w", encoding="utf-8", newline="\n") if own else target
    try:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("a\tb\tpopulation\tmean_char_distance\tn_contexts_used\tstatus\n")
        for rec in factor_log:
            dist = "-" if math.isnan(rec.mean_char_distance) else f"{rec.mean_char_distance:.17g}"
            fh.write(
                f"{rec.pair[0]}\t{rec.pair[1]}\t{rec.population}\t{dist}"
                f"\t{rec.n_contexts_used}\t{rec.status}\n"
            )
    finally:
        if own:
            fh.close()


def read_factor_log(source) -> list[FactorRecord]:
    records: list[FactorRecord] = []
    for line in _iter_lines(source):
        line = line.rstrip("\n")
        if not line or line.startswith("#") or line.startswith("a\tb\t"):
            continue
        a, b, pop, dist, n_used, status = line.split("\t")
        records.append(
            FactorRecord(
                pair=(a, b),
                population=int(pop),
                mean_char_distance=float("nan") if dist == "-" else float(dist),
                n_contexts_used=int(n_used),
                status=status,
            )
        )
    return records
