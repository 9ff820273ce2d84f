"""Masked-word probability scoring with a pretrained masked LM.

Each scoreable request is framed (see framing), the occurrence at the
requested offset is replaced by the mask token, and the model's softmax
distribution at that position is read out. Deterministic by
construction: eval mode (no dropout), a single CPU thread so float
reduction order is stable, and a per-process response cache so
identical requests repeat bit-for-bit regardless of how batches are
grouped. Nondeterminism that cannot be ruled out (non-CPU devices) is
logged, not hidden.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

import torch
from transformers import AutoModelForMaskedLM, AutoTokenizer
from transformers.utils import logging as hf_logging

from .framing import aligned_token_index, centered_window, frame

# A protocol server should not paint progress bars on stderr.
hf_logging.disable_progress_bar()

PROBE_ID = "__distsum__"

REFUSAL_MULTI_TOKEN = "multi-token-target"
REFUSAL_OFFSET = "offset-mismatch"


class ModelLoadError(RuntimeError):
    """The model or tokenizer could not be loaded."""


@dataclass
class _Prepared:
    """A request that survived validation and awaits a forward pass."""

    index: int
    cache_key: tuple
    request_id: str
    token_ids: list[int]
    mask_index: int
    target_id: int | None  # None: report full-vocabulary mass instead
    truncated: bool


class MaskedWordScorer:
    """Batched scorer for one masked occurrence per request.

    The cache is unbounded; it holds one small dict per distinct
    (text, offset, length, target) payload, which is fine at the task
    volumes a single pipeline run produces.
    """

    def __init__(
        self,
        model: str,
        device: str = "cpu",
        batch_size: int = 16,
        max_len: int = 128,
    ):
        if batch_size < 1:
            raise ValueError(f"batch size must be >= 1, got {batch_size}")
        if max_len < 8:
            raise ValueError(f"max length must be >= 8, got {max_len}")
        self.model_id = model
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(model)
            self.model = AutoModelForMaskedLM.from_pretrained(model)
        except Exception as exc:
            raise ModelLoadError(f"cannot load model {model!r}: {exc}") from exc
        torch.set_num_threads(1)
        self.model.to(device)
        self.model.eval()
        self.device = device
        self.batch_size = batch_size
        self.max_len = max_len
        self._cache: dict[tuple, dict] = {}
        if device != "cpu":
            print(
                f"mlm-scorer: device {device!r} may use nondeterministic kernels; "
                "bit-identical repeats are only guaranteed within this process",
                file=sys.stderr,
            )

    def score_requests(self, requests: list[dict]) -> list[dict]:
        """Answer every request, in request order."""
        responses: list[dict | None] = [None] * len(requests)
        pending: list[_Prepared] = []
        for i, request in enumerate(requests):
            key = self._cache_key(request)
            hit = self._cache.get(key)
            if hit is not None:
                responses[i] = dict(hit, id=request["id"])
                continue
            prepared = self._prepare(i, key, request)
            if isinstance(prepared, dict):
                self._cache[key] = prepared
                responses[i] = dict(prepared, id=request["id"])
            else:
                pending.append(prepared)
        for chunk_start in range(0, len(pending), self.batch_size):
            self._run_batch(
                pending[chunk_start : chunk_start + self.batch_size], responses
            )
        return responses  # type: ignore[return-value]

    def _cache_key(self, request: dict) -> tuple:
        # The probe is keyed separately: same payload, different answer.
        return (
            request["text"],
            request["offset"],
            request["length"],
            request["target"],
            request["id"] == PROBE_ID,
        )

    def _prepare(self, index: int, key: tuple, request: dict) -> _Prepared | dict:
        """Validate and frame one request; a dict is a refusal payload."""
        text = request["text"]
        offset = request["offset"]
        length = request["length"]
        target = request["target"]
        if text[offset : offset + length].lower() != target.lower():
            return {"refused": REFUSAL_OFFSET}
        target_id = None
        if request["id"] != PROBE_ID:
            # The full-vocabulary probe needs no target id; everything else
            # must map to exactly one real vocabulary entry.
            pieces = self.tokenizer.tokenize(target)
            if len(pieces) != 1 or pieces[0] == self.tokenizer.unk_token:
                return {"refused": REFUSAL_MULTI_TOKEN}
            target_id = self.tokenizer.convert_tokens_to_ids(pieces[0])
        framed = frame(text, self.tokenizer)
        mask_index = aligned_token_index(framed, offset, offset + length)
        if mask_index is None:
            # Slice text matched but does not sit on token boundaries
            # (e.g. a fragment of a longer word): not maskable as one token.
            return {"refused": REFUSAL_OFFSET}
        token_ids = list(framed.token_ids)
        token_ids[mask_index] = self.tokenizer.mask_token_id
        token_ids, mask_index, truncated = centered_window(
            token_ids,
            mask_index,
            self.max_len,
            self.tokenizer.cls_token_id,
            self.tokenizer.sep_token_id,
        )
        return _Prepared(
            index, key, request["id"], token_ids, mask_index, target_id, truncated
        )

    def _run_batch(self, chunk: list[_Prepared], responses: list) -> None:
        width = max(len(p.token_ids) for p in chunk)
        pad_id = self.tokenizer.pad_token_id
        input_ids = torch.full((len(chunk), width), pad_id, dtype=torch.long)
        attention = torch.zeros((len(chunk), width), dtype=torch.long)
        for row, prepared in enumerate(chunk):
            n = len(prepared.token_ids)
            input_ids[row, :n] = torch.tensor(prepared.token_ids, dtype=torch.long)
            attention[row, :n] = 1
        with torch.no_grad():
            logits = self.model(
                input_ids=input_ids.to(self.device),
                attention_mask=attention.to(self.device),
            ).logits
        for row, prepared in enumerate(chunk):
            distribution = torch.softmax(
                logits[row, prepared.mask_index].double(), dim=-1
            )
            if prepared.target_id is None:
                value = float(distribution.sum().item())
            else:
                value = float(distribution[prepared.target_id].item())
            payload: dict = {"prob": value}
            if prepared.truncated:
                payload["truncated"] = True
            self._cache[prepared.cache_key] = payload
            responses[prepared.index] = dict(payload, id=prepared.request_id)
