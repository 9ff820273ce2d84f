"""Wire-format and in-process scoring behavior."""

from __future__ import annotations

import io
import json
import math

import pytest

from mlm_scorer.protocol import (
    RequestError,
    iter_batches,
    parse_request,
    read_request_lines,
    recovered_id,
    response_line,
    write_result_file,
)
from mlm_scorer.scoring import (
    PROBE_ID,
    REFUSAL_MULTI_TOKEN,
    REFUSAL_OFFSET,
)

from scorer_helpers import MODEL_DIR, request_for


GOOD = '{"id":"a","text":"the dog ran .","offset":4,"length":3,"target":"dog"}'


def test_parse_request_accepts_well_formed():
    req = parse_request(GOOD)
    assert req["id"] == "a" and req["offset"] == 4


@pytest.mark.parametrize(
    "line",
    [
        "not json",
        "[1,2]",
        '{"id":1,"text":"x","offset":0,"length":1,"target":"x"}',
        '{"id":"a","text":"x","offset":-1,"length":1,"target":"x"}',
        '{"id":"a","text":"x","offset":true,"length":1,"target":"x"}',
        '{"id":"a","text":"x","offset":0,"length":1}',
        '{"id":"a","text":"x","offset":0.5,"length":1,"target":"x"}',
    ],
)
def test_parse_request_rejects_malformed(line):
    with pytest.raises(RequestError):
        parse_request(line)


def test_recovered_id():
    assert recovered_id('{"id":"x","offset":-2}') == "x"
    assert recovered_id('{"id":7}') is None
    assert recovered_id("garbage") is None


def test_response_line_is_canonical():
    line = response_line({"prob": 0.5, "id": "z"})
    assert line == '{"id":"z","prob":0.5}'
    assert json.loads(line) == {"id": "z", "prob": 0.5}


def test_iter_batches_blank_delimited_with_comments():
    stream = io.StringIO("# note\na\nb\n\nc\n\n\nd\n")
    assert list(iter_batches(stream)) == [["a", "b"], ["c"], ["d"]]


def test_task_file_round_trip(tmp_path):
    path = tmp_path / "r.txt"
    write_result_file(path, ["header one", "header two"], ["l1", "l2"])
    text = path.read_text()
    assert text.startswith("# header one\n# header two\n")
    assert read_request_lines(path) == ["l1", "l2"]


def test_offset_mismatch_refused(scorer):
    req = request_for("the dog ran .", "dog", "r1")
    req["offset"] += 1
    (resp,) = scorer.score_requests([req])
    assert resp == {"id": "r1", "refused": REFUSAL_OFFSET}


def test_slice_match_is_case_insensitive(scorer):
    req = request_for("The Dog ran .", "Dog", "r2")
    req["target"] = "dog"
    (resp,) = scorer.score_requests([req])
    assert 0.0 < resp["prob"] < 1.0


def test_multi_token_target_refused(scorer):
    req = request_for("a qzvw sits here .", "qzvw", "r3")
    (resp,) = scorer.score_requests([req])
    assert resp == {"id": "r3", "refused": REFUSAL_MULTI_TOKEN}


def test_partial_word_slice_refused(scorer):
    # slice text equals the target but addresses a fragment of "garden"
    text = "the garden is green ."
    start = text.index("garden")
    req = {"id": "r4", "text": text, "offset": start, "length": 4, "target": "gard"}
    (resp,) = scorer.score_requests([req])
    assert resp["refused"] in (REFUSAL_OFFSET, REFUSAL_MULTI_TOKEN)


def test_probe_reports_full_vocabulary_mass(scorer):
    req = request_for("the dog ran .", "dog", PROBE_ID)
    (resp,) = scorer.score_requests([req])
    assert math.isfinite(resp["prob"])
    assert abs(resp["prob"] - 1.0) <= 1e-4


def test_truncation_flag_and_cache_replay(scorer):
    text = " ".join("the dog chases the cat ." for _ in range(30))
    req = request_for(text, "cat", "r5", occurrence=15)
    (first,) = scorer.score_requests([req])
    assert first["truncated"] is True
    assert 0.0 < first["prob"] < 1.0
    (again,) = scorer.score_requests([dict(req, id="r6")])
    assert again["prob"] == first["prob"]
    assert again["truncated"] is True


def test_repeats_are_bit_identical_across_batch_shapes(scorer):
    base = request_for("the king sits beside the queen .", "queen", "q0")
    filler = [
        request_for("smoke rises from the fire .", "fire", f"f{i}") for i in range(5)
    ]
    (alone,) = scorer.score_requests([base])
    mixed = scorer.score_requests(filler + [dict(base, id="q1")])
    assert mixed[-1]["prob"] == alone["prob"]


def test_fresh_instances_agree_bitwise():
    # same batch grouping, two independent model loads: deterministic inference
    from mlm_scorer import MaskedWordScorer

    reqs = [
        request_for("the king sits beside the queen .", "queen", "a"),
        request_for("bread goes with butter at every meal .", "butter", "b"),
    ]
    one = MaskedWordScorer(str(MODEL_DIR)).score_requests(reqs)
    two = MaskedWordScorer(str(MODEL_DIR)).score_requests(reqs)
    assert [r["prob"] for r in one] == [r["prob"] for r in two]


def test_rejects_bad_limits():
    from mlm_scorer import MaskedWordScorer

    with pytest.raises(ValueError):
        MaskedWordScorer(str(MODEL_DIR), batch_size=0)
    with pytest.raises(ValueError):
        MaskedWordScorer(str(MODEL_DIR), max_len=4)


def test_model_load_error():
    from mlm_scorer import MaskedWordScorer, ModelLoadError

    with pytest.raises(ModelLoadError):
        MaskedWordScorer("/nonexistent/model/dir")
