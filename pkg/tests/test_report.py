import math

import pytest

from asymgauge.errors import ValidationError
from asymgauge.evocation_data import ConditionalTable
from asymgauge.metrics import alar, cam, directional_accuracy, spearman_pvalue_t
from asymgauge.report import (
    MetricReport,
    assemble_report,
    format_report_text,
    lenient_lar_map,
    signed_log_scale,
    write_bin_csv,
    write_report_tsv,
)

# two resources over two relations; resource "m" misses one pair entirely
PAIRS = {
    "isA": [("ant", "bug"), ("cow", "herd"), ("elm", "tree")],
    "relatedTo": [("sun", "moon"), ("cat", "dog"), ("ink", "pen")],
}


def full_table(resource, bias):
    probs = {}
    for plist in PAIRS.values():
        for k, (a, b) in enumerate(plist):
            fwd = 0.1 + 0.08 * ((k + bias) % 5)
            rev = 0.05 + 0.05 * ((k + 2 * bias) % 4)
            probs[(a, b)] = fwd
            probs[(b, a)] = rev
    return ConditionalTable(resource, probs)


def gappy_table(resource):
    t = full_table(resource, bias=2)
    probs = dict(t.probs)
    del probs[("ink", "pen")]  # one direction missing: pair uncovered
    return ConditionalTable(resource, probs)


TABLES = {"d": full_table("d", 0), "e": full_table("e", 1), "m": gappy_table("m")}


def test_lenient_lar_map_splits_covered_and_missing():
    lmap, missing = lenient_lar_map(TABLES["m"], PAIRS["relatedTo"])
    assert missing == [("ink", "pen")]
    assert len(lmap.entries) == 2


def test_assemble_report_effective_pairs_and_excluded():
    report = assemble_report(PAIRS, TABLES, compare=[("d", "m")], gammas=[0.0])
    assert report.excluded == {"isA": 0, "relatedTo": 1}
    by_label = {r.label: r for r in report.rows}
    assert by_label["isA"].count == 3
    assert by_label["relatedTo"].count == 2  # ink/pen dropped everywhere


def test_assemble_report_values_match_direct_metric_calls():
    report = assemble_report(PAIRS, TABLES, compare=[("d", "e")], gammas=[0.0, 1.0])
    row = {r.label: r for r in report.rows}["isA"]
    pairs = PAIRS["isA"]
    lm_d, _ = lenient_lar_map(TABLES["d"], pairs)
    lm_e, _ = lenient_lar_map(TABLES["e"], pairs)
    assert row.values["alar:d"] == alar(lm_d, pairs)
    assert row.values["cam:d-e"] == cam(pairs, lm_d, lm_e)
    assert row.values["p:d-e"] == spearman_pvalue_t(cam(pairs, lm_d, lm_e), 3)
    assert row.values["dir:d-e:g1"] == directional_accuracy(lm_d, lm_e, pairs, 1.0)


def test_assemble_report_handles_undefined_correlation():
    flat = {}
    for plist in PAIRS.values():
        for a, b in plist:
            flat[(a, b)] = 0.2
            flat[(b, a)] = 0.2  # all asymmetries exactly zero: constant
    tables = {"d": TABLES["d"], "flat": ConditionalTable("flat", flat)}
    report = assemble_report(PAIRS, tables, compare=[("d", "flat")], gammas=[0.0])
    for row in report.rows:
        assert row.values["cam:d-flat"] is None
        assert row.values["p:d-flat"] is None
        assert row.values["alar:flat"] == 0.0


def test_assemble_report_requires_known_resources():
    with pytest.raises(ValidationError):
        assemble_report(PAIRS, TABLES, compare=[("d", "ghost")], gammas=[0.0])


def test_assemble_report_fails_when_nothing_is_covered():
    empty = {"d": ConditionalTable("d", {}), "e": ConditionalTable("e", {})}
    with pytest.raises(ValidationError):
        assemble_report(PAIRS, empty, compare=[("d", "e")], gammas=[0.0])


def test_summary_rows_are_count_weighted():
    report = assemble_report(PAIRS, TABLES, compare=[("d", "m")], gammas=[0.0])
    sa, sr = report.summary
    assert sa.label == "SA" and sr.label == "SR"
    rows = {r.label: r for r in report.rows}
    n_isa, n_rel = rows["isA"].count, rows["relatedTo"].count
    want = (
        rows["isA"].values["alar:d"] * n_isa + rows["relatedTo"].values["alar:d"] * n_rel
    ) / (n_isa + n_rel)
    assert sa.values["alar:d"] == pytest.approx(want, abs=1e-15)
    assert sa.count == n_isa + n_rel
    # SR drops the catch-all relation and reweights
    assert sr.values["alar:d"] == rows["isA"].values["alar:d"]
    assert sr.count == n_isa
    # p-value columns never average
    assert sa.values["p:d-m"] is None


def test_summary_weights_sum_to_one():
    report = assemble_report(PAIRS, TABLES, compare=[("d", "e")], gammas=[0.0])
    sa, _ = report.summary
    weights = [r.count / sa.count for r in report.rows]
    assert math.fsum(weights) == pytest.approx(1.0, abs=1e-12)


def test_signed_log_scale():
    assert signed_log_scale(0.0, 1000.0) == 0.0
    assert signed_log_scale(1.0, 1000.0) == pytest.approx(math.log(1000.0))
    assert signed_log_scale(-1.0, 1000.0) == pytest.approx(-math.log(1000.0))
    assert signed_log_scale(2.5, 100.0) == pytest.approx(math.log(250.0))


def test_slog_columns_appear_on_request():
    report = assemble_report(
        PAIRS, TABLES, compare=[("d", "e")], gammas=[0.0], slog_scale=1000.0
    )
    row = report.rows[0]
    assert row.values["alarslog:d"] == signed_log_scale(row.values["alar:d"], 1000.0)


def test_report_tsv_and_text_round(tmp_path):
    report = assemble_report(PAIRS, TABLES, compare=[("d", "m")], gammas=[0.0])
    path = tmp_path / "metrics.tsv"
    write_report_tsv(report, path, header_lines=["config_hash=abc"])
    raw = path.read_text(encoding="utf-8")
    assert raw.startswith("# config_hash=abc\n")
    assert "# excluded relatedTo: 1 pairs lacking full coverage" in raw
    header = next(l for l in raw.splitlines() if l.startswith("relation\t"))
    assert header.split("\t")[:2] == ["relation", "count"]
    body = [l for l in raw.splitlines() if l and not l.startswith(("#", "relation"))]
    assert [l.split("\t")[0] for l in body] == ["isA", "relatedTo", "SA", "SR"]

    text = format_report_text(report)
    assert "isA" in text and "SA" in text
    # None cells render as a dash in both formats
    assert "-" in text


def test_write_bin_csv(tmp_path):
    path = tmp_path / "bins.csv"
    write_bin_csv([(1.5, 0.75, 200), (9.0, 0.5, 150)], path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "mean_factor,accuracy,n_pairs"
    assert lines[1].split(",")[2] == "200"
    assert float(lines[2].split(",")[0]) == 9.0
