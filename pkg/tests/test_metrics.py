import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from asymgauge.errors import (
    CoverageError,
    DimensionError,
    DomainError,
    UndefinedCorrelationError,
    ValidationError,
)
from asymgauge.evocation_data import ConditionalTable
from asymgauge.metrics import (
    LarMap,
    alar,
    average_ranks,
    bin_analysis,
    cam,
    direction_sign,
    directional_accuracy,
    geometric_mean_similarity,
    lar,
    lar_map,
    read_similarity_gold,
    similarity_eval,
    spearman,
    spearman_pvalue_exact,
    spearman_pvalue_t,
)
from oracles import exact_permutation_pvalue, exact_ranks, exact_spearman

# ---------------------------------------------------------------------------
# log asymmetry


def test_lar_known_value():
    assert lar(0.8, 0.2) == pytest.approx(math.log(4.0), abs=1e-15)
    assert lar(0.5, 0.5) == 0.0


probs = st.floats(min_value=1e-300, max_value=1.0, allow_nan=False)


@given(probs, probs)
def test_lar_antisymmetry(p, q):
    assert lar(p, q) == -lar(q, p)  # exact: same two logs, swapped


@pytest.mark.parametrize("bad", [0.0, -0.1, 1.5, float("nan")])
def test_lar_domain(bad):
    with pytest.raises(DomainError):
        lar(bad, 0.5)
    with pytest.raises(DomainError):
        lar(0.5, bad)


def test_lar_map_reverse_fallback():
    m = LarMap("r", {("a", "b"): 0.7})
    assert m.get("a", "b") == 0.7
    assert m.get("b", "a") == -0.7
    assert m.get("a", "z") is None


def test_lar_map_from_table_reports_all_missing():
    table = ConditionalTable("toy", {("a", "b"): 0.5, ("b", "a"): 0.25})
    m = lar_map(table, [("a", "b")])
    assert m.entries[("a", "b")] == pytest.approx(math.log(2.0))
    with pytest.raises(CoverageError) as err:
        lar_map(table, [("a", "b"), ("a", "c"), ("b", "c")])
    assert set(err.value.pairs) == {("a", "c"), ("b", "c")}


def test_alar_is_plain_mean():
    m = LarMap("r", {("a", "b"): 1.0, ("c", "d"): -0.5, ("e", "f"): 0.25})
    assert alar(m, [("a", "b"), ("c", "d"), ("e", "f")]) == pytest.approx(0.25)
    # orientation flips through the fallback contribute the negated value
    assert alar(m, [("b", "a"), ("c", "d")]) == pytest.approx(-0.75)
    with pytest.raises(ValidationError):
        alar(m, [])


# ---------------------------------------------------------------------------
# ranks and correlation


def test_average_ranks_with_ties():
    assert average_ranks([10.0, 20.0, 10.0]).tolist() == [1.5, 3.0, 1.5]
    assert average_ranks([5.0, 5.0, 5.0, 5.0]).tolist() == [2.5, 2.5, 2.5, 2.5]
    assert average_ranks([3.0, 1.0, 2.0]).tolist() == [3.0, 1.0, 2.0]


@given(st.lists(st.integers(min_value=-5, max_value=5), min_size=1, max_size=40))
def test_average_ranks_match_exact_oracle(values):
    got = average_ranks([float(v) for v in values])
    want = [float(r) for r in exact_ranks(values)]
    assert got.tolist() == want


def test_spearman_textbook_case():
    assert spearman([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8)
    assert spearman([1, 2, 3], [3, 2, 1]) == -1.0
    assert spearman([1, 2, 3], [10, 20, 30]) == 1.0


def test_spearman_error_cases():
    with pytest.raises(DimensionError):
        spearman([1, 2], [1, 2, 3])
    with pytest.raises(UndefinedCorrelationError):
        spearman([1.0], [2.0])
    with pytest.raises(UndefinedCorrelationError):
        spearman([2, 2, 2], [1, 2, 3])
    with pytest.raises(UndefinedCorrelationError):
        spearman([1, 2, 3], [7, 7, 7])
    with pytest.raises(DomainError):
        spearman([1, 2, float("nan")], [1, 2, 3])
    with pytest.raises(DomainError):
        spearman([1, 2, math.inf], [1, 2, 3])


vectors = st.lists(st.integers(min_value=-8, max_value=8), min_size=2, max_size=25)


@given(vectors, vectors)
@settings(max_examples=300)
def test_spearman_matches_exact_oracle(x, y):
    n = min(len(x), len(y))
    x, y = x[:n], y[:n]
    if len(set(x)) < 2 or len(set(y)) < 2:
        with pytest.raises(UndefinedCorrelationError):
            spearman(x, y)
        return
    assert spearman(x, y) == pytest.approx(exact_spearman(x, y), abs=1e-12)


@given(vectors, vectors)
@settings(max_examples=200)
def test_spearman_matches_scipy(x, y):
    n = min(len(x), len(y))
    x, y = x[:n], y[:n]
    if len(set(x)) < 2 or len(set(y)) < 2:
        return
    want = scipy.stats.spearmanr(x, y)
    assert spearman(x, y) == pytest.approx(want.statistic, abs=1e-12)
    if n >= 4 and abs(spearman(x, y)) < 1.0:
        assert spearman_pvalue_t(spearman(x, y), n) == pytest.approx(
            want.pvalue, rel=1e-9
        )


def test_pvalue_t_edges():
    assert spearman_pvalue_t(1.0, 10) == 0.0
    assert spearman_pvalue_t(-1.0, 10) == 0.0
    assert spearman_pvalue_t(0.0, 30) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        spearman_pvalue_t(0.5, 2)


def test_exact_permutation_pvalue_small_cases():
    x = [1.0, 2.0, 3.0, 4.0]
    y = [1.0, 2.0, 3.0, 4.0]
    # only the 2 perfect orderings of 24 reach |rho| = 1
    assert spearman_pvalue_exact(x, y) == pytest.approx(2 / 24)
    got = spearman_pvalue_exact([1, 2, 3, 4], [1, 3, 2, 4])
    want = exact_permutation_pvalue([1, 2, 3, 4], [1, 3, 2, 4])
    assert got == pytest.approx(float(want))


@given(
    st.lists(st.integers(min_value=0, max_value=3), min_size=3, max_size=6),
    st.lists(st.integers(min_value=0, max_value=3), min_size=3, max_size=6),
)
@settings(max_examples=40, deadline=None)
def test_exact_permutation_pvalue_matches_oracle_with_ties(x, y):
    n = min(len(x), len(y))
    x, y = x[:n], y[:n]
    if len(set(x)) < 2 or len(set(y)) < 2:
        return
    got = spearman_pvalue_exact(x, y)
    want = float(exact_permutation_pvalue(x, y))
    assert got == pytest.approx(want, abs=1e-12)


def test_exact_permutation_pvalue_rejects_large_n():
    with pytest.raises(ValidationError):
        spearman_pvalue_exact(list(range(11)), list(range(11)))


# ---------------------------------------------------------------------------
# rank agreement over pair sets


def lar_maps_for_cam():
    pairs = [("a", "b"), ("c", "d"), ("e", "f"), ("g", "h")]
    li = LarMap("i", {p: v for p, v in zip(pairs, [0.1, -0.4, 2.0, 0.9])})
    lj = LarMap("j", {p: v for p, v in zip(pairs, [0.3, -0.1, 1.1, 0.8])})
    return pairs, li, lj


def test_cam_matches_spearman_of_aligned_vectors():
    pairs, li, lj = lar_maps_for_cam()
    want = spearman([0.1, -0.4, 2.0, 0.9], [0.3, -0.1, 1.1, 0.8])
    assert cam(pairs, li, lj) == want


def test_cam_self_correlation_is_exactly_one():
    pairs, li, _ = lar_maps_for_cam()
    assert cam(pairs, li, li) == 1.0


def test_cam_is_symmetric_bitwise():
    pairs, li, lj = lar_maps_for_cam()
    assert cam(pairs, li, lj) == cam(pairs, lj, li)


def test_cam_orientation_convention_cancels():
    pairs, li, lj = lar_maps_for_cam()
    flipped = [(b, a) for a, b in pairs]
    assert cam(flipped, li, lj) == pytest.approx(cam(pairs, li, lj), abs=1e-12)


def test_cam_errors():
    pairs, li, lj = lar_maps_for_cam()
    with pytest.raises(ValidationError):
        cam(pairs[:1], li, lj)
    with pytest.raises(CoverageError):
        cam(pairs + [("x", "y")], li, lj)


# ---------------------------------------------------------------------------
# thresholded direction agreement


def test_direction_sign_truth_table():
    assert direction_sign(0.5, 0.0) == 1
    assert direction_sign(-0.5, 0.0) == -1
    assert direction_sign(0.0, 0.0) == 0
    assert direction_sign(0.1, 0.1) == 0  # boundary is inclusive of the gap
    assert direction_sign(0.100001, 0.1) == 1
    assert direction_sign(-9.0, 10.0) == 0
    assert direction_sign(-11.0, 10.0) == -1
    with pytest.raises(DomainError):
        direction_sign(1.0, -0.5)


def test_directional_accuracy_counts_agreements():
    pairs = [("a", "b"), ("c", "d"), ("e", "f"), ("g", "h")]
    ref = LarMap("ref", dict(zip(pairs, [1.0, -1.0, 0.05, 2.0])))
    other = LarMap("oth", dict(zip(pairs, [0.5, -2.0, -0.05, -1.0])))
    # gamma=0: signs +,-,+,+ vs +,-,-,- agree on first two
    assert directional_accuracy(ref, other, pairs, 0.0) == pytest.approx(0.5)
    # gamma=0.1 zeroes the small pair on both sides: agreement 3/4
    assert directional_accuracy(ref, other, pairs, 0.1) == pytest.approx(0.75)
    with pytest.raises(CoverageError):
        directional_accuracy(ref, other, pairs + [("x", "y")], 0.0)


def test_directional_accuracy_saturates_for_huge_gamma():
    pairs = [("a", "b"), ("c", "d")]
    ref = LarMap("ref", dict(zip(pairs, [3.0, -2.0])))
    other = LarMap("oth", dict(zip(pairs, [-3.0, 2.0])))
    assert directional_accuracy(ref, other, pairs, 1e9) == 1.0


# ---------------------------------------------------------------------------
# binning


def fake_pairs(n):
    return [((f"w{i}", f"v{i}"), float(i)) for i in range(n)]


def test_bin_analysis_hand_case():
    log = [(("a", "b"), 3.0), (("c", "d"), 1.0), (("e", "f"), 2.0), (("g", "h"), 10.0)]
    acc = {("c", "d"): 1.0, ("e", "f"): 0.0, ("a", "b"): 1.0, ("g", "h"): 0.5}
    bins = bin_analysis(log, lambda p: acc[p], bin_size=2)
    assert bins == [(1.5, 0.5, 2), (6.5, 0.75, 2)]


def test_bin_analysis_keeps_trailing_bin_at_quarter():
    bins = bin_analysis(fake_pairs(20), lambda p: 1.0, bin_size=8)
    assert [n for _, _, n in bins] == [8, 8, 4]  # 4 == 8/4, kept


def test_bin_analysis_drops_small_trailing_bin():
    bins = bin_analysis(fake_pairs(17), lambda p: 1.0, bin_size=8)
    assert [n for _, _, n in bins] == [8, 8]  # trailing 1 < 2 dropped


def test_bin_analysis_sort_is_stable():
    log = [(("a", "b"), 1.0), (("c", "d"), 1.0), (("e", "f"), 1.0)]
    seen = []
    bin_analysis(log, lambda p: seen.append(p) or 1.0, bin_size=3)
    assert seen == [("a", "b"), ("c", "d"), ("e", "f")]


def test_bin_analysis_rejects_bad_bin_size():
    with pytest.raises(ValidationError):
        bin_analysis(fake_pairs(4), lambda p: 1.0, bin_size=0)


# ---------------------------------------------------------------------------
# similarity


def test_geometric_mean_similarity():
    assert geometric_mean_similarity(0.04, 0.25) == pytest.approx(0.1)
    assert geometric_mean_similarity(0.0, 0.5) == 0.0
    with pytest.raises(DomainError):
        geometric_mean_similarity(-0.1, 0.5)
    with pytest.raises(DomainError):
        geometric_mean_similarity(0.5, 1.5)


def test_similarity_eval_canonicalizes_and_counts_exclusions():
    gold = {("b", "a"): 9.0, ("c", "d"): 2.0, ("e", "f"): 5.0, ("x", "y"): 1.0}
    scores = {("a", "b"): 0.9, ("d", "c"): 0.1, ("e", "f"): 0.55}
    res = similarity_eval(scores, gold)
    assert res.n_shared == 3
    assert res.n_excluded == 1
    assert res.rho == pytest.approx(exact_spearman([0.9, 0.1, 0.55], [9.0, 2.0, 5.0]))


def test_similarity_eval_needs_two_shared_pairs():
    with pytest.raises(CoverageError):
        similarity_eval({("a", "b"): 0.5}, {("a", "b"): 1.0, ("x", "y"): 2.0})


def test_read_similarity_gold_last_duplicate_wins(tmp_path):
    path = tmp_path / "gold.tsv"
    path.write_text("A\tb\t3.5\nb\ta\t4.5\nc\td\t1.0\n", encoding="utf-8")
    gold = read_similarity_gold(path)
    assert gold[("a", "b")] == 4.5
    assert gold[("c", "d")] == 1.0
