"""Rank-sum test against exact enumeration, plus report assembly."""

import itertools

import numpy as np
import pytest

from uedabench.stats import (
    MARK_BETTER,
    MARK_SIMILAR,
    MARK_WORSE,
    ComparisonReport,
    build_report,
    mean_rank,
    significance_mark,
    wilcoxon_rank_sum,
)


def _average_ranks_oracle(values):
    """Average ranks via scipy-free double argsort with tie averaging."""
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size)
    i = 0
    while i < values.size:
        j = i
        while j + 1 < values.size and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _exact_p(a, b):
    """Two-sided p by enumerating every split of the combined sample.

    Under H0 all C(n, n1) assignments of the pooled (tie-averaged) ranks to
    group A are equally likely; p is the fraction whose rank sum is at least
    as far from the mean as the observed one.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    combined = np.concatenate([a, b])
    ranks = _average_ranks_oracle(combined)
    n, n1 = combined.size, a.size
    w_obs = ranks[:n1].sum()
    mu = n1 * (n + 1) / 2.0
    d_obs = abs(w_obs - mu)
    hits = total = 0
    for idx in itertools.combinations(range(n), n1):
        total += 1
        if abs(ranks[list(idx)].sum() - mu) >= d_obs - 1e-12:
            hits += 1
    return hits / total


def test_canonical_separated_triples_match_exact():
    # {1,2,3} vs {10,11,12}: exact two-sided p is 2/20 = 0.1.
    p = wilcoxon_rank_sum([1.0, 2.0, 3.0], [10.0, 11.0, 12.0])
    assert abs(p - 0.1) <= 0.02


def test_p_close_to_exact_enumeration_continuous():
    """Normal approximation vs brute-force enumeration, tie-free data.

    At these tiny sizes the approximation error of the continuity-corrected
    normal tops out a little under 0.04 (identical to scipy's asymptotic
    Mann-Whitney path), so 0.05 is the honest bound.
    """
    rng = np.random.default_rng(0)
    for _ in range(50):
        n1 = int(rng.integers(3, 8))
        n2 = int(rng.integers(3, min(8, 11 - n1)))
        a = rng.normal(0, 1, n1)
        b = rng.normal(rng.uniform(-1, 1), 1, n2)
        p_normal = wilcoxon_rank_sum(a, b)
        p_exact = _exact_p(a, b)
        assert abs(p_normal - p_exact) <= 0.05, (a, b, p_normal, p_exact)


def test_matches_scipy_asymptotic_mannwhitney():
    """Byte-level agreement with scipy's continuity-corrected asymptotic
    two-sided Mann-Whitney p, including under heavy ties."""
    from scipy.stats import mannwhitneyu

    rng = np.random.default_rng(5)
    for _ in range(100):
        n1, n2 = rng.integers(3, 12, size=2)
        a = rng.normal(size=int(n1))
        b = rng.normal(size=int(n2))
        if rng.random() < 0.4:
            a, b = np.round(a), np.round(b)
        ref = float(mannwhitneyu(a, b, method="asymptotic").pvalue)
        assert abs(wilcoxon_rank_sum(a, b) - ref) <= 1e-12


def test_calibration_under_null():
    """Rejection rate at alpha=0.05 stays within [0.03, 0.07]."""
    rng = np.random.default_rng(1)
    trials = 4000
    rejections = sum(
        wilcoxon_rank_sum(rng.normal(size=8), rng.normal(size=8)) < 0.05
        for _ in range(trials)
    )
    assert 0.03 <= rejections / trials <= 0.07


def test_detects_clear_separation():
    a = np.arange(10.0)
    b = a + 100.0
    assert wilcoxon_rank_sum(a, b) < 1e-3
    assert significance_mark(a, b) == MARK_BETTER
    assert significance_mark(b, a) == MARK_WORSE


def test_identical_samples_are_similar():
    a = np.ones(5)
    assert wilcoxon_rank_sum(a, a.copy()) == 1.0
    assert significance_mark(a, a.copy()) == MARK_SIMILAR


def test_requires_three_observations():
    with pytest.raises(ValueError):
        wilcoxon_rank_sum([1.0, 2.0], [1.0, 2.0, 3.0])


def test_symmetry():
    rng = np.random.default_rng(2)
    a, b = rng.normal(size=6), rng.normal(size=9)
    assert wilcoxon_rank_sum(a, b) == pytest.approx(wilcoxon_rank_sum(b, a))


def test_mean_rank_averages_per_problem_ranks():
    results = {
        "P1": {"A": 1.0, "B": 2.0, "C": 3.0},
        "P2": {"A": 3.0, "B": 1.0, "C": 2.0},
        "P3": {"A": 1.0, "B": 1.0, "C": 5.0},  # tie -> average rank 1.5
    }
    ranks = mean_rank(results)
    assert ranks["A"] == pytest.approx((1 + 3 + 1.5) / 3)
    assert ranks["B"] == pytest.approx((2 + 1 + 1.5) / 3)
    assert ranks["C"] == pytest.approx((3 + 2 + 3) / 3)
    with pytest.raises(ValueError):
        mean_rank({})
    with pytest.raises(ValueError):
        mean_rank({"P1": {"A": 1.0}, "P2": {"B": 1.0}})


def test_build_report_marks_and_tallies():
    rng = np.random.default_rng(3)
    good = rng.normal(0.0, 0.1, size=12)
    bad = good + 50.0
    samples = {
        ("F", 10): {"ALG": good, "BASE": bad},
        ("G", 10): {"ALG": bad, "BASE": good},
        ("H", 10): {"ALG": good, "BASE": good.copy()},
    }
    report = build_report(samples, baseline="BASE")
    assert isinstance(report, ComparisonReport)
    assert report.cells[("F", 10)]["ALG"]["mark"] == MARK_BETTER
    assert report.cells[("G", 10)]["ALG"]["mark"] == MARK_WORSE
    assert report.cells[("H", 10)]["ALG"]["mark"] == MARK_SIMILAR
    assert report.tallies["ALG"] == {MARK_BETTER: 1, MARK_WORSE: 1, MARK_SIMILAR: 1}
    # Mean ranks: ALG wins F, loses G, ties H -> both average 1.5.
    assert report.mean_ranks["ALG"] == pytest.approx(1.5)
    assert report.mean_ranks["BASE"] == pytest.approx(1.5)
    js = report.to_jsonable()
    assert "F|10" in js["cells"] and js["baseline"] == "BASE"
