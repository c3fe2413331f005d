"""Nonparametric comparison of result samples: rank-sum test, significance
marks, and per-problem mean ranks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

MARK_BETTER = "+"
MARK_WORSE = "-"
MARK_SIMILAR = "~"


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with tied values sharing the average rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size)
    i = 0
    sorted_vals = values[order]
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def wilcoxon_rank_sum(a, b) -> float:
    """Two-sided rank-sum p-value, normal approximation.

    Uses tie-corrected variance and a 0.5 continuity correction toward the
    mean.  Completely tied data (zero variance) gives p = 1.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size < 3 or b.size < 3:
        raise ValueError("need at least 3 observations per sample")
    n1, n2 = a.size, b.size
    n = n1 + n2
    combined = np.concatenate([a, b])
    ranks = _average_ranks(combined)
    w = float(np.sum(ranks[:n1]))

    mu = n1 * (n + 1) / 2.0
    _, tie_counts = np.unique(combined, return_counts=True)
    tie_term = float(np.sum(tie_counts**3 - tie_counts)) / (n * (n - 1))
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if var <= 0.0:
        return 1.0
    diff = w - mu
    z = (diff - 0.5 * np.sign(diff)) / np.sqrt(var)
    return float(min(1.0, 2.0 * (1.0 - ndtr(abs(z)))))


def significance_mark(a, b, alpha: float = 0.05) -> str:
    """'+' if a is significantly lower (better under minimization), '-' if
    significantly higher, '~' otherwise."""
    p = wilcoxon_rank_sum(a, b)
    if p >= alpha:
        return MARK_SIMILAR
    return MARK_BETTER if np.median(a) < np.median(b) else MARK_WORSE


def mean_rank(results: dict[str, dict[str, float]]) -> dict[str, float]:
    """Average per-problem rank of each algorithm's mean value.

    `results` maps problem -> algorithm -> mean; every problem must carry the
    same complete set of algorithms.
    """
    if not results:
        raise ValueError("empty result matrix")
    algos = sorted(next(iter(results.values())))
    totals = {a: 0.0 for a in algos}
    for problem, row in results.items():
        if sorted(row) != algos:
            raise ValueError(f"incomplete result row for problem {problem!r}")
        means = np.array([row[a] for a in algos])
        ranks = _average_ranks(means)
        for a, r in zip(algos, ranks):
            totals[a] += r
    return {a: totals[a] / len(results) for a in algos}


@dataclass
class ComparisonReport:
    """Aggregate table: per-cell stats, marks against a baseline, mean ranks."""

    baseline: str
    alpha: float
    direction_statistic: str = "median"
    # (problem, dim) -> algo -> {"mean": .., "std": .., "rank": ..., "mark": ...}
    cells: dict = field(default_factory=dict)
    mean_ranks: dict = field(default_factory=dict)
    tallies: dict = field(default_factory=dict)  # algo -> {"+" : c, "-": c, "~": c}

    def to_jsonable(self) -> dict:
        return {
            "baseline": self.baseline,
            "alpha": self.alpha,
            "direction_statistic": self.direction_statistic,
            "cells": {
                f"{problem}|{dim}": cell
                for (problem, dim), cell in self.cells.items()
            },
            "mean_ranks": self.mean_ranks,
            "tallies": self.tallies,
        }


def build_report(
    samples: dict[tuple[str, int], dict[str, np.ndarray]],
    baseline: str,
    alpha: float = 0.05,
) -> ComparisonReport:
    """Assemble the comparison table from per-(problem, dim) result samples.

    `samples` maps (problem, dim) -> algorithm -> array of per-run best
    values.  Marks read as: the algorithm is better (+), worse (-), or
    similar (~) versus the baseline.  Single-run samples cannot be tested
    and are marked similar.
    """
    report = ComparisonReport(baseline=baseline, alpha=alpha)
    rank_matrix: dict[str, dict[str, float]] = {}
    algos: list[str] = sorted(next(iter(samples.values())))
    tallies = {a: {MARK_BETTER: 0, MARK_WORSE: 0, MARK_SIMILAR: 0} for a in algos}

    for (problem, dim), per_algo in sorted(samples.items()):
        means = np.array([float(np.mean(per_algo[a])) for a in algos])
        ranks = _average_ranks(means)
        cell = {}
        for i, algo in enumerate(algos):
            vals = np.asarray(per_algo[algo], dtype=float)
            entry = {
                "mean": float(np.mean(vals)),
                "std": float(np.std(vals)),
                "rank": float(ranks[i]),
            }
            if algo != baseline:
                if vals.size >= 3 and np.asarray(per_algo[baseline]).size >= 3:
                    mark = significance_mark(vals, per_algo[baseline], alpha)
                else:
                    mark = MARK_SIMILAR  # too few runs to test
                entry["mark"] = mark
                tallies[algo][mark] += 1
            cell[algo] = entry
        report.cells[(problem, dim)] = cell
        rank_matrix[f"{problem}|{dim}"] = {a: cell[a]["mean"] for a in algos}

    report.mean_ranks = mean_rank(rank_matrix)
    report.tallies = {a: t for a, t in tallies.items() if a != baseline}
    return report
