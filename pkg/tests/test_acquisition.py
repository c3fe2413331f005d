"""Acquisition functions against Monte-Carlo and closed-form oracles."""

import numpy as np
import pytest
from scipy.special import ndtr

from uedabench.acquisition import (
    AcquisitionSpec,
    argmax_acquisition,
    expected_improvement,
    lower_confidence_bound,
    probability_improvement,
)


def test_ei_matches_monte_carlo():
    """Analytic EI vs E[max(best - Y, 0)] at 1e6 draws, 3 standard errors."""
    rng = np.random.default_rng(0)
    n_draws = 1_000_000
    for _ in range(20):
        mean = rng.uniform(-5, 5)
        std = rng.uniform(0.05, 3.0)
        best = rng.uniform(-5, 5)
        y = rng.normal(mean, std, size=n_draws)
        imp = np.maximum(best - y, 0.0)
        mc = imp.mean()
        se = imp.std(ddof=1) / np.sqrt(n_draws)
        # The floor covers triples where every draw is censored to zero
        # (se = 0 while the analytic tail value is tiny but positive).
        assert abs(expected_improvement(mean, std, best) - mc) <= 3.0 * se + 1e-7


def test_ei_closed_form_spot_values():
    # mean == best: EI = std * phi(0)
    assert expected_improvement(0.0, 1.0, 0.0) == pytest.approx(
        1.0 / np.sqrt(2 * np.pi)
    )
    # Deep improvement with tiny std tends to best - mean.
    assert expected_improvement(-10.0, 1e-9, 0.0) == pytest.approx(10.0)
    # Zero std degenerates to max(best - mean, 0).
    assert expected_improvement(3.0, 0.0, 1.0) == 0.0
    assert expected_improvement(-2.0, 0.0, 1.0) == 3.0


def test_pi_is_gaussian_cdf():
    rng = np.random.default_rng(1)
    for _ in range(50):
        mean, std, best = rng.uniform(-4, 4), rng.uniform(0.1, 2), rng.uniform(-4, 4)
        assert probability_improvement(mean, std, best) == pytest.approx(
            float(ndtr((best - mean) / std))
        )
    assert probability_improvement(1.0, 0.0, 2.0) == 1.0
    assert probability_improvement(2.0, 0.0, 1.0) == 0.0


def test_lcb_formula_and_validation():
    assert lower_confidence_bound(1.0, 2.0, 4.0) == pytest.approx(1.0 - 2 * 2.0)
    with pytest.raises(ValueError):
        lower_confidence_bound(0.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        AcquisitionSpec("LCB", beta=-1.0)


def test_spec_rejects_unknown_kind():
    with pytest.raises(ValueError):
        AcquisitionSpec("UCB")


def test_vectorized_agrees_with_scalar():
    means = np.array([-1.0, 0.0, 2.5])
    stds = np.array([0.5, 0.0, 1.5])
    ei = expected_improvement(means, stds, 1.0)
    for i in range(3):
        assert ei[i] == pytest.approx(expected_improvement(means[i], stds[i], 1.0))


def test_ei_monotone_in_uncertainty():
    # For fixed mean above the incumbent, more std means more EI.
    stds = np.linspace(0.01, 3.0, 50)
    ei = expected_improvement(2.0, stds, 0.0)
    assert np.all(np.diff(ei) > 0.0)


class _BowlModel:
    """Deterministic quadratic stand-in with constant uncertainty."""

    def __init__(self, center, std=0.1):
        self.center = np.asarray(center, dtype=float)
        self.std = std

    def predict(self, X):
        X = np.atleast_2d(X)
        means = np.sum((X - self.center) ** 2, axis=1)
        return means, np.full(X.shape[0], self.std)


def test_argmax_finds_bowl_minimum():
    model = _BowlModel([0.5, -0.25])
    lower, upper = np.full(2, -2.0), np.full(2, 2.0)
    spec = AcquisitionSpec("EI", best_y=5.0)
    x = argmax_acquisition(model, spec, lower, upper, np.random.default_rng(3))
    assert np.linalg.norm(x - model.center) < 0.05


def test_argmax_deterministic_and_in_bounds():
    model = _BowlModel([1.5, 1.5], std=0.5)
    lower, upper = np.full(2, -2.0), np.full(2, 2.0)
    spec = AcquisitionSpec("LCB", best_y=0.0, beta=2.0)
    a = argmax_acquisition(model, spec, lower, upper, np.random.default_rng(9))
    b = argmax_acquisition(model, spec, lower, upper, np.random.default_rng(9))
    assert np.array_equal(a, b)
    assert np.all(a >= lower) and np.all(a <= upper)


def test_argmax_flat_scores_returns_first_candidate():
    class Flat:
        def predict(self, X):
            X = np.atleast_2d(X)
            return np.zeros(X.shape[0]), np.zeros(X.shape[0])

    lower, upper = np.zeros(1), np.ones(1)
    rng = np.random.default_rng(4)
    first = rng.uniform(lower, upper, size=(2048, 1))[0]
    got = argmax_acquisition(
        Flat(), AcquisitionSpec("PI", best_y=-1.0), lower, upper,
        np.random.default_rng(4),
    )
    assert got[0] == pytest.approx(first[0])
