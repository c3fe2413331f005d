"""Acquisition functions (minimization orientation) and their inner optimizer.

EI and PI are "larger is better"; LCB (mean - sqrt(beta) * std) is "smaller is
better".  The inner optimizer is random multi-start: a fixed batch of uniform
candidates plus Gaussian perturbations around the current acquisition leaders,
so the whole step is deterministic given the generator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

N_UNIFORM = 2048
N_PERTURB = 512
N_LEADERS = 10
PERTURB_FRAC = 0.05  # perturbation sigma as a fraction of the range, per dim


@dataclass
class AcquisitionSpec:
    kind: str  # "EI" | "PI" | "LCB"
    best_y: float = np.inf
    beta: float = 2.0

    def __post_init__(self):
        if self.kind not in ("EI", "PI", "LCB"):
            raise ValueError(f"unknown acquisition kind {self.kind!r}")
        if self.kind == "LCB" and self.beta <= 0:
            raise ValueError("beta must be positive for LCB")


def _phi(z):
    return np.exp(-0.5 * z * z) / np.sqrt(2.0 * np.pi)


def expected_improvement(mean, std, best_y):
    """E[max(best_y - Y, 0)] for Y ~ N(mean, std^2); elementwise."""
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    imp = best_y - mean
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(std > 0, imp / np.where(std > 0, std, 1.0), 0.0)
    ei = np.where(
        std > 0,
        imp * ndtr(z) + std * _phi(z),
        np.maximum(imp, 0.0),
    )
    return ei if ei.ndim else float(ei)


def probability_improvement(mean, std, best_y):
    """P[Y < best_y] for Y ~ N(mean, std^2); degenerate std=0 is a step."""
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(std > 0, (best_y - mean) / np.where(std > 0, std, 1.0), 0.0)
    pi = np.where(std > 0, ndtr(z), (mean < best_y).astype(float))
    return pi if pi.ndim else float(pi)


def lower_confidence_bound(mean, std, beta):
    """mean - sqrt(beta) * std; lower is better."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    out = np.asarray(mean, dtype=float) - np.sqrt(beta) * np.asarray(std, dtype=float)
    return out if out.ndim else float(out)


def _scores(spec: AcquisitionSpec, means, stds):
    """Acquisition values recast so that larger is always better."""
    if spec.kind == "EI":
        return expected_improvement(means, stds, spec.best_y)
    if spec.kind == "PI":
        return probability_improvement(means, stds, spec.best_y)
    return -lower_confidence_bound(means, stds, spec.beta)


def argmax_acquisition(
    model,
    spec: AcquisitionSpec,
    lower: np.ndarray,
    upper: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """Best of 2048 uniform candidates + 512 perturbations of the leaders.

    Ties resolve to the lowest candidate index (np.argmax picks the first
    maximum), so a totally flat acquisition is still deterministic.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    n = lower.size
    cands = rng.uniform(lower, upper, size=(N_UNIFORM, n))
    means, stds = model.predict(cands)
    scores = _scores(spec, means, stds)

    leaders = np.argsort(-scores, kind="stable")[:N_LEADERS]
    sigma = PERTURB_FRAC * (upper - lower)
    centers = cands[leaders[np.arange(N_PERTURB) % leaders.size]]
    perturbed = np.clip(centers + rng.normal(0.0, 1.0, (N_PERTURB, n)) * sigma,
                        lower, upper)
    p_means, p_stds = model.predict(perturbed)
    p_scores = _scores(spec, p_means, p_stds)

    all_cands = np.vstack([cands, perturbed])
    all_scores = np.concatenate([scores, p_scores])
    return all_cands[int(np.argmax(all_scores))].copy()
