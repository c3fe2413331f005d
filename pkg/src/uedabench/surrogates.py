"""Surrogate regressors with predictive uncertainty.

Two models share one fit/predict surface: a squared-exponential Gaussian
process (inputs min-max scaled, targets standardized, hyperparameters picked
by log-marginal-likelihood over a small fixed grid) and a bootstrap
regression forest whose uncertainty is the spread of tree predictions.
Both report a (mean, std) pair per query point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy.linalg import solve_triangular
from sklearn.ensemble import RandomForestRegressor

from .errors import ModelFitError

# Hyperparameter grid, in scaled units (inputs in [0,1]^n, targets ~ N(0,1)).
LENGTH_GRID = (0.05, 0.1, 0.2, 0.4, 0.8, 1.6)
SIGNAL_GRID = (0.5, 1.0, 2.0)
NOISE_GRID = (1e-4, 1e-2, 1e-1)

_JITTER_START = 1e-10
_JITTER_MAX = 1e-4


class Prediction(NamedTuple):
    mean: float
    std: float


class Dataset:
    """Point store for surrogate training, optionally capped to the best-y."""

    def __init__(self, dim: int, cap: Optional[int] = None):
        self.dim = dim
        self.cap = cap
        self._xs: list[np.ndarray] = []
        self._ys: list[float] = []

    def __len__(self) -> int:
        return len(self._xs)

    @property
    def xs(self) -> np.ndarray:
        return np.array(self._xs, dtype=float).reshape(len(self._xs), self.dim)

    @property
    def ys(self) -> np.ndarray:
        return np.array(self._ys, dtype=float)

    def insert(self, x: np.ndarray, y: float) -> None:
        """Append a point; if over cap, drop the single worst-y point."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"expected shape ({self.dim},), got {x.shape}")
        self._xs.append(x.copy())
        self._ys.append(float(y))
        if self.cap is not None and len(self._xs) > self.cap:
            worst = int(np.argmax(self._ys))
            del self._xs[worst]
            del self._ys[worst]

    def best(self) -> tuple[np.ndarray, float]:
        i = int(np.argmin(self._ys))
        return self._xs[i], self._ys[i]

    def top(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """The k smallest-y points, ascending, ties by insertion order."""
        order = np.argsort(self._ys, kind="stable")[:k]
        return self.xs[order], self.ys[order]


def dataset_insert(dataset: Dataset, x: np.ndarray, y: float) -> Dataset:
    """Functional alias for Dataset.insert (mutates and returns dataset)."""
    dataset.insert(x, y)
    return dataset


def _sqdist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = a[:, None, :] - b[None, :, :]
    return np.sum(d * d, axis=-1)


@dataclass
class GPModel:
    """Fitted squared-exponential GP in scaled space."""

    sigma_f: float
    length: float
    sigma_n: float
    jitter: float
    x_lo: np.ndarray          # per-dim input shift
    x_range: np.ndarray       # per-dim input scale (degenerate dims -> 1)
    y_mean: float
    y_std: float
    xs_scaled: np.ndarray     # (m, n) training inputs in [0,1]^n
    ys_scaled: np.ndarray     # (m,) standardized targets
    chol: np.ndarray          # lower Cholesky factor of K + (sigma_n^2+jitter) I
    alpha: np.ndarray         # (K + noise I)^{-1} y, scaled space
    log_marginal: float

    def predict(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and latent std for a (q, n) batch, original units."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        xs = (X - self.x_lo) / self.x_range
        ks = self.sigma_f**2 * np.exp(
            -_sqdist(xs, self.xs_scaled) / (2.0 * self.length**2)
        )
        mean = ks @ self.alpha
        w = solve_triangular(self.chol, ks.T, lower=True)
        var = self.sigma_f**2 - np.sum(w * w, axis=0)
        std = np.sqrt(np.clip(var, 0.0, None))
        return mean * self.y_std + self.y_mean, std * self.y_std


def _chol_with_jitter(K: np.ndarray) -> tuple[np.ndarray, float]:
    """Cholesky of K + jitter*I, escalating jitter tenfold up to the cap."""
    jitter = 0.0
    while True:
        try:
            return np.linalg.cholesky(K + jitter * np.eye(K.shape[0])), jitter
        except np.linalg.LinAlgError:
            jitter = _JITTER_START if jitter == 0.0 else jitter * 10.0
            if jitter > _JITTER_MAX:
                raise ModelFitError(
                    "kernel matrix not positive definite after max jitter"
                )


def _lml(chol: np.ndarray, alpha: np.ndarray, y: np.ndarray) -> float:
    m = y.size
    return float(
        -0.5 * y @ alpha
        - np.sum(np.log(np.diag(chol)))
        - 0.5 * m * np.log(2.0 * np.pi)
    )


def gp_fit(
    dataset: Dataset,
    hyperparams: Optional[tuple[float, float, float]] = None,
) -> GPModel:
    """Fit the GP, selecting (length, sigma_f, sigma_n) by grid search.

    `hyperparams` = (sigma_f, length, sigma_n) pins the cell explicitly
    (useful for noise-free interpolation where only jitter regularizes).
    """
    m = len(dataset)
    if m < 2:
        raise ValueError(f"need at least 2 training points, got {m}")
    X, y = dataset.xs, dataset.ys

    x_lo = X.min(axis=0)
    x_range = X.max(axis=0) - x_lo
    x_range[x_range == 0.0] = 1.0
    xs = (X - x_lo) / x_range

    y_mean = float(np.mean(y))
    y_std = float(np.std(y))
    if y_std == 0.0:
        y_std = 1.0
    ys = (y - y_mean) / y_std

    D2 = _sqdist(xs, xs)
    if hyperparams is not None:
        grid = [hyperparams]
    else:
        grid = [
            (sf, ell, sn)
            for ell in LENGTH_GRID
            for sf in SIGNAL_GRID
            for sn in NOISE_GRID
        ]

    best = None
    for sf, ell, sn in grid:
        K = sf**2 * np.exp(-D2 / (2.0 * ell**2)) + sn**2 * np.eye(m)
        try:
            chol, jitter = _chol_with_jitter(K)
        except ModelFitError:
            if hyperparams is not None:
                raise
            continue
        alpha = solve_triangular(
            chol.T, solve_triangular(chol, ys, lower=True), lower=False
        )
        lml = _lml(chol, alpha, ys)
        if best is None or lml > best[0]:
            best = (lml, sf, ell, sn, jitter, chol, alpha)
    if best is None:
        raise ModelFitError("no hyperparameter cell factorized")

    lml, sf, ell, sn, jitter, chol, alpha = best
    return GPModel(
        sigma_f=sf,
        length=ell,
        sigma_n=sn,
        jitter=jitter,
        x_lo=x_lo,
        x_range=x_range,
        y_mean=y_mean,
        y_std=y_std,
        xs_scaled=xs,
        ys_scaled=ys,
        chol=chol,
        alpha=alpha,
        log_marginal=lml,
    )


def gp_predict(model: GPModel, x: np.ndarray) -> Prediction:
    """Posterior at a single point, observation noise excluded from std."""
    means, stds = model.predict(np.asarray(x, dtype=float)[None, :])
    return Prediction(float(means[0]), float(stds[0]))


def gp_log_marginal_likelihood(model: GPModel) -> float:
    """log p(y | X, theta) of the standardized training targets."""
    return model.log_marginal


@dataclass
class RFModel:
    """Bootstrap regression forest; uncertainty is cross-tree spread."""

    forest: RandomForestRegressor
    n_features: int
    max_features: int

    def predict(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        per_tree = np.stack([t.predict(X) for t in self.forest.estimators_])
        return per_tree.mean(axis=0), per_tree.std(axis=0)


def rf_fit(
    dataset: Dataset, trees: int = 100, min_leaf: int = 2, seed: int = 0
) -> RFModel:
    """Train `trees` bootstrap trees, ceil(n/3) features per split."""
    X, y = dataset.xs, dataset.ys
    if len(dataset) < min_leaf:
        raise ValueError(f"need at least min_leaf={min_leaf} points")
    n = dataset.dim
    max_features = int(np.ceil(n / 3))
    forest = RandomForestRegressor(
        n_estimators=trees,
        min_samples_leaf=min_leaf,
        max_features=max_features,
        bootstrap=True,
        random_state=seed,
        n_jobs=1,
    )
    forest.fit(X, y)
    return RFModel(forest=forest, n_features=n, max_features=max_features)


def rf_predict(model: RFModel, x: np.ndarray) -> Prediction:
    means, stds = model.predict(np.asarray(x, dtype=float)[None, :])
    return Prediction(float(means[0]), float(stds[0]))
