"""One-dimensional comparative study on f(x) = x*sin(x) over [0, 10].

Regenerates plottable data for two questions: how do GP and RF differ in fit
and uncertainty (and what happens to expected improvement when their
uncertainties are swapped), and how does seeding reproduction with the whole
surrogate-selected subset, rather than its single best point, shift the
offspring distribution.  Maximization of f is handled by minimizing -f
internally; all reported curves are in f units.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import evolution
from .acquisition import expected_improvement
from .evolution import Individual, Population
from .optimizers import latin_hypercube
from .surrogates import Dataset, gp_fit, rf_fit

GRID_SIZE = 512
DEFAULT_NOISE_STD = 0.3
N_TRAIN = 7
OPT_REGION = (7.0, 9.0)

_LO = np.array([0.0])
_HI = np.array([10.0])


def _f(x):
    return x * np.sin(x)


def _training_data(seed: int, noise_std: float):
    rng = np.random.default_rng(seed)
    xs = latin_hypercube(N_TRAIN, _LO, _HI, rng)[:, 0]
    obs = _f(xs) + rng.normal(0.0, noise_std, N_TRAIN)
    return rng, xs, obs


@dataclass
class DemoGrid:
    xs: np.ndarray
    true_f: np.ndarray
    gp_mean: np.ndarray
    gp_std: np.ndarray
    rf_mean: np.ndarray
    rf_std: np.ndarray
    ei_gp: np.ndarray
    ei_rf: np.ndarray
    ei_star_gp: np.ndarray  # GP mean with RF uncertainty
    ei_star_rf: np.ndarray  # RF mean with GP uncertainty
    next_gp: float
    next_rf: float
    train_x: np.ndarray
    train_f: np.ndarray

    _COLUMNS = (
        "xs", "true_f", "gp_mean", "gp_std", "rf_mean", "rf_std",
        "ei_gp", "ei_rf", "ei_star_gp", "ei_star_rf",
    )

    def write_csv(self, path: Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self._COLUMNS)
            for row in zip(*(getattr(self, c) for c in self._COLUMNS)):
                w.writerow([repr(float(v)) for v in row])


def demo_fit_1d(seed: int, noise_std: float = DEFAULT_NOISE_STD) -> DemoGrid:
    """Fit GP and RF to 7 noisy samples; evaluate fits and EI on a dense grid."""
    _, xs, obs = _training_data(seed, noise_std)
    ds = Dataset(dim=1)
    for x, o in zip(xs, obs):
        ds.insert(np.array([x]), -o)  # minimize -f
    gp = gp_fit(ds)
    rf = rf_fit(ds, seed=seed)

    grid = np.linspace(0.0, 10.0, GRID_SIZE)
    G = grid[:, None]
    gp_m, gp_s = gp.predict(G)
    rf_m, rf_s = rf.predict(G)
    best = float(np.min(ds.ys))

    ei_gp = expected_improvement(gp_m, gp_s, best)
    ei_rf = expected_improvement(rf_m, rf_s, best)
    ei_star_gp = expected_improvement(gp_m, rf_s, best)
    ei_star_rf = expected_improvement(rf_m, gp_s, best)

    return DemoGrid(
        xs=grid,
        true_f=_f(grid),
        gp_mean=-gp_m,
        gp_std=gp_s,
        rf_mean=-rf_m,
        rf_std=rf_s,
        ei_gp=ei_gp,
        ei_rf=ei_rf,
        ei_star_gp=ei_star_gp,
        ei_star_rf=ei_star_rf,
        next_gp=float(grid[np.argmax(ei_gp)]),
        next_rf=float(grid[np.argmax(ei_rf)]),
        train_x=xs,
        train_f=obs,
    )


@dataclass
class DensityDemo:
    surrogate: str
    samples_all: np.ndarray    # offspring seeded by P + whole selected subset
    samples_best: np.ndarray   # offspring seeded by P + single best point
    o_all: np.ndarray
    o_best: float
    fraction_all: float        # mass of samples_all inside the optimum region
    fraction_best: float

    def summary(self) -> dict:
        return {
            "surrogate": self.surrogate,
            "region": list(OPT_REGION),
            "fraction_all": self.fraction_all,
            "fraction_best": self.fraction_best,
            "o_best": self.o_best,
        }


def _sample_offspring(pop: Population, count: int,
                      rng: np.random.Generator) -> np.ndarray:
    out = []
    total = 0
    while total < count:
        batch = evolution.generate_offspring(pop, _LO, _HI, rng)
        out.append(batch[:, 0])
        total += batch.shape[0]
    return np.concatenate(out)[:count]


def demo_offspring_density(
    seed: int,
    n_samples: int = 10000,
    surrogate: str = "GP",
    noise_std: float = DEFAULT_NOISE_STD,
) -> DensityDemo:
    """Compare offspring mass near the optimum for the two seeding choices.

    100 uniform candidates are ranked by the surrogate's predicted value; the
    top 20 form the selected subset, its best member the single best point.
    Offspring are then sampled from the training points merged with each.
    """
    if n_samples < 1000:
        raise ValueError("need n_samples >= 1000")
    rng, xs, obs = _training_data(seed, noise_std)
    ds = Dataset(dim=1)
    for x, o in zip(xs, obs):
        ds.insert(np.array([x]), -o)
    model = gp_fit(ds) if surrogate == "GP" else rf_fit(ds, seed=seed)

    cands = rng.uniform(0.0, 10.0, 100)
    means, _ = model.predict(cands[:, None])
    order = np.argsort(means, kind="stable")[:20]
    o_all = cands[order]
    o_best = float(o_all[0])

    parents = [Individual(x=np.array([x]), fitness=float(-o))
               for x, o in zip(xs, obs)]
    uneval = [Individual(x=np.array([c]), predicted=float(means[i]))
              for i, c in zip(order, o_all)]
    pop_all = Population(members=parents + uneval)
    pop_best = Population(members=parents + [uneval[0]])

    samples_all = _sample_offspring(pop_all, n_samples, rng)
    samples_best = _sample_offspring(pop_best, n_samples, rng)
    lo, hi = OPT_REGION
    return DensityDemo(
        surrogate=surrogate,
        samples_all=samples_all,
        samples_best=samples_best,
        o_all=o_all,
        o_best=o_best,
        fraction_all=float(np.mean((samples_all >= lo) & (samples_all <= hi))),
        fraction_best=float(np.mean((samples_best >= lo) & (samples_best <= hi))),
    )


def write_density_outputs(demos: list[DensityDemo], out_dir: Path,
                          fit: DemoGrid) -> None:
    """Two single-column CSVs per surrogate plus a JSON summary."""
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = {
        "next_gp": fit.next_gp,
        "next_rf": fit.next_rf,
        "demos": [],
    }
    for demo in demos:
        tag = demo.surrogate.lower()
        for label, samples in (("all", demo.samples_all),
                               ("best", demo.samples_best)):
            path = out_dir / f"density_{tag}_{label}.csv"
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["x"])
                for v in samples:
                    w.writerow([repr(float(v))])
        summary["demos"].append(demo.summary())
    with open(out_dir / "density_summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
