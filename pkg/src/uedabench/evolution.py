"""Population machinery: variable-width histogram model and local search.

The histogram (one independent marginal per dimension) squeezes its middle
H-2 bins onto the interval spanned by the population, leaving the two end
bins with a small fixed count so sampling concentrates on occupied space
without ever zeroing out the rest of the box.  Offspring generation samples
the histogram, then optionally replaces coordinates with the vertex of a
one-dimensional quadratic fit through three good population members.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .problems import midpoint_repair

DEFAULT_H = 15
DEFAULT_PB = 0.2
DEFAULT_PC = 0.2

_END_COUNT = 0.1
_DEGENERATE_WIDTH = 1e-9  # fraction of the box range for an all-equal dimension
_COINCIDENT_TOL = 1e-12


@dataclass
class Individual:
    """Decision vector with true fitness, surrogate estimate, or neither."""

    x: np.ndarray
    fitness: Optional[float] = None
    predicted: Optional[float] = None

    @property
    def evaluated(self) -> bool:
        return self.fitness is not None

    @property
    def sort_key(self) -> float:
        """True fitness when known, else the surrogate's estimate."""
        if self.fitness is not None:
            return self.fitness
        if self.predicted is not None:
            return self.predicted
        raise ValueError("individual has neither fitness nor prediction")


@dataclass
class Population:
    members: list[Individual]

    def __len__(self) -> int:
        return len(self.members)

    def sorted_members(self) -> list[Individual]:
        """Reproduction order: model-selected (unevaluated) members lead,
        each group ascending by its own key; stable within ties.

        Unevaluated members are the survivors of the latest surrogate
        screen, so they mark where the search currently believes the
        optimum sits; putting them ahead of the evaluated backlog focuses
        the local-search trios on that frontier instead of on archive
        points that may be generations old.
        """
        un = sorted((m for m in self.members if m.fitness is None),
                    key=lambda ind: ind.sort_key)
        ev = sorted((m for m in self.members if m.fitness is not None),
                    key=lambda ind: ind.sort_key)
        return un + ev

    def xs(self) -> np.ndarray:
        return np.array([ind.x for ind in self.members])


@dataclass
class VWHModel:
    """Per-dimension bin edges (n, H+1) and probabilities (n, H)."""

    edges: np.ndarray
    probs: np.ndarray

    @property
    def n_bins(self) -> int:
        return self.probs.shape[1]


def vwh_build(
    population_xs: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    H: int = DEFAULT_H,
) -> VWHModel:
    """Build the histogram from the population's decision vectors."""
    xs = np.atleast_2d(np.asarray(population_xs, dtype=float))
    m, n = xs.shape
    if H < 3:
        raise ValueError("need H >= 3 bins")
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)

    edges = np.empty((n, H + 1))
    probs = np.empty((n, H))
    for j in range(n):
        col = np.sort(xs[:, j])
        lo, hi = lower[j], upper[j]
        degenerate = col[0] == col[-1]
        if degenerate:
            w = _DEGENERATE_WIDTH * (hi - lo)
            a1 = max(col[0] - 0.5 * w, lo)
            aH1 = min(col[0] + 0.5 * w, hi)
        else:
            a1 = max(col[0] - 0.5 * (col[1] - col[0]), lo)
            aH1 = min(col[-1] + 0.5 * (col[-1] - col[-2]), hi)
        mid = np.linspace(a1, aH1, H - 1)
        e = np.concatenate([[lo], mid, [hi]])

        counts = np.zeros(H)
        # middle bin index for each point: 1 .. H-2 (0-based)
        idx = np.searchsorted(mid, xs[:, j], side="right") - 1
        idx = np.clip(idx, 0, H - 3) + 1
        np.add.at(counts, idx, 1.0)
        if not degenerate:
            if e[1] > e[0]:
                counts[0] = _END_COUNT
            if e[H] > e[H - 1]:
                counts[H - 1] = _END_COUNT
        edges[j] = e
        probs[j] = counts / counts.sum()
    return VWHModel(edges=edges, probs=probs)


def vwh_sample(model: VWHModel, rng: np.random.Generator) -> np.ndarray:
    """One draw: per dimension pick a bin by probability, then uniform in it."""
    return vwh_sample_many(model, 1, rng)[0]


def vwh_sample_many(
    model: VWHModel, count: int, rng: np.random.Generator
) -> np.ndarray:
    """(count, n) independent draws from the histogram."""
    n, H = model.probs.shape
    cum = np.cumsum(model.probs, axis=1)
    cum[:, -1] = 1.0  # guard against rounding
    u = rng.random((count, n))
    out = np.empty((count, n))
    for j in range(n):
        h = np.searchsorted(cum[j], u[:, j], side="right")
        h = np.minimum(h, H - 1)
        lo = model.edges[j, h]
        hi = model.edges[j, h + 1]
        out[:, j] = lo + rng.random(count) * (hi - lo)
    return out


def quadratic_local_search(
    coords: np.ndarray, fitnesses: np.ndarray
) -> Optional[float]:
    """Vertex of the parabola through three (coordinate, fitness) pairs.

    Returns None when the parabola is flat/concave (a <= 0) or any two
    coordinates coincide, i.e. no usable interior minimum.
    """
    x1, x2, x3 = (float(c) for c in coords)
    f1, f2, f3 = (float(f) for f in fitnesses)
    if (
        abs(x1 - x2) < _COINCIDENT_TOL
        or abs(x1 - x3) < _COINCIDENT_TOL
        or abs(x2 - x3) < _COINCIDENT_TOL
    ):
        return None
    d12 = (f1 - f2) / (x1 - x2)
    d13 = (f1 - f3) / (x1 - x3)
    a = (d12 - d13) / (x2 - x3)
    if a <= 0.0:
        return None
    b = d12 - a * (x1 + x2)
    return -b / (2.0 * a)


def generate_offspring(
    population: Population,
    lower: np.ndarray,
    upper: np.ndarray,
    rng: np.random.Generator,
    H: int = DEFAULT_H,
    p_b: float = DEFAULT_PB,
    p_c: float = DEFAULT_PC,
    n_offspring: Optional[int] = None,
) -> np.ndarray:
    """(n_offspring, n) new decision vectors from the population's histogram.

    Each offspring starts as a histogram sample; each coordinate is then,
    with probability p_c, replaced by the quadratic vertex fitted through
    three consecutive members of the floor(p_b*N) best, and finally repaired
    into bounds against the original sample.  n_offspring defaults to the
    population size.
    """
    members = population.sorted_members()
    N = len(members)
    count = N if n_offspring is None else int(n_offspring)
    if count < 1:
        raise ValueError("n_offspring must be positive")
    n = members[0].x.size
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)

    model = vwh_build(np.array([ind.x for ind in members]), lower, upper, H)
    samples = vwh_sample_many(model, count, rng)

    k_max = int(np.floor(p_b * N)) - 2
    use_ls = p_c > 0.0 and k_max >= 1
    out = np.empty((count, n))
    for i in range(count):
        u = samples[i].copy()
        if use_ls:
            k = int(rng.integers(1, k_max + 1))
            trio = members[k - 1 : k + 2]
            keys = np.array([ind.sort_key for ind in trio])
            mask = rng.random(n) < p_c
            for j in np.nonzero(mask)[0]:
                v = quadratic_local_search(
                    np.array([ind.x[j] for ind in trio]), keys
                )
                if v is not None:
                    u[j] = v
        out[i] = midpoint_repair(u, lower, upper, samples[i])
    return out
