"""Optimization loops: Bayesian optimization, the unevaluated-solution EDA
(UEDA) and its ablation variants, and the plain EDA/LS baseline.

All loops consume an EvaluationBudget, own a single seeded generator, and
emit a per-evaluation convergence trace, so a (config, seed, problem) triple
replays bit-identically on deterministic problems.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import evolution, surrogates
from .acquisition import AcquisitionSpec, argmax_acquisition
from .errors import ConfigurationError
from .evolution import Individual, Population
from .problems import EvaluationBudget, Problem, evaluate
from .surrogates import Dataset

ALGORITHMS = ("BO", "UEDA", "UEDA_AL", "UEDA_NS", "EDALS")
SURROGATES = ("GP", "RF")


@dataclass
class OptimizerConfig:
    algorithm: str = "UEDA"
    surrogate: str = "GP"
    pop_size: int = 50
    o_all_size: int = 25
    archive_cap: int = 100
    acquisition: str = "EI"
    init_samples: Optional[int] = None  # None -> algorithm-specific default
    seed: int = 0
    rf_trees: int = 100
    rf_min_leaf: int = 2
    lcb_beta: float = 2.0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigurationError(f"unknown algorithm {self.algorithm!r}")
        if self.surrogate not in SURROGATES:
            raise ConfigurationError(f"unknown surrogate {self.surrogate!r}")
        if not (1 <= self.o_all_size <= self.pop_size):
            raise ConfigurationError("need 1 <= o_all_size <= pop_size")


@dataclass
class ConvergenceTrace:
    """Per-evaluation record of the run."""

    fe_index: list[int] = field(default_factory=list)
    xs: list[np.ndarray] = field(default_factory=list)
    fs: list[float] = field(default_factory=list)
    best_so_far: list[float] = field(default_factory=list)

    def record(self, x: np.ndarray, f: float) -> None:
        best = min(f, self.best_so_far[-1]) if self.best_so_far else f
        self.fe_index.append(len(self.fe_index) + 1)
        self.xs.append(np.array(x, dtype=float))
        self.fs.append(float(f))
        self.best_so_far.append(float(best))

    def __len__(self) -> int:
        return len(self.fe_index)


@dataclass
class RunResult:
    trace: ConvergenceTrace
    best_x: np.ndarray
    best_f: float
    config: OptimizerConfig
    seed: int
    wall_s: float


def latin_hypercube(
    n_samples: int,
    lower: np.ndarray,
    upper: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """(n_samples, n) points, one per equal-width stratum per dimension."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    n = lower.size
    u = np.empty((n_samples, n))
    for j in range(n):
        strata = rng.permutation(n_samples)
        u[:, j] = (strata + rng.random(n_samples)) / n_samples
    return lower + u * (upper - lower)


class _Run:
    """Shared bookkeeping: seeded generator, budget, trace."""

    def __init__(self, problem: Problem, config: OptimizerConfig,
                 budget: EvaluationBudget):
        self.problem = problem
        self.config = config
        self.budget = budget
        self.rng = np.random.default_rng(config.seed)
        self.trace = ConvergenceTrace()

    def eval(self, x: np.ndarray) -> float:
        f = evaluate(self.problem, x, self.budget, self.rng)
        self.trace.record(x, f)
        return f

    def fit(self, dataset: Dataset):
        if self.config.surrogate == "GP":
            return surrogates.gp_fit(dataset)
        return surrogates.rf_fit(
            dataset,
            trees=self.config.rf_trees,
            min_leaf=self.config.rf_min_leaf,
            seed=self.config.seed,
        )

    def screen_fit(self, dataset: Dataset):
        """Surrogate used to rank offspring, plus an inverse target map.

        GP targets are compressed with a shifted log before fitting: the
        stationary kernel is a poor fit once the archive spans several
        orders of magnitude, and the warp is monotone so offspring ranks
        are unaffected.  Predictions destined for unevaluated individuals
        must go through the returned `unwarp` to stay comparable with real
        fitness values.  Tree ensembles split on ranks well enough already
        and are left alone.
        """
        if self.config.surrogate != "GP":
            return self.fit(dataset), lambda v: float(v)
        shift = float(dataset.ys.min())
        spread = float(np.median(dataset.ys)) - shift
        if spread <= 0.0:
            spread = 1.0
        warped = Dataset(dataset.dim, cap=dataset.cap)
        for x, y in zip(dataset.xs, dataset.ys):
            warped.insert(x, float(np.log1p((y - shift) / spread)))
        model = surrogates.gp_fit(warped)

        def unwarp(v: float) -> float:
            return float(np.expm1(v) * spread + shift)

        return model, unwarp

    def result(self, t0: float) -> RunResult:
        i = int(np.argmin(self.trace.fs))
        return RunResult(
            trace=self.trace,
            best_x=self.trace.xs[i],
            best_f=self.trace.fs[i],
            config=self.config,
            seed=self.config.seed,
            wall_s=time.perf_counter() - t0,
        )


@dataclass
class SelectionResult:
    o_all: np.ndarray       # (k, n) candidates, ascending predicted mean
    o_best: np.ndarray      # (n,) best of o_all
    indices: np.ndarray     # offspring indices of o_all, stable order
    means: np.ndarray       # predicted means of the full offspring batch


def surrogate_select(offspring: np.ndarray, model, k: int) -> SelectionResult:
    """The k offspring with smallest predicted mean; ties by offspring index."""
    offspring = np.atleast_2d(np.asarray(offspring, dtype=float))
    if k > offspring.shape[0]:
        raise ValueError("k exceeds number of offspring")
    means, _ = model.predict(offspring)
    order = np.argsort(means, kind="stable")[:k]
    return SelectionResult(
        o_all=offspring[order].copy(),
        o_best=offspring[order[0]].copy(),
        indices=order,
        means=means,
    )


def _bo_init_count(problem: Problem, config: OptimizerConfig) -> int:
    if config.init_samples is not None:
        return config.init_samples
    return min(2 * (problem.dim + 1), 50)


def run_bo(problem: Problem, config: OptimizerConfig,
           budget: EvaluationBudget) -> RunResult:
    """Sequential model-based loop: fit, maximize acquisition, evaluate."""
    t0 = time.perf_counter()
    run = _Run(problem, config, budget)
    n_init = _bo_init_count(problem, config)
    if budget.max_fes < n_init:
        n_init = budget.max_fes

    data = Dataset(problem.dim)  # BO keeps every observation
    for x in latin_hypercube(n_init, problem.lower, problem.upper, run.rng):
        data.insert(x, run.eval(x))

    while budget.remaining > 0:
        model = run.fit(data)
        spec = AcquisitionSpec(
            kind=config.acquisition,
            best_y=float(np.min(data.ys)),
            beta=config.lcb_beta,
        )
        x = argmax_acquisition(model, spec, problem.lower, problem.upper, run.rng)
        data.insert(x, run.eval(x))
    return run.result(t0)


def _archive_top(data: Dataset, count: int) -> list[Individual]:
    xs, ys = data.top(count)
    return [Individual(x=x, fitness=float(y)) for x, y in zip(xs, ys)]


def run_ueda(problem: Problem, config: OptimizerConfig,
             budget: EvaluationBudget, variant: str = "standard") -> RunResult:
    """Surrogate-screened EDA; the variant controls what gets evaluated and
    whether unevaluated candidates rejoin the population.

    standard: evaluate only the predicted-best offspring (1 FE/generation);
              the rest of the surrogate-selected subset rejoins unevaluated.
    AL:       evaluate the whole selected subset (o_all_size FEs/generation).
    NS:       evaluate only the predicted-best; unevaluated ones are dropped.
    """
    if variant not in ("standard", "AL", "NS"):
        raise ConfigurationError(f"unknown UEDA variant {variant!r}")
    t0 = time.perf_counter()
    run = _Run(problem, config, budget)
    N = config.pop_size
    k = config.o_all_size
    n_init = config.init_samples if config.init_samples is not None else N
    n_init = min(n_init, budget.max_fes)

    data = Dataset(problem.dim, cap=config.archive_cap)
    pop = Population(members=[])
    for x in latin_hypercube(n_init, problem.lower, problem.upper, run.rng):
        f = run.eval(x)
        data.insert(x, f)
        pop.members.append(Individual(x=x, fitness=f))

    while budget.remaining > 0:
        model, unwarp = run.screen_fit(data)
        offspring = evolution.generate_offspring(
            pop, problem.lower, problem.upper, run.rng
        )
        sel = surrogate_select(offspring, model, min(k, offspring.shape[0]))

        if variant == "AL":
            for idx in sel.indices:
                if budget.remaining == 0:
                    break
                data.insert(offspring[idx], run.eval(offspring[idx]))
            pop = Population(members=_archive_top(data, N))
        else:
            data.insert(sel.o_best, run.eval(sel.o_best))
            if variant == "NS":
                pop = Population(members=_archive_top(data, N))
            else:
                kept = _archive_top(data, N)
                unevaluated = [
                    Individual(x=offspring[i].copy(),
                               predicted=unwarp(sel.means[i]))
                    for i in sel.indices
                ]
                pop = Population(members=kept + unevaluated)
    return run.result(t0)


def run_edals_baseline(problem: Problem, config: OptimizerConfig,
                       budget: EvaluationBudget) -> RunResult:
    """Generational EDA with no surrogate: evaluate every offspring, keep the
    elitist best N of parents plus offspring."""
    t0 = time.perf_counter()
    run = _Run(problem, config, budget)
    N = config.pop_size
    n_init = config.init_samples if config.init_samples is not None else N
    n_init = min(n_init, budget.max_fes)

    pop = Population(members=[])
    for x in latin_hypercube(n_init, problem.lower, problem.upper, run.rng):
        pop.members.append(Individual(x=x, fitness=run.eval(x)))

    while budget.remaining > 0:
        offspring = evolution.generate_offspring(
            pop, problem.lower, problem.upper, run.rng
        )
        children = []
        for x in offspring:
            if budget.remaining == 0:
                break
            children.append(Individual(x=x, fitness=run.eval(x)))
        merged = sorted(pop.members + children, key=lambda ind: ind.sort_key)
        pop = Population(members=merged[:N])
    return run.result(t0)


def run_algorithm(problem: Problem, config: OptimizerConfig,
                  budget: EvaluationBudget) -> RunResult:
    """Dispatch on config.algorithm."""
    if config.algorithm == "BO":
        return run_bo(problem, config, budget)
    if config.algorithm == "UEDA":
        return run_ueda(problem, config, budget, "standard")
    if config.algorithm == "UEDA_AL":
        return run_ueda(problem, config, budget, "AL")
    if config.algorithm == "UEDA_NS":
        return run_ueda(problem, config, budget, "NS")
    if config.algorithm == "EDALS":
        return run_edals_baseline(problem, config, budget)
    raise ConfigurationError(f"unknown algorithm {config.algorithm!r}")
