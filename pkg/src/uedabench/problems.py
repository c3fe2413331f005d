"""Benchmark objective functions with bounds, counters and known optima.

Two suites are provided: the LZG quartet (Ellipsoid, Rosenbrock, Ackley,
Griewank) and YLLF01-09/12/13.  YLLF10 and YLLF11 are intentionally absent
(they duplicate Ackley and Griewank).  YLLF07 adds uniform [0, 1) noise per
evaluation, drawn from the generator the caller supplies, so a run owning a
seeded generator reproduces its noise stream exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import BudgetExhaustedError, ConfigurationError


@dataclass(frozen=True)
class Problem:
    """An immutable boxed minimization problem."""

    name: str
    dim: int
    lower: np.ndarray
    upper: np.ndarray
    noisy: bool
    f_star: Optional[float]
    _fn: Callable[[np.ndarray], float]

    def raw(self, x: np.ndarray) -> float:
        """Deterministic objective value, no counting, no noise."""
        return float(self._fn(np.asarray(x, dtype=float)))


@dataclass
class EvaluationBudget:
    """Counter for true objective calls; owned by a single run."""

    max_fes: int
    used: int = 0

    @property
    def remaining(self) -> int:
        return self.max_fes - self.used


def _ellipsoid(x):
    i = np.arange(1, x.size + 1)
    return np.sum(i * x**2)


def _rosenbrock(x):
    return np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (x[:-1] - 1.0) ** 2)


def _ackley(x):
    n = x.size
    s1 = np.sqrt(np.sum(x**2) / n)
    s2 = np.sum(np.cos(2.0 * np.pi * x)) / n
    return -20.0 * np.exp(-0.2 * s1) - np.exp(s2) + 20.0 + np.e


def _griewank(x):
    i = np.arange(1, x.size + 1)
    return np.sum(x**2) / 4000.0 - np.prod(np.cos(x / np.sqrt(i))) + 1.0


def _yllf01(x):
    return np.sum(x**2)


def _yllf02(x):
    a = np.abs(x)
    return np.sum(a) + np.prod(a)


def _yllf03(x):
    return np.sum(np.cumsum(x) ** 2)


def _yllf04(x):
    return np.max(np.abs(x))


def _yllf06(x):
    return np.sum(np.floor(x + 0.5) ** 2)


def _yllf07_base(x):
    i = np.arange(1, x.size + 1)
    return np.sum(i * x**4)


def _yllf08(x):
    return 418.9829 * x.size - np.sum(x * np.sin(np.sqrt(np.abs(x))))


def _yllf09(x):
    return np.sum(x**2 - 10.0 * np.cos(2.0 * np.pi * x) + 10.0)


def _penalty(x, a, k, m):
    out = np.zeros_like(x)
    hi = x > a
    lo = x < -a
    out[hi] = k * (x[hi] - a) ** m
    out[lo] = k * (-x[lo] - a) ** m
    return np.sum(out)


def _yllf12(x):
    n = x.size
    y = 1.0 + (x + 1.0) / 4.0
    s = (
        10.0 * np.sin(np.pi * y[0]) ** 2
        + np.sum((y[:-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * y[1:]) ** 2))
        + (y[-1] - 1.0) ** 2
    )
    return np.pi / n * s + _penalty(x, 10.0, 100.0, 4.0)


def _yllf13(x):
    s = (
        np.sin(3.0 * np.pi * x[0]) ** 2
        + np.sum((x[:-1] - 1.0) ** 2 * (1.0 + np.sin(3.0 * np.pi * x[1:]) ** 2))
        + (x[-1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * x[-1]) ** 2)
    )
    return 0.1 * s + _penalty(x, 5.0, 100.0, 4.0)


# name -> (function, half-width or (lo, hi), noisy, f_star)
_REGISTRY: dict[str, tuple[Callable, tuple[float, float], bool, Optional[float]]] = {
    "Ellipsoid": (_ellipsoid, (-5.12, 5.12), False, 0.0),
    "Rosenbrock": (_rosenbrock, (-2.048, 2.048), False, 0.0),
    "Ackley": (_ackley, (-32.768, 32.768), False, 0.0),
    "Griewank": (_griewank, (-600.0, 600.0), False, 0.0),
    "YLLF01": (_yllf01, (-100.0, 100.0), False, 0.0),
    "YLLF02": (_yllf02, (-10.0, 10.0), False, 0.0),
    "YLLF03": (_yllf03, (-100.0, 100.0), False, 0.0),
    "YLLF04": (_yllf04, (-100.0, 100.0), False, 0.0),
    "YLLF05": (_rosenbrock, (-30.0, 30.0), False, 0.0),
    "YLLF06": (_yllf06, (-100.0, 100.0), False, 0.0),
    "YLLF07": (_yllf07_base, (-1.28, 1.28), True, None),
    "YLLF08": (_yllf08, (-500.0, 500.0), False, 0.0),
    "YLLF09": (_yllf09, (-5.12, 5.12), False, 0.0),
    "YLLF12": (_yllf12, (-50.0, 50.0), False, 0.0),
    "YLLF13": (_yllf13, (-50.0, 50.0), False, 0.0),
}

PROBLEM_NAMES = tuple(_REGISTRY)


def make_problem(name: str, dim: int) -> Problem:
    """Instantiate a registered problem at the given dimension."""
    if name not in _REGISTRY:
        raise ConfigurationError(
            f"unknown problem {name!r}; known: {', '.join(_REGISTRY)}"
        )
    if dim < 2:
        raise ConfigurationError(f"dim must be >= 2, got {dim}")
    fn, (lo, hi), noisy, f_star = _REGISTRY[name]
    return Problem(
        name=name,
        dim=dim,
        lower=np.full(dim, lo),
        upper=np.full(dim, hi),
        noisy=noisy,
        f_star=f_star,
        _fn=fn,
    )


def evaluate(
    problem: Problem,
    x: np.ndarray,
    budget: EvaluationBudget,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """One true objective call; counts against the budget.

    Noisy problems require the run's generator so the noise stream is
    reproducible.  Callers are responsible for repairing x into bounds first.
    """
    if budget.used >= budget.max_fes:
        raise BudgetExhaustedError(
            f"budget of {budget.max_fes} evaluations exhausted"
        )
    budget.used += 1
    f = problem.raw(x)
    if problem.noisy:
        if rng is None:
            raise ValueError(f"{problem.name} is noisy; pass the run's generator")
        f += rng.random()
    return f


def midpoint_repair(
    x: np.ndarray, lower: np.ndarray, upper: np.ndarray, parent: np.ndarray
) -> np.ndarray:
    """Pull out-of-bounds coordinates halfway back toward the violated bound.

    Each violating coordinate j becomes 0.5 * (parent[j] + bound[j]); the
    parent must already be in bounds, so the result always is too.
    """
    x = np.array(x, dtype=float)
    below = x < lower
    above = x > upper
    x[below] = 0.5 * (parent[below] + lower[below])
    x[above] = 0.5 * (parent[above] + upper[above])
    return x


def repair_to_bounds(x: np.ndarray, problem: Problem, parent: np.ndarray) -> np.ndarray:
    """midpoint_repair against the problem's box."""
    return midpoint_repair(x, problem.lower, problem.upper, parent)
