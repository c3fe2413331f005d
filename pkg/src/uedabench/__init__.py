"""Expensive black-box optimization toolkit.

Implements Bayesian optimization and the unevaluated-solution EDA (UEDA)
over a shared surrogate interface, plus the benchmark harness, statistics,
and 1-D comparative analysis used to contrast the two.
"""

from .problems import EvaluationBudget, Problem, make_problem
from .optimizers import OptimizerConfig, RunResult, run_algorithm

__all__ = [
    "EvaluationBudget",
    "Problem",
    "make_problem",
    "OptimizerConfig",
    "RunResult",
    "run_algorithm",
]

__version__ = "0.1.0"
