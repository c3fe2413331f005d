"""Exception types shared across the toolkit."""


class ConfigurationError(Exception):
    """Bad user-supplied configuration (unknown problem, malformed spec, ...)."""


class BudgetExhaustedError(Exception):
    """Raised when the true objective is called past its evaluation budget."""


class ModelFitError(Exception):
    """Surrogate fitting failed (e.g. kernel factorization after max jitter)."""
