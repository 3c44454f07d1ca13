"""Exception types shared across the package."""


class SupnormlabError(Exception):
    """Base class for package errors."""


class AccuracyError(SupnormlabError):
    """A requested tolerance could not be certified.

    Carries the best available estimate and the certified error bound so a
    caller can decide whether the partial answer is still useful.
    """

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class BudgetError(SupnormlabError):
    """A resource budget (cells, terms, group elements) was exhausted."""


class ConsistencyError(SupnormlabError):
    """An internal cross-check failed (probe disagreement, sign mismatch, ...)."""


class LemmaViolationError(ConsistencyError):
    """A certified inequality was violated beyond tolerance."""
