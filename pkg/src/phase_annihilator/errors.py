"""
Exception hierarchy for Phase Annihilator

Every error derives from the builtin a caller would naturally catch, so code
that handles ``ValueError`` or ``RuntimeError`` keeps working.
"""

from typing import Optional


class ProblemFormatError(ValueError):
    """Problem, functional or report document is not usable"""


class MalformedDocumentError(ProblemFormatError):
    """Document is not valid JSON/TOML or misses required fields"""


class MonotonicityError(ProblemFormatError):
    """Breakpoints are not strictly increasing from 0 to 1"""


class EmptyProblemError(ProblemFormatError):
    """Problem carries no functions"""


class OverlappingIntervalsError(ValueError):
    """Interval set passed to a measure is not pairwise disjoint"""


class OrderViolationError(ValueError):
    """Blend endpoints are not ordered lo <= hi pointwise"""


class UnsupportedKindError(TypeError):
    """Operation is not defined for this kind of tree or function"""


class DegeneratePointError(ValueError):
    """Point has no coordinate above the positivity threshold"""


class BudgetExceededError(RuntimeError):
    """A resource budget (e.g. triangulation size) would be exceeded"""


class AccuracyError(RuntimeError):
    """Adaptive quadrature reached its depth limit before the tolerance"""

    def __init__(self, message: str, estimate: Optional[complex] = None):
        super().__init__(message)
        self.estimate = estimate


class OddnessContractError(ValueError):
    """Evaluator passed to the zero finder is not odd"""
