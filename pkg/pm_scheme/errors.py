"""Exceptions raised by pm_scheme.

Library code raises these; the CLI maps them onto exit codes.
"""
from typing import List, Optional


class PartitionError(ValueError):
    """A partition or matching could not be parsed or has an invalid shape."""

    def __init__(self, message: str, token: Optional[str] = None):
        super().__init__(message)
        self.token = token


class UnsupportedError(ValueError):
    """A request falls outside a resource guard or a theorem's hypothesis."""

    def __init__(self, message: str, limit: Optional[int] = None, estimate: Optional[str] = None):
        super().__init__(message)
        self.limit = limit
        self.estimate = estimate


class ThresholdError(UnsupportedError):
    """A closed form was requested below the smallest n its theorem covers."""

    def __init__(self, message: str, threshold: int):
        super().__init__(message, limit=threshold)
        self.threshold = threshold


class HypothesisError(ValueError):
    """The inputs violate a named hypothesis of a ratio law."""

    def __init__(self, message: str, condition: str):
        super().__init__(message)
        self.condition = condition


class IncompleteTableError(ValueError):
    """An operation needs a column or table without absent cells."""


class UnderdeterminedSystemError(ValueError):
    """The data do not pin down a unique symmetric function."""


class InconsistentDataError(ValueError):
    """No symmetric function in the admissible basis reproduces the data."""


class DegenerateCombinationError(RuntimeError):
    """Every random combination of intersection matrices had a repeated eigenvalue."""


class AmbiguousRowAssignmentError(RuntimeError):
    """An eigenvector could not be matched to a single eigenspace."""

    def __init__(self, message: str, candidates: List[str]):
        super().__init__(message)
        self.candidates = candidates
