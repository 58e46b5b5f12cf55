"""Custom exceptions for the bipartite budget solvers."""
from typing import FrozenSet, Optional


class ParseError(Exception):
    """Exception raised when an instance, ordering or arc file is malformed."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class ContractViolation(Exception):
    """Exception raised when a precondition of an operation is violated."""
    pass


class InvalidOrderingError(ContractViolation):
    """Exception raised when an ordering breaks a precedence edge."""
    pass


class ClassMismatchError(Exception):
    """Exception raised when a class solver gets an instance outside its class."""
    pass


class SizeLimitError(Exception):
    """Exception raised when an instance exceeds a solver's size limit."""
    pass


class WorkBudgetExceeded(Exception):
    """Exception raised when an exponential search runs out of work budget."""
    pass


class SearchBoundExceeded(WorkBudgetExceeded):
    """Exception raised when the positive-minimal search hits its union bound."""
    pass


class RecognitionError(Exception):
    """Exception raised when a decomposition cannot be built."""

    def __init__(self, message: str, blocking: FrozenSet[str] = frozenset()):
        self.blocking = frozenset(blocking)
        super().__init__(message)
