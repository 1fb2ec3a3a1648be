"""Exception types shared across the package."""


class BranchflowError(Exception):
    """Base class for all branchflow errors."""


class ParseError(BranchflowError):
    """Malformed input file. Carries the offending line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(BranchflowError):
    """Structurally invalid network.

    ``kind`` is one of ``"cycle"``, ``"disconnected"``, ``"multiple_roots"``,
    ``"multiple_incoming"``.
    """

    def __init__(self, kind, message):
        super().__init__(message)
        self.kind = kind


class BudgetExceededError(BranchflowError):
    """Search space larger than the enumeration budget allows."""
