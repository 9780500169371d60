"""Exception types shared across the package."""


class ContractError(ValueError):
    """An argument violated a documented precondition (bad permutation,
    index out of range, dimension mismatch, non-local-optimum walk start)."""


class ParseError(ValueError):
    """An instance file or stream is malformed; carries the offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
