"""Exception types shared across the package."""


class InvalidParameter(ValueError):
    """An argument violates an operation's precondition."""


class InfeasibleParameters(InvalidParameter):
    """The requested privacy/accuracy parameters cannot be met."""


class FormatError(ValueError):
    """A dataset, histogram or repr file is malformed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BudgetExceeded(RuntimeError):
    """An exact enumeration would exceed its configured budget."""
