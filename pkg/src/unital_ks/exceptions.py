"""Exception types raised across the package."""


class NotHermitian(ValueError):
    pass


class NoConvergence(ArithmeticError):
    pass


class InvalidDomain(ValueError):
    pass


class NotARotation(ValueError):
    pass


class OutOfRange(ValueError):
    pass


class InvalidParams(ValueError):
    pass


class OutOfDomain(ValueError):
    pass


class DomainError(ValueError):
    """A closed-form evaluator was called outside its validity region."""


class NotNormalized(ValueError):
    pass


class NotAState(ValueError):
    pass


class NoNegativeEigenvalue(ValueError):
    pass


class InvalidRange(ValueError):
    pass


class MapDocumentError(ValueError):
    """Malformed map JSON; carries a 1-based line/column for diagnostics."""

    def __init__(self, message, line=1, column=1):
        super().__init__(message)
        self.line = line
        self.column = column

    def __str__(self):
        return f"{self.line}:{self.column}: {self.args[0]}"
