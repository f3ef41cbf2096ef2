"""Exception hierarchy shared across the package."""


class NCRepError(Exception):
    """Base class for every domain failure raised by ncrep."""


class DimensionError(NCRepError, ValueError):
    pass


class InvalidPointError(NCRepError):
    """A RepPoint does not satisfy the relations of its presentation."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class NotCyclicError(NCRepError):
    pass


class NotTangentError(NCRepError):
    pass


class SingularMatrixError(NCRepError, ValueError):
    pass


class ResolutionError(NCRepError):
    """A supplied ResolutionStep has the wrong shape or fails d2*d1 = 0."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ParseError(NCRepError):
    def __init__(self, message, line=None, column=None, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        loc = f"{line}:{column}: " if line is not None else ""
        exp = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{loc}{message}{exp}")
        self.message = message
