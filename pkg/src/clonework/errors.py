"""Exception types shared across the workbench."""


class WorkbenchError(Exception):
    pass


class ArityMismatch(WorkbenchError, ValueError):
    pass


class IndexOutOfRange(WorkbenchError, IndexError):
    pass


class ShapeMismatch(WorkbenchError, ValueError):
    pass


class DomainMismatch(WorkbenchError, ValueError):
    pass


class DecreasingViolation(WorkbenchError):
    """A decreasing-sequence producer returned a cut that is not contained
    in the previous cut times A."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"cut {index} is not contained in cut {index - 1} x A")


class NotFiniteSupport(WorkbenchError, ValueError):
    pass


class ColumnNotInRelation(WorkbenchError, ValueError):
    pass


class CapExceeded(WorkbenchError):
    """Raised before an enumeration whose predicted size is over the limit."""

    def __init__(self, what, estimate, limit):
        self.what = what
        self.estimate = estimate
        self.limit = limit
        super().__init__(f"{what}: predicted {estimate} candidates exceeds limit {limit}")


class ParseError(WorkbenchError):
    def __init__(self, line, message):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


class UnknownName(ParseError):
    pass
