"""Exception hierarchy for toric_rg."""


class ToricRGError(Exception):
    """Base class for all package errors."""


class NonCycleInput(ToricRGError, ValueError):
    """Homology was requested for an edge set with a nonempty syndrome."""


class NotInSublattice(ToricRGError, ValueError):
    """A vertex does not belong to the sublattice V_i it was used with."""


class InvalidSyndrome(ToricRGError, ValueError):
    """Syndrome has odd cardinality or leaves the expected sublattice."""


class ContractViolation(ToricRGError, AssertionError):
    """An internal invariant failed; this always indicates a bug."""


class TraceMismatch(ToricRGError, ValueError):
    """A recorded decoder output does not match the partition it is applied to."""


class ParseError(ToricRGError, ValueError):
    """Malformed input file."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SearchBudgetExceeded(ToricRGError, RuntimeError):
    """An exhaustive search would exceed its pattern budget.

    ``report`` holds whatever was certified before the budget ran out.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
