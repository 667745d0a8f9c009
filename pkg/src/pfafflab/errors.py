"""Exception types shared across the package."""


class PfaffLabError(Exception):
    """Base class for all package errors."""


class ParameterError(PfaffLabError, ValueError):
    """An argument is outside its documented range."""


class UndefinedInputError(PfaffLabError, ValueError):
    """A formula was evaluated at an input where it is undefined."""


class DomainError(PfaffLabError):
    """Evaluation requested outside the open domain box."""


class PathError(PfaffLabError):
    """An integration path leaves the domain."""


class ConvergenceError(PfaffLabError):
    """An iterative solver failed to reach its tolerance."""


class BracketError(PfaffLabError):
    """A bracketing root solve was given endpoints without a sign change."""


class SeedError(PfaffLabError):
    """A continuation seed does not lie on the target curve."""


class GraphConditionError(PfaffLabError):
    """The vertical-line test failed: the curve is not a graph here."""


class ConfigurationError(PfaffLabError, ValueError):
    """A point configuration violates its invariants."""


class WindowError(PfaffLabError, ValueError):
    """Requested sample positions leave the feasible parameter window."""

    def __init__(self, message, feasible=None):
        super().__init__(message)
        self.feasible = feasible


class DegenerateTripleError(PfaffLabError, ValueError):
    """Anchor points coincide where a frame needs them distinct."""


class PreconditionError(PfaffLabError, ValueError):
    """A documented precondition of an operation does not hold."""


class InconsistencyError(PfaffLabError):
    """An internal cross-check failed; indicates a bug, not bad input."""


class InconclusiveError(PfaffLabError):
    """Not enough usable samples to decide a numeric predicate."""


class ToleranceError(PfaffLabError):
    """A classification is ambiguous at the requested tolerance."""


class IdentityViolation(PfaffLabError):
    """An exact counting identity failed; carries the offending row."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row
