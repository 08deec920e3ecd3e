"""Exception hierarchy shared by all nullwave modules."""


class NullwaveError(Exception):
    """Base class for every error raised by nullwave."""


class StructuralError(NullwaveError, ValueError):
    """Inputs have the wrong shape or are mutually inconsistent."""


class PreconditionError(NullwaveError, ValueError):
    """An operation was called outside the hypotheses it relies on."""


class DomainError(NullwaveError, ValueError):
    """A point or time lies outside the region an operation is defined on."""


class CoverageError(NullwaveError, ValueError):
    """A grid does not cover the region a computation needs."""


class BlowUpError(NullwaveError, ArithmeticError):
    """A closed-form solution is evaluated at or past its blow-up time."""


class GluingError(NullwaveError):
    """Local solutions disagree with the monolithic solve on an overlap."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ConfigError(NullwaveError, ValueError):
    """An experiment configuration is malformed."""
