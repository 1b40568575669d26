class AddRepError(Exception):
    """Base class for all library errors."""


class ValidationError(AddRepError, ValueError):
    """Input rejected before any computation ran."""


class GuardExceeded(ValidationError):
    """A configured size guard would be exceeded."""


class TheoremViolation(AddRepError, AssertionError):
    """An internal cross-check guaranteed by the theory failed."""
