"""Exception types shared across the package."""


class PatchdynError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(PatchdynError, ValueError):
    """A parameter block or scenario failed construction-time validation."""


class DomainError(PatchdynError, ValueError):
    """An operation was called outside its mathematical domain."""


class PreconditionError(PatchdynError, ValueError):
    """An analysis routine was invoked in a regime where it is undefined."""


class NumericError(PatchdynError, RuntimeError):
    """A numerical procedure failed (lost bracket, step collapse, ...)."""


class InternalConsistencyError(PatchdynError, RuntimeError):
    """A theorem-based result disagreed with its numeric cross-check."""
