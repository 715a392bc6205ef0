"""Exception hierarchy shared by every fusion module."""


class CredalError(ValueError):
    """Base class for all errors raised by credalfusion."""


class StructureError(CredalError):
    """Shapes or dimensions do not line up (length mismatch, M < 2, ...)."""


class InvalidModelError(CredalError):
    """A model violates one of its validity conditions."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class EmptyCredalSetError(InvalidModelError):
    """Bounds admit no probability distribution at all."""


class NotBeliefFunctionError(InvalidModelError):
    """Moebius inversion produced a mass below -eps."""


class InternalConsistencyError(CredalError):
    """An algorithm produced output that breaks a checked runtime property."""


class ConflictError(CredalError):
    """Fusion is undefined because every admissible configuration has zero support."""


class SearchGuardError(CredalError):
    """An exhaustive search would exceed its enumeration cap.

    ``size`` is the estimated number of configurations and ``limit`` the cap
    that refused it.
    """

    def __init__(self, message, size, limit):
        super().__init__(f"{message} (estimated {size:.3g} configurations, limit {limit:.3g})")
        self.size = size
        self.limit = limit


class ParseError(CredalError):
    """A model or clause file could not be read; ``path`` and ``line`` locate it."""

    def __init__(self, message, path=None, line=None):
        where = "" if path is None else (f"{path}:{line}: " if line else f"{path}: ")
        super().__init__(where + message)
        self.path = path
        self.line = line
