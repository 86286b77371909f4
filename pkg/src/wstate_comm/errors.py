"""Exception hierarchy shared by all modules."""


class WStateCommError(Exception):
    """Base class for library errors."""


class DomainError(WStateCommError, ValueError):
    """An argument lies outside the operation's domain."""


class IntegrityError(WStateCommError):
    """Embedded table data disagrees with the engine, or a cross-check failed."""


class DecodeError(WStateCommError):
    """A state could not be attributed to any codeword."""


class AuditError(WStateCommError):
    """A transcript cannot be audited (e.g. the run was aborted)."""
