"""Exception types raised across the package."""


class CelineError(Exception):
    """Base class for all errors raised by celinesum."""


class DomainError(CelineError, ValueError):
    """An operation was called outside the inputs it is defined for."""


class SingularRecurrenceError(CelineError, ArithmeticError):
    """The leading coefficient of a recurrence vanishes where a step is needed."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"leading coefficient vanishes when computing index {index}")


class TermSyntaxError(CelineError, ValueError):
    """Malformed term or operator text; ``position`` is a 0-based offset."""

    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        if text:
            message = f"{message} at position {position}: {text!r}"
        super().__init__(message)


class UnsupportedTermError(CelineError, ValueError):
    """The expression is well formed but not a supported hypergeometric factor."""


class DegenerateCertificateError(CelineError):
    """A certificate induces the zero operator."""


class SystemTooLargeError(CelineError):
    """The ansatz produced more monomials than the configured cap."""


class AttemptTimeout(CelineError, TimeoutError):
    """A single (I, J) attempt exceeded its time budget."""


class RecurrenceNotFound(CelineError):
    """No (I, J) pair within the search bounds produced a verified recurrence."""

    def __init__(self, message, attempts=(), timed_out=False, verification_failed=False):
        self.attempts = list(attempts)
        self.timed_out = timed_out
        self.verification_failed = verification_failed
        super().__init__(message)


class VerificationError(CelineError):
    """A recurrence failed the brute-force check."""

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)
