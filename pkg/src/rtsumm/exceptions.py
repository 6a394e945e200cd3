"""Exception hierarchy for rtsumm."""


class RtsummError(Exception):
    """Base class for all errors raised by this package."""


class EmptyConversation(RtsummError, ValueError):
    pass


class SessionExists(RtsummError):
    pass


class SessionEnded(RtsummError):
    pass


class UnknownSession(RtsummError, KeyError):
    pass


class OutOfOrder(RtsummError, ValueError):
    pass


class DuplicateUtterance(RtsummError, ValueError):
    pass


class BackendUnavailable(RtsummError):
    pass


class EmptyResponse(RtsummError):
    pass


class InvalidExample(RtsummError, ValueError):
    pass


class EmptyCorpus(RtsummError, ValueError):
    pass


class EmptySource(RtsummError, ValueError):
    pass


class EmptyTranscript(RtsummError, ValueError):
    pass


class BudgetTooSmall(RtsummError, ValueError):
    pass


class ContractViolation(RtsummError):
    pass


class ParseError(RtsummError, ValueError):
    """Raised for malformed wire events or corpus records.

    ``field`` names the offending field when one can be identified and
    ``line`` carries the 1-based line number for file input.
    """

    def __init__(self, message, field=None, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.field = field
        self.line = line
