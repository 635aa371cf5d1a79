"""Exception types shared across the package."""

from __future__ import annotations


class QimpError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(QimpError):
    """Syntax or resolution error in source text, with location."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        if line:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


class ValidationError(QimpError):
    """A value violates a structural invariant (shape, positivity, mass bound)."""


class ArithmeticOverflowError(QimpError):
    """Classical arithmetic left the signed 64-bit range."""


class CaptureError(QimpError):
    """A substitution would capture or rebind a variable."""


class UnsupportedAssertionError(QimpError):
    """The assertion contains a construct the requested operation cannot handle."""


class LoopNotSupportedError(QimpError):
    """Precondition synthesis reached a while loop, which it cannot process."""


class PreconditionUndefinedError(QimpError):
    """No precondition exists for this command/postcondition pair."""
