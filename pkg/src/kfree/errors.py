"""Exception types shared by the solver modules.

Every rejection carries a stable ``reason`` string so the command line
front end can report it in machine-readable form.
"""

from __future__ import annotations


class KFreeError(Exception):
    """Base class for all errors raised by this package."""

    reason = "error"

    def __init__(self, message: str, reason: str | None = None):
        super().__init__(message)
        if reason is not None:
            self.reason = reason


class InputError(KFreeError, ValueError):
    """Malformed or inconsistent input data."""

    reason = "input"


class PreconditionError(KFreeError):
    """Input is well formed but outside the class a solver supports."""

    reason = "precondition"


class InvariantError(KFreeError, RuntimeError):
    """An internal guarantee failed; indicates a bug, not bad input."""

    reason = "invariant"


class GuardExceeded(KFreeError):
    """A brute-force routine refused an instance above its size guard."""

    reason = "guard"
