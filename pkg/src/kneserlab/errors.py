"""Exception hierarchy. Each class carries the CLI exit code it maps to."""

from __future__ import annotations


class KneserLabError(Exception):
    exit_code = 1


class DomainError(KneserLabError, ValueError):
    """A precondition on parameters or inputs does not hold."""

    exit_code = 2


class ParseError(DomainError):
    """Malformed family file or command-line set."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BudgetError(KneserLabError):
    """An enumeration or exact search would exceed the configured cap."""

    exit_code = 3


class ExhaustionError(KneserLabError):
    """Chain construction hit a step where every candidate set is forbidden.

    With backtracking on and ``|forbidden| <= C(l, p)`` this has never been
    observed; first-candidate mode can reach it when ``l = 1``.
    """

    exit_code = 4

    def __init__(self, message: str, *, pool_size: int = 0, forbidden: int = 0, trace=None):
        self.pool_size = pool_size
        self.forbidden = forbidden
        self.trace = trace
        super().__init__(f"{message} (pool={pool_size}, |forbidden|={forbidden})")
