"""Exception hierarchy shared by every module."""

from __future__ import annotations


class HasseForgeError(Exception):
    """Base class for all library errors."""


class InvalidArgument(HasseForgeError, ValueError):
    """An argument violates an operation's precondition."""


class NoSolution(HasseForgeError):
    """A congruence system is inconsistent."""


class NoPrimePossible(HasseForgeError):
    """An arithmetic progression cannot contain infinitely many primes."""


class ReduceFirst(HasseForgeError, ValueError):
    """The input is divisible by the prime and must be reduced before rooting."""


class IncompleteFactorization(HasseForgeError):
    """Factorization stopped with a composite cofactor."""

    def __init__(self, message: str, cofactor: int | None = None, partial=None):
        super().__init__(message)
        self.cofactor = cofactor
        self.partial = partial or []


class SearchBudgetError(HasseForgeError):
    """A bounded search ran out of budget.

    ``progress`` records what was scanned; ``estimate`` optionally carries a
    projected cost when the search was abandoned before starting.
    """

    def __init__(self, message: str, progress: dict | None = None,
                 estimate: dict | None = None):
        super().__init__(message)
        self.progress = progress or {}
        self.estimate = estimate or {}


class NeedsMorePrecision(HasseForgeError):
    """A local point is not precise enough to fix a valuation."""


class CertificateRefuted(HasseForgeError):
    """A computed quantity contradicts the proven profile."""


class InternalContradiction(HasseForgeError):
    """A quantity proven to exist could not be constructed."""


class PreconditionError(HasseForgeError):
    """A higher-level operation was called on inputs that fail its checks."""

    def __init__(self, message: str, detail: dict | None = None):
        super().__init__(message)
        self.detail = detail or {}
