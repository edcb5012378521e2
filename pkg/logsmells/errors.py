"""
Error Types
===========
Exception hierarchy shared by the parsing, corpus, sampling and reporting layers.
"""

from typing import Optional


class LogSmellsError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(LogSmellsError):
    """Invalid run configuration or registry/lexicon override."""


class ParseError(LogSmellsError):
    """Source text is not valid Python."""

    def __init__(self, path: str, line: Optional[int], message: str):
        self.path = path
        self.line = line or 0
        self.message = message
        super().__init__(f"{path}:{self.line}: {message}")


class EncodingError(LogSmellsError):
    """Source bytes could not be decoded."""

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


class OutOfRange(LogSmellsError):
    """Line number outside the file."""


class NetworkError(LogSmellsError):
    """Transient HTTP failure; safe to retry."""


class AuthError(LogSmellsError):
    """Credentials rejected (401, or 403 outside a rate-limit window)."""


class NotFound(LogSmellsError):
    """Requested remote resource does not exist."""


class DomainError(LogSmellsError):
    """Parameter outside the domain of a statistical formula."""


class InsufficientPopulation(LogSmellsError):
    """A stratum holds fewer items than its planned sample size."""

    def __init__(self, stratum: str, available: int, required: int):
        self.stratum = stratum
        self.available = available
        self.required = required
        super().__init__(
            f"stratum '{stratum}' has {available} items, sample needs {required}"
        )


class DegenerateMarginals(LogSmellsError):
    """Chance agreement is 1 while observed agreement is not."""


class EmptyInput(LogSmellsError):
    """Operation needs at least one item."""


class IdMismatch(LogSmellsError):
    """Findings reference function ids absent from the gold labels."""

    def __init__(self, unknown_ids):
        self.unknown_ids = sorted(unknown_ids)
        preview = ", ".join(self.unknown_ids[:5])
        super().__init__(
            f"{len(self.unknown_ids)} function id(s) not in gold labels: {preview}"
        )
