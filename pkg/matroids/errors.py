"""
Exception hierarchy for the matroid engine.

The CLI maps each class to its own exit code, so library code raises the most
specific class that applies.
"""

from typing import Any, Optional


class MatroidError(Exception):
    """Base class for all engine errors."""


class InputError(MatroidError, ValueError):
    """Invalid arguments: out-of-range elements, overlapping sets, bad flags."""


class ParseError(InputError):
    """Malformed input file."""

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        self.path = path
        self.line = line
        self.column = column
        location = ""
        if path is not None:
            location = str(path)
            if line is not None:
                location += f":{line}"
                if column is not None:
                    location += f":{column}"
            location += ": "
        super().__init__(f"{location}{message}")


class DomainError(MatroidError):
    """Mathematical precondition failed (loops, rank 0, infeasible vectors)."""

    def __init__(self, message: str, element: Any = None, certificate: Any = None):
        self.element = element
        self.certificate = certificate
        super().__init__(message)


class CapacityError(MatroidError):
    """An enumeration or oracle limit was exceeded."""

    def __init__(self, message: str, limit: int, partial: int):
        self.limit = limit
        self.partial = partial
        super().__init__(f"{message} (limit {limit}, reached {partial})")
