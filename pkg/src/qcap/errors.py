"""Exception hierarchy shared by every module.

Each concrete class carries a distinct ``exit_code`` used by the command line
front end, so callers can tell failure kinds apart without parsing messages.
"""

from __future__ import annotations


class QcapError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 10


class ParseError(QcapError):
    """A file or JSON document could not be decoded into a domain object."""

    exit_code = 3


class GraphValidationError(QcapError):
    """A raw storage graph violates one or more structural invariants."""

    exit_code = 4

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class LimitExceeded(QcapError):
    """An exhaustive enumeration would exceed its configured cap."""

    exit_code = 5


class FieldError(QcapError, ValueError):
    """Invalid field parameters or mixed-field operands."""

    exit_code = 6


class ParameterError(QcapError, ValueError):
    """Constructor or planner called outside its supported parameter range."""

    exit_code = 6


class InvalidPartition(ParameterError):
    """A wheel-bound configuration is not admissible.

    ``reason`` is one of ``"not-a-partition"``, ``"coverage"`` or ``"k-range"``.
    """

    def __init__(self, reason: str, message: str):
        self.reason = reason
        super().__init__(message)


class OutOfClass(ParameterError):
    """The graph lies outside the family an operation is defined for."""


class RetriesExhausted(QcapError):
    """A randomized constructor failed on every allowed attempt."""

    exit_code = 8

    def __init__(self, seed: int, attempts: int):
        self.seed = seed
        self.attempts = attempts
        super().__init__(f"no valid sample after {attempts} attempts (seed={seed})")


class DecompositionError(QcapError):
    """The code violates the decoding or security rank condition for a set."""

    exit_code = 7


class MismatchError(QcapError, ValueError):
    """Dimensions of a code and a graph (or two matrices) do not line up."""

    exit_code = 9
