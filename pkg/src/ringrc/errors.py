"""Exception hierarchy shared across the toolkit.

Three branches matter to callers (and map to distinct CLI exit codes):
ParseError for malformed input files, ValidationError for semantically
bad data or configuration, and NumericError for math that cannot be
carried out on otherwise well-formed inputs.
"""

from __future__ import annotations


class RingRcError(Exception):
    """Base class for all toolkit errors."""


class ParseError(RingRcError):
    """Malformed input text. Carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(RingRcError):
    """Well-formed input that violates a semantic requirement."""


class MissingRecordError(ValidationError):
    """A required (fanout, mode) measurement record is absent."""


class InvalidSelectCodeError(ValidationError):
    """Reserved or unknown aggressor-select code."""


class NumericError(RingRcError):
    """A computation cannot proceed on the given values."""


class NoCrossingError(NumericError):
    """A waveform or response never reaches the requested threshold."""


class DegenerateDelayError(NumericError):
    """Linearized delay form has a non-positive denominator."""


class PoleProximityError(NumericError):
    """Transfer-function evaluation requested too close to a pole."""


class InstabilityError(NumericError):
    """Transient integration diverged (step size too large)."""


class ExtractionDomainError(NumericError):
    """Measured periods violate an ordering required by an extraction formula."""
