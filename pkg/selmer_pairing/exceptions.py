"""Exception hierarchy for selmer_pairing.

Every error carries a stable ``code`` so the CLI can map it onto an exit
status and a machine-readable :class:`~selmer_pairing.report_models.ErrorInfo`.
"""

from typing import Optional


class SelmerPairingError(Exception):
    """Base class for all errors raised by selmer_pairing."""

    code: str = "selmer_pairing_error"

    def __init__(self, message: str, details: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.details = details


class InvalidInputError(SelmerPairingError, ValueError):
    """Malformed or mathematically invalid input (zero, singular curve, bad prime...)."""

    code = "invalid_input"


class FactorizationError(InvalidInputError):
    """An integer could not be factored within the trial-division bound."""

    code = "factorization_failed"


class PrecisionExhaustedError(SelmerPairingError):
    """A local computation could not be decided at the requested precision.

    Callers are expected to retry with a larger precision; this is never
    converted into a verdict.
    """

    code = "precision_exhausted"

    def __init__(self, message: str, place: Optional[str] = None, precision: Optional[int] = None):
        details = None
        if place is not None:
            details = f"place={place} precision={precision}"
        super().__init__(message, details)
        self.place = place
        self.precision = precision


class NotLocallySolvableError(SelmerPairingError):
    """A covering has no point over the requested completion."""

    code = "not_locally_solvable"


class ConstructionError(SelmerPairingError):
    """The f-triple (or one of its ingredients) could not be constructed."""

    code = "construction_failed"


__all__ = [
    "SelmerPairingError",
    "InvalidInputError",
    "FactorizationError",
    "PrecisionExhaustedError",
    "NotLocallySolvableError",
    "ConstructionError",
]
