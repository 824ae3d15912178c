"""
Custom exceptions for the application.
"""

import json
from typing import Any, Dict, Optional

from apps.utils.constants import EXIT_CODES


class CoherenceLabError(Exception):
    """Base class for every error raised by the lab."""

    exit_code = EXIT_CODES["NUMERICAL"]
    default_detail = "Coherence lab error."
    default_code = "coherence_lab_error"

    def __init__(self, detail: Optional[str] = None, **details: Any):
        self.detail = detail or self.default_detail
        self.details = details
        super().__init__(self.detail)


class StructuralError(CoherenceLabError):
    """Raised when matrix shapes, dimensions or basis labels do not line up."""

    exit_code = EXIT_CODES["VALIDATION"]
    default_detail = "Structural mismatch between inputs."
    default_code = "structural_error"


class InvalidDensityMatrixError(CoherenceLabError):
    """Raised when a matrix fails the density-matrix invariants."""

    exit_code = EXIT_CODES["VALIDATION"]
    default_detail = "Matrix is not a valid density matrix."
    default_code = "invalid_density_matrix"


class InvariantError(CoherenceLabError):
    """Raised when an input violates a precondition of an operation."""

    exit_code = EXIT_CODES["VALIDATION"]
    default_detail = "Input violates an operation invariant."
    default_code = "invariant_error"


class ContractError(CoherenceLabError):
    """Raised when a reference state is not incoherent in the working basis."""

    exit_code = EXIT_CODES["VALIDATION"]
    default_detail = "Reference state must be diagonal in the working basis."
    default_code = "contract_error"


class StateSpecError(CoherenceLabError):
    """Raised when a state specification cannot be parsed or validated."""

    exit_code = EXIT_CODES["VALIDATION"]
    default_detail = "Invalid state specification."
    default_code = "state_spec_error"


class ConsistencyError(CoherenceLabError):
    """Raised when two equivalent evaluations of a quantity disagree."""

    exit_code = EXIT_CODES["NUMERICAL"]
    default_detail = "Internal consistency check failed."
    default_code = "consistency_error"


class TruncationError(CoherenceLabError):
    """Raised when a Fock truncation cannot meet its tail tolerance."""

    exit_code = EXIT_CODES["NUMERICAL"]
    default_detail = "Truncation tail tolerance cannot be met below the dimension ceiling."
    default_code = "truncation_error"


class QuadratureError(CoherenceLabError):
    """Raised when a phase-space quadrature does not stabilise."""

    exit_code = EXIT_CODES["NUMERICAL"]
    default_detail = "Quadrature did not converge under node doubling."
    default_code = "quadrature_error"


class VerificationFailedError(CoherenceLabError):
    """Raised when a verification suite reports failing properties."""

    exit_code = EXIT_CODES["VERIFICATION"]
    default_detail = "Verification failed."
    default_code = "verification_failed"


def format_error(exc: Exception) -> Dict[str, Any]:
    """
    Build the standard error payload for an exception.

    Args:
        exc: The exception that was raised

    Returns:
        Dictionary with the error type, code, message and details
    """
    if not isinstance(exc, CoherenceLabError):
        return {
            "error": {
                "type": "InternalError",
                "code": "internal_error",
                "message": "An unexpected error occurred.",
                "details": str(exc),
            }
        }

    return {
        "error": {
            "type": exc.__class__.__name__,
            "code": exc.default_code,
            "message": exc.detail,
            "details": _jsonable(exc.details) or None,
        }
    }


def format_error_json(exc: Exception) -> str:
    """Render the error payload as a single JSON line."""
    return json.dumps(format_error(exc), sort_keys=True)


def _jsonable(value: Any) -> Any:
    """Coerce numpy scalars and nested containers into JSON-friendly values."""
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if hasattr(value, "item") and callable(value.item):
        try:
            return value.item()
        except (TypeError, ValueError):
            return str(value)
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)
