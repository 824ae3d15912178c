"""
Value types shared by every quantifier: density matrices, pure states,
elementwise square roots and the numerical tolerances they are checked with.
"""

from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np
from django.conf import settings

from apps.utils.constants import BASIS_LABELS


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances used for validation and consistency checks."""

    herm_tol: float = 1e-10
    trace_tol: float = 1e-10
    norm_tol: float = 1e-10
    psd_tol: float = 1e-9
    imag_tol: float = 1e-10
    consistency_tol: float = 1e-10
    tail_mass_tol: float = 1e-10

    @classmethod
    def from_settings(cls, **overrides) -> "Tolerances":
        """
        Build tolerances from the COHERENCE_LAB settings dict.

        Args:
            **overrides: Individual tolerances that take precedence

        Returns:
            Tolerances instance
        """
        config = settings.COHERENCE_LAB
        tolerances = cls(
            herm_tol=config["HERM_TOL"],
            trace_tol=config["TRACE_TOL"],
            norm_tol=config["NORM_TOL"],
            psd_tol=config["PSD_TOL"],
            imag_tol=config["IMAG_TOL"],
            consistency_tol=config["CONSISTENCY_TOL"],
            tail_mass_tol=config["TAIL_MASS_TOL"],
        )
        overrides = {key: value for key, value in overrides.items() if value is not None}
        return replace(tolerances, **overrides) if overrides else tolerances

    def as_dict(self) -> dict:
        return {
            "herm_tol": self.herm_tol,
            "trace_tol": self.trace_tol,
            "norm_tol": self.norm_tol,
            "psd_tol": self.psd_tol,
            "imag_tol": self.imag_tol,
            "consistency_tol": self.consistency_tol,
            "tail_mass_tol": self.tail_mass_tol,
        }


def resolve_tolerances(tolerances: Optional[Tolerances]) -> Tolerances:
    """Return the given tolerances or the configured defaults."""
    return tolerances if tolerances is not None else Tolerances.from_settings()


def _frozen_array(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    Hermitian, unit-trace, positive semidefinite matrix over an ordered basis.

    Instances are produced by DensityService.validate_density or by the
    trusted constructors of DensityService; entries are read-only.
    """

    entries: np.ndarray
    basis_label: str = BASIS_LABELS["COMPUTATIONAL"]

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen_array(self.entries, complex))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def populations(self) -> np.ndarray:
        """Diagonal entries as a real probability vector."""
        return np.clip(self.entries.diagonal().real, 0.0, None)

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim}, basis_label={self.basis_label!r})"


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized complex amplitude vector over an ordered basis."""

    amplitudes: np.ndarray
    basis_label: str = BASIS_LABELS["COMPUTATIONAL"]

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", _frozen_array(self.amplitudes, complex))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @property
    def norm_sq(self) -> float:
        return float(np.sum(self.probabilities))

    def to_density(self) -> DensityMatrix:
        """Projector |psi><psi| as a DensityMatrix in the same basis."""
        return DensityMatrix(
            np.outer(self.amplitudes, self.amplitudes.conj()), self.basis_label
        )

    def __repr__(self):
        return f"PureState(dim={self.dim}, basis_label={self.basis_label!r})"


@dataclass(frozen=True, eq=False)
class SqrtMatrix:
    """Elementwise square root of a density matrix."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _frozen_array(self.entries, complex))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class InvariantViolation:
    """A single failed density-matrix invariant."""

    invariant: str
    magnitude: float
    tolerance: float

    def as_dict(self) -> dict:
        return {
            "invariant": self.invariant,
            "magnitude": self.magnitude,
            "tolerance": self.tolerance,
        }


@dataclass(frozen=True)
class DensityDiagnostics:
    """Outcome of a failed validation, one entry per violated invariant."""

    dim: int
    violations: List[InvariantViolation] = field(default_factory=list)

    @property
    def violated(self) -> List[str]:
        return [violation.invariant for violation in self.violations]

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "violations": [violation.as_dict() for violation in self.violations],
        }
