"""
Types for the overcomplete finite-dimensional phase basis.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from django.db import models

from apps.utils.constants import SQRT_PREFACTORS


class SqrtPrefactor(models.TextChoices):
    """Normalization of the continuous square root of rho_d."""

    PRINTED = SQRT_PREFACTORS["PRINTED"], "sqrt(N / 2 pi)"
    UNIT = SQRT_PREFACTORS["UNIT"], "N / 2 pi"


@dataclass(frozen=True)
class PhaseBasisConfig:
    """
    Phase-state family of dimension n and the phase quadrature.

    quadrature_nodes defaults to QUADRATURE_NODES_PER_DIM * n and must be at
    least 4n to resolve every Fourier component of <phi|rho|phi>.
    """

    n: int
    quadrature_nodes: Optional[int] = None
    prefactor: str = SqrtPrefactor.PRINTED

    def as_dict(self) -> dict:
        return {
            "N": self.n,
            "quadrature_nodes": self.quadrature_nodes,
            "prefactor": str(self.prefactor),
        }


@dataclass(frozen=True, eq=False)
class PhaseRhoD:
    """Phase-averaged reference state and its off-diagonal l1 mass in the number basis."""

    matrix: np.ndarray
    off_diagonal_mass: float
    nodes: int


@dataclass(frozen=True, eq=False)
class ContinuousSqrt:
    """Continuous square root of rho_d; square_defect is ||S^2 - rho_d||_F."""

    matrix: np.ndarray
    prefactor: str
    square_defect: float
    nodes: int


@dataclass(frozen=True)
class PhasePythagoras:
    total: float
    coherence: float
    certainty: float
    cross_term: float
    residual: float


@dataclass(frozen=True)
class ContinuousCoherence:
    """Coherence tr(sqrt(rho)^2) - 1 next to the distance to the phase-averaged state."""

    sqrt_purity_form: float
    distance_form: float
    mismatch: float


@dataclass(frozen=True)
class OrthogonalityReport:
    """
    Cross term tr[(sqrt(rho) - sqrt(rho_d))(sqrt(rho_d) - I/sqrt(N))].

    violation is its absolute value at the finest node count; stability is
    the change of the signed value under the last node doubling.
    """

    violation: float
    cross_term: float
    nodes: int
    doublings: int
    stability: float
    prefactor: str
    square_defect: float
    off_diagonal_mass: float
    pythagoras: PhasePythagoras
    coherence: ContinuousCoherence

    def as_dict(self) -> dict:
        return {
            "violation": self.violation,
            "cross_term": self.cross_term,
            "nodes": self.nodes,
            "doublings": self.doublings,
            "stability": self.stability,
            "prefactor": self.prefactor,
            "square_defect": self.square_defect,
            "rho_d_off_diagonal_mass": self.off_diagonal_mass,
            "pythagoras_total": self.pythagoras.total,
            "pythagoras_coherence": self.pythagoras.coherence,
            "pythagoras_certainty": self.pythagoras.certainty,
            "pythagoras_residual": self.pythagoras.residual,
            "coherence_sqrt_purity_form": self.coherence.sqrt_purity_form,
            "coherence_distance_form": self.coherence.distance_form,
            "coherence_mismatch": self.coherence.mismatch,
        }
