"""
Types for the infinite-dimensional limit.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from apps.hellinger.types import DensityMatrix


@dataclass(frozen=True, eq=False)
class ThermalReference:
    """
    Geometric reference state (1 - xi) xi^n over a finite window.

    outside_mass is the weight xi^dim the window leaves out; the populations
    are renormalized over the window.
    """

    xi: float
    dim: int
    populations: np.ndarray
    outside_mass: float

    @property
    def density(self) -> DensityMatrix:
        return DensityMatrix(np.diag(self.populations))

    @property
    def mean_photons(self) -> float:
        return float(np.sum(np.arange(self.dim) * self.populations))


@dataclass(frozen=True)
class WindowPolicy:
    """How the convergence check grows the window."""

    start: int = 16
    max_doublings: int = 10
    relative_growth_tol: float = 1e-6


CONVERGED = "converged"
DIVERGING = "diverging"


@dataclass(frozen=True)
class ConvergenceResult:
    status: str
    dims: List[int]
    partial_sums: List[float]

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED

    @property
    def relative_growth(self) -> float:
        if len(self.partial_sums) < 2 or self.partial_sums[-2] == 0:
            return 0.0
        return (self.partial_sums[-1] - self.partial_sums[-2]) / self.partial_sums[-2]


@dataclass(frozen=True)
class LimitPoint:
    xi: float
    s_h: float
    nc_h: float
    cross_term: float


@dataclass(frozen=True)
class LimitSweep:
    """
    Certainty and nonclassicality against a thermal reference as xi -> 1.

    nc_h_extrapolated comes from a quadratic fit in sqrt(1 - xi) over the
    points closest to 1; monotone is checked from monotone_from onward.
    """

    c_h: float
    points: List[LimitPoint]
    nc_h_limit: float
    nc_h_extrapolated: float
    residual_at_largest_xi: float
    monotone_from: float
    monotone: bool
    convergence: Optional[ConvergenceResult] = None


@dataclass(frozen=True)
class PythagorasTerms:
    total: float
    coherence: float
    certainty: float
    residual: float


@dataclass(frozen=True)
class InfinitePythagoras:
    """Both Pythagoras identities against the thermal reference."""

    xi: float
    support_dim: int
    hellinger: PythagorasTerms
    hilbert_schmidt: PythagorasTerms
    extras: dict = field(default_factory=dict)
