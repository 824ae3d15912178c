"""
Result types returned by the quantifier services.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

from apps.hellinger.types import Tolerances, resolve_tolerances


@dataclass(frozen=True)
class PythagorasCheck:
    """The three squared distances of a Pythagoras-like identity and its residual."""

    total: float
    coherence: float
    certainty: float
    cross_term: float
    residual: float


@dataclass(frozen=True)
class HSQuantifiers:
    """Hilbert-Schmidt coherence, certainty and nonclassicality."""

    c_hs: float
    s_hs: float
    nc_hs: float
    residual: float


@dataclass(frozen=True)
class QubitClosedForms:
    c_h: float
    s_h: float
    nc_h: float
    c_h_max_over_bases: float


@dataclass(frozen=True)
class BasisOptimum:
    """
    Outcome of the qubit basis-rotation search.

    theta and phi are the polar angles of the Bloch direction that becomes
    the new |0>; rotated_s_z is the Bloch z-component in that basis.
    """

    c_h_max: float
    theta: float
    phi: float
    rotated_s_z: float
    grid_c_h_max: float
    nc_h_at_optimum: float


@dataclass
class QuantifierReport:
    """Every quantifier of one state, in both distance families."""

    dim: int
    c_h: float
    s_h: float
    nc_h: float
    c_hs: float
    s_hs: float
    nc_hs: float
    pythagoras_residual_h: float
    pythagoras_residual_hs: float
    x_sum: float
    renyi_half: float
    sqrt_purity: float
    duality_gap: float
    truncation: Optional[Dict] = None
    nc_h_infinite: Optional[float] = None
    mean_photons: Optional[float] = None
    extras: Dict[str, float] = field(default_factory=dict)

    def invariant_violations(self, tolerances: Optional[Tolerances] = None) -> List[str]:
        """
        Names of the report invariants this row breaks.

        Bounds are checked with a slack of consistency_tol scaled by the
        dimension, since every quantity is a sum over N entries.
        """
        tolerances = resolve_tolerances(tolerances)
        n = self.dim
        slack = tolerances.consistency_tol * max(1.0, float(n))
        violations = []

        values = [
            self.c_h, self.s_h, self.nc_h, self.c_hs, self.s_hs, self.nc_hs,
            self.pythagoras_residual_h, self.pythagoras_residual_hs,
            self.x_sum, self.renyi_half, self.sqrt_purity, self.duality_gap,
        ]
        values.extend(value for value in self.extras.values())
        if self.nc_h_infinite is not None:
            values.append(self.nc_h_infinite)
        if not all(math.isfinite(value) for value in values):
            return ["non_finite"]

        if self.pythagoras_residual_h > slack:
            violations.append("pythagoras_h")
        if self.pythagoras_residual_hs > slack:
            violations.append("pythagoras_hs")
        if not -slack <= self.c_h <= n - 1 + slack:
            violations.append("c_h_bounds")
        if not -slack <= self.nc_h <= n - 1 + slack:
            violations.append("nc_h_bounds")
        if not -slack <= self.s_h <= 2 * (1 - 1 / math.sqrt(n)) + slack:
            violations.append("s_h_bounds")
        if not -slack <= self.c_hs <= 1 - 1 / n + slack:
            violations.append("c_hs_bounds")
        if not -slack <= self.nc_hs <= 1 - 1 / n + slack:
            violations.append("nc_hs_bounds")
        if self.duality_gap < -slack:
            violations.append("duality")

        return violations

    @property
    def is_valid(self) -> bool:
        return not self.invariant_violations()

    def as_dict(self) -> Dict:
        data = asdict(self)
        extras = data.pop("extras")
        data.update(extras)
        return data
