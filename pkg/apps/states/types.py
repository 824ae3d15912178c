"""
State specifications, truncation settings and built states.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple, Union

from django.db import models

from apps.hellinger.types import DensityMatrix, PureState
from apps.utils.constants import STATE_VARIANTS


class StateVariant(models.TextChoices):
    QUBIT_BLOCH = STATE_VARIANTS["QUBIT_BLOCH"], "Qubit from a Bloch vector"
    FINITE_PHASE = STATE_VARIANTS["FINITE_PHASE"], "Finite-dimensional phase state"
    ROTATED_NUMBER = STATE_VARIANTS["ROTATED_NUMBER"], "Beam-splitter rotated number state"
    SG_PHASE = STATE_VARIANTS["SG_PHASE"], "Susskind-Glogower phase state"
    TMSV = STATE_VARIANTS["TMSV"], "Two-mode squeezed vacuum"
    SQUEEZED_COHERENT = STATE_VARIANTS["SQUEEZED_COHERENT"], "Squeezed coherent state"
    DISPLACED_NUMBER = STATE_VARIANTS["DISPLACED_NUMBER"], "Displaced number state"


FOCK_VARIANTS = (
    StateVariant.SG_PHASE,
    StateVariant.TMSV,
    StateVariant.SQUEEZED_COHERENT,
    StateVariant.DISPLACED_NUMBER,
)


@dataclass(frozen=True)
class TruncationConfig:
    """
    Fock cutoff settings.

    dim=None lets the builder pick the starting dimension; auto_grow doubles
    it until the tail tolerance holds. tail_mass_tol and ceiling fall back to
    the COHERENCE_LAB settings when None.
    """

    dim: Optional[int] = None
    tail_mass_tol: Optional[float] = None
    auto_grow: bool = True
    ceiling: Optional[int] = None

    def as_dict(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "tail_mass_tol": self.tail_mass_tol,
            "auto_grow": self.auto_grow,
            "ceiling": self.ceiling,
        }


@dataclass(frozen=True)
class TruncationDiagnostics:
    """What the builder accepted: dimension, tail estimates and oracle agreement."""

    dim: int
    tail_mass_tol: float
    tail_mass: float
    tail_sqrt_sum: float
    growth_steps: int = 0
    oracle_max_deviation: Optional[float] = None

    def as_dict(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "tail_mass_tol": self.tail_mass_tol,
            "tail_mass": self.tail_mass,
            "tail_sqrt_sum": self.tail_sqrt_sum,
            "growth_steps": self.growth_steps,
            "oracle_max_deviation": self.oracle_max_deviation,
        }


@dataclass(frozen=True)
class QubitBloch:
    s: Tuple[float, float, float]


@dataclass(frozen=True)
class FinitePhase:
    n: int
    phases: Optional[Tuple[float, ...]] = None


@dataclass(frozen=True)
class RotatedNumber:
    n: int
    m: int


@dataclass(frozen=True)
class SGPhase:
    xi: complex


@dataclass(frozen=True)
class TMSV:
    xi: complex


@dataclass(frozen=True)
class SqueezedCoherent:
    """R is the real coherent amplitude and r the squeeze parameter."""

    R: float
    r: float


@dataclass(frozen=True)
class DisplacedNumber:
    alpha: complex
    n0: int


StateParameters = Union[
    QubitBloch, FinitePhase, RotatedNumber, SGPhase, TMSV, SqueezedCoherent, DisplacedNumber
]


@dataclass(frozen=True)
class StateSpec:
    variant: str
    parameters: StateParameters
    truncation: TruncationConfig = field(default_factory=TruncationConfig)


@dataclass(frozen=True)
class BuiltState:
    """A constructed state plus what was needed to build it."""

    spec: StateSpec
    state: Union[PureState, DensityMatrix]
    truncation: Optional[TruncationDiagnostics] = None
    mean_photons: Optional[float] = None
    number_variance: Optional[float] = None

    @property
    def is_pure(self) -> bool:
        return isinstance(self.state, PureState)

    @property
    def is_fock_family(self) -> bool:
        return self.spec.variant in FOCK_VARIANTS
