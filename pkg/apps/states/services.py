"""
Builders for every example state family.
"""

import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from django.conf import settings
from loguru import logger
from scipy.special import gammaln

from apps.hellinger.types import (DensityMatrix, PureState, Tolerances,
                                  resolve_tolerances)
from apps.states import oracles
from apps.states.fock import FockOperators
from apps.states.types import (BuiltState, StateSpec, StateVariant,
                               TruncationConfig, TruncationDiagnostics)
from apps.utils.constants import BASIS_LABELS
from apps.utils.exceptions import (ConsistencyError, InvariantError,
                                   TruncationError)

ORACLE_TOL = 1e-8


def fix_global_phase(amplitudes: np.ndarray) -> np.ndarray:
    """
    Rotate the vector so its first amplitude above 1e-6 of the peak modulus
    is real positive. Exact zeros and round-off-level entries never pick
    the phase.
    """
    moduli = np.abs(amplitudes)
    if not np.any(moduli):
        return amplitudes
    first = int(np.argmax(moduli > 1e-6 * moduli.max()))
    return amplitudes * (np.conj(amplitudes[first]) / moduli[first])


def number_moments(probabilities: np.ndarray) -> Tuple[float, float]:
    """Mean and variance of the photon number of a Fock distribution."""
    levels = np.arange(probabilities.size, dtype=float)
    total = float(np.sum(probabilities))
    mean = float(np.sum(levels * probabilities)) / total
    variance = float(np.sum(levels**2 * probabilities)) / total - mean**2
    return mean, max(variance, 0.0)


def _truncation_limits(truncation: TruncationConfig) -> Tuple[float, int]:
    config = settings.COHERENCE_LAB
    tail_mass_tol = truncation.tail_mass_tol
    if tail_mass_tol is None:
        tail_mass_tol = config["TAIL_MASS_TOL"]
    ceiling = truncation.ceiling or config["DIM_CEILING"]
    return tail_mass_tol, ceiling


def _check_xi(xi: complex) -> None:
    if not abs(xi) < 1:
        raise InvariantError("Phase-state parameter must satisfy |xi| < 1.", xi=str(xi))


class StateService:
    """Service class for building states."""

    @staticmethod
    def qubit_from_bloch(bloch: Sequence[float]) -> DensityMatrix:
        """
        Qubit density matrix (1 + s . sigma) / 2 in the sigma_z eigenbasis.

        Raises:
            InvariantError: If |s| > 1 or s is not a 3-vector
        """
        s = np.asarray(bloch, dtype=float)
        if s.shape != (3,) or not np.all(np.isfinite(s)):
            raise InvariantError("Bloch vector must have three finite components.")
        length = float(np.linalg.norm(s))
        if length > 1.0 + 1e-12:
            raise InvariantError("Bloch vector lies outside the unit ball.", length=length)

        s_x, s_y, s_z = s
        entries = 0.5 * np.array(
            [[1.0 + s_z, s_x - 1j * s_y], [s_x + 1j * s_y, 1.0 - s_z]]
        )
        return DensityMatrix(entries, BASIS_LABELS["SIGMA_Z"])

    @staticmethod
    def finite_phase_state(n: int, phases: Optional[Sequence[float]] = None) -> PureState:
        """
        Equal-modulus state e^(i phi_j) / sqrt(N).

        Raises:
            InvariantError: If N < 1 or the phase count differs from N
        """
        if n < 1:
            raise InvariantError("Phase-state dimension must be positive.", n=n)
        angles = np.zeros(n) if phases is None else np.asarray(phases, dtype=float)
        if angles.shape != (n,):
            raise InvariantError(
                "Phase-state needs exactly one phase per level.", n=n, phases=len(angles)
            )
        return PureState(np.exp(1j * angles) / math.sqrt(n))

    @staticmethod
    def beam_splitter_coefficients(n: int, m: int) -> np.ndarray:
        """
        Output coefficients c_j, j = 0..n+m, of |n>|m> behind a 50/50 beam splitter.

        c_j = sqrt(j! (NT-j)! / (n! m! 2^NT)) sum_k (-1)^k C(n, k) C(m, j-k),
        with the k-range limited to nonnegative factorial arguments. The
        integer sum is exact; the prefactor is taken in log-gamma form.

        Raises:
            InvariantError: If n or m is negative
        """
        if n < 0 or m < 0:
            raise InvariantError("Photon numbers must be nonnegative.", n=n, m=m)

        total = n + m
        coefficients = np.zeros(total + 1)
        for j in range(total + 1):
            alternating = sum(
                (-1) ** k * math.comb(n, k) * math.comb(m, j - k)
                for k in range(max(0, j - m), min(n, j) + 1)
            )
            if alternating == 0:
                continue
            log_prefactor = 0.5 * (
                gammaln(j + 1) + gammaln(total - j + 1)
                - gammaln(n + 1) - gammaln(m + 1) - total * math.log(2.0)
            )
            coefficients[j] = math.copysign(
                math.exp(log_prefactor + math.log(abs(alternating))), alternating
            )
        return coefficients

    @staticmethod
    def beam_splitter_oracle_deviation(n: int, m: int) -> float:
        """
        Largest entrywise gap between c_j and the binomial-expansion oracle.

        The two differ by the level sign (-1)^(m - j) that the c_j formula
        drops as an irrelevant phase; it is restored before comparing.
        """
        coefficients = StateService.beam_splitter_coefficients(n, m)
        oracle = oracles.beam_splitter_oracle(n, m)
        signs = np.array([(-1) ** (m - j) for j in range(n + m + 1)], dtype=float)
        return float(np.max(np.abs(coefficients - signs * oracle)))

    @staticmethod
    def rotated_number_state(n: int, m: int) -> PureState:
        """Beam-splitter output of |n>|m> over |j>|n+m-j>, j = 0..n+m."""
        coefficients = StateService.beam_splitter_coefficients(n, m)
        return PureState(fix_global_phase(coefficients), BASIS_LABELS["BEAM_SPLITTER_OUTPUT"])

    @staticmethod
    def sg_dimension(xi: complex, tail_mass_tol: float) -> int:
        """
        Smallest cutoff whose analytic sqrt-tail keeps C_H within tail_mass_tol.

        The sqrt-tail beyond D is sqrt(1-|xi|^2) |xi|^D / (1-|xi|); a
        coherence error of 2 x t needs t <= tol / (2 x).
        """
        modulus = abs(xi)
        if modulus == 0:
            return 1
        x_limit = math.sqrt(1 - modulus**2) / (1 - modulus)
        target = tail_mass_tol / max(1.0, 2.0 * x_limit)
        bound = math.log(target * (1 - modulus) / math.sqrt(1 - modulus**2)) / math.log(modulus)
        return max(1, math.ceil(bound))

    @staticmethod
    def sg_phase_state(
        xi: complex, truncation: Optional[TruncationConfig] = None
    ) -> Tuple[PureState, TruncationDiagnostics]:
        """
        Normalizable Susskind-Glogower phase state sqrt(1-|xi|^2) sum xi^n |n>.

        Raises:
            InvariantError: If |xi| >= 1
            TruncationError: If the needed cutoff exceeds the ceiling
        """
        _check_xi(xi)
        amplitudes, diagnostics = StateService._geometric_amplitudes(xi, truncation)
        return PureState(amplitudes, BASIS_LABELS["FOCK"]), diagnostics

    @staticmethod
    def tmsv_distribution(
        xi: complex, truncation: Optional[TruncationConfig] = None
    ) -> Tuple[np.ndarray, TruncationDiagnostics]:
        """
        Twin-ladder distribution p_n = (1-|xi|^2) |xi|^(2n) of the two-mode
        squeezed vacuum.

        Raises:
            InvariantError: If |xi| >= 1
        """
        _check_xi(xi)
        amplitudes, diagnostics = StateService._geometric_amplitudes(xi, truncation)
        return np.abs(amplitudes) ** 2, diagnostics

    @staticmethod
    def tmsv_state(
        xi: complex, truncation: Optional[TruncationConfig] = None
    ) -> Tuple[PureState, TruncationDiagnostics]:
        """Two-mode squeezed vacuum over the twin ladder |n, n>."""
        _check_xi(xi)
        amplitudes, diagnostics = StateService._geometric_amplitudes(xi, truncation)
        return PureState(amplitudes, BASIS_LABELS["TWIN_LADDER"]), diagnostics

    @staticmethod
    def squeezed_coherent_moments(R: float, r: float) -> Tuple[float, float]:
        """Mean photon number and number variance of D(R) S(r)^dagger |0>."""
        sinh_sq = math.sinh(r) ** 2
        mean = R**2 + sinh_sq
        variance = R**2 * math.exp(2 * r) + 2 * sinh_sq * math.cosh(r) ** 2
        return mean, variance

    @staticmethod
    def squeezed_coherent_state(
        R: float,
        r: float,
        truncation: Optional[TruncationConfig] = None,
        tolerances: Optional[Tolerances] = None,
        cross_check: Optional[bool] = None,
    ) -> Tuple[PureState, TruncationDiagnostics]:
        """
        Squeezed coherent state D(R) S(r)^dagger |0> built with operator
        exponentials on a growing Fock truncation.

        Args:
            R: Real coherent amplitude
            r: Squeeze parameter
            truncation: Cutoff settings
            tolerances: Normalization tolerance
            cross_check: Compare against the Hermite-recurrence oracle

        Returns:
            The state and the accepted truncation

        Raises:
            InvariantError: If R or r is not finite
            TruncationError: If no cutoff below the ceiling meets the tolerance
            ConsistencyError: If the oracle disagrees beyond 1e-8
        """
        if not (math.isfinite(R) and math.isfinite(r)):
            raise InvariantError("Squeezed coherent parameters must be finite.", R=R, r=r)

        mean, variance = StateService.squeezed_coherent_moments(R, r)

        def build(dim: int) -> np.ndarray:
            operators = FockOperators(dim)
            vector = operators.apply_squeeze(-r, operators.basis_state(0))
            return operators.apply_displacement(R, vector)

        return StateService._grow(
            build,
            lambda dim: oracles.squeezed_coherent_amplitudes(R, r, dim),
            mean,
            variance,
            truncation,
            tolerances,
            cross_check,
        )

    @staticmethod
    def displaced_number_state(
        alpha: complex,
        n0: int,
        truncation: Optional[TruncationConfig] = None,
        tolerances: Optional[Tolerances] = None,
        cross_check: Optional[bool] = None,
    ) -> Tuple[PureState, TruncationDiagnostics]:
        """
        Displaced number state D(alpha) |n0> from operator exponentials,
        checked against the associated-Laguerre oracle.

        Raises:
            InvariantError: If n0 < 0
            TruncationError: If no cutoff below the ceiling meets the tolerance
            ConsistencyError: If the oracle disagrees beyond 1e-8
        """
        if n0 < 0:
            raise InvariantError("Number-state label must be nonnegative.", n0=n0)

        mean = abs(alpha) ** 2 + n0
        variance = abs(alpha) ** 2 * (2 * n0 + 1)

        def build(dim: int) -> np.ndarray:
            operators = FockOperators(dim)
            return operators.apply_displacement(alpha, operators.basis_state(n0))

        return StateService._grow(
            build,
            lambda dim: oracles.displaced_number_amplitudes(alpha, n0, dim),
            mean,
            variance,
            truncation,
            tolerances,
            cross_check,
            minimum_dim=n0 + 2,
        )

    @staticmethod
    def energy_split(mean_photons: float, squeeze_fraction: float) -> Tuple[float, float]:
        """
        Split a photon budget between displacement and squeezing.

        sinh^2 r = f n and R^2 = (1 - f) n.

        Returns:
            (R, r)
        """
        if mean_photons < 0 or not 0.0 <= squeeze_fraction <= 1.0:
            raise InvariantError(
                "Energy split needs n >= 0 and 0 <= f <= 1.",
                mean_photons=mean_photons,
                squeeze_fraction=squeeze_fraction,
            )
        r = math.asinh(math.sqrt(squeeze_fraction * mean_photons))
        R = math.sqrt((1.0 - squeeze_fraction) * mean_photons)
        return R, r

    @staticmethod
    def amplitude_split(mean_photons: float, squeeze_fraction: float) -> Tuple[float, float]:
        """
        Split the displacement axis at fixed mean photon number.

        R = (1 - f) sqrt(n) and sinh^2 r = n - R^2, so f is the share of the
        largest displacement sqrt(n) given up to squeezing. The energy share
        of squeezing is 1 - (1 - f)^2.

        Returns:
            (R, r)
        """
        if mean_photons < 0 or not 0.0 <= squeeze_fraction <= 1.0:
            raise InvariantError(
                "Amplitude split needs n >= 0 and 0 <= f <= 1.",
                mean_photons=mean_photons,
                squeeze_fraction=squeeze_fraction,
            )
        energy_fraction = 1.0 - (1.0 - squeeze_fraction) ** 2
        return StateService.energy_split(mean_photons, min(1.0, max(0.0, energy_fraction)))

    @staticmethod
    def build(
        spec: StateSpec,
        tolerances: Optional[Tolerances] = None,
        cross_check: Optional[bool] = None,
    ) -> BuiltState:
        """
        Build the state a StateSpec describes.

        Returns:
            BuiltState with truncation diagnostics and photon moments for
            the Fock families
        """
        parameters = spec.parameters
        truncation = spec.truncation
        diagnostics = None

        if spec.variant == StateVariant.QUBIT_BLOCH:
            state = StateService.qubit_from_bloch(parameters.s)
        elif spec.variant == StateVariant.FINITE_PHASE:
            state = StateService.finite_phase_state(parameters.n, parameters.phases)
        elif spec.variant == StateVariant.ROTATED_NUMBER:
            state = StateService.rotated_number_state(parameters.n, parameters.m)
        elif spec.variant == StateVariant.SG_PHASE:
            state, diagnostics = StateService.sg_phase_state(parameters.xi, truncation)
        elif spec.variant == StateVariant.TMSV:
            state, diagnostics = StateService.tmsv_state(parameters.xi, truncation)
        elif spec.variant == StateVariant.SQUEEZED_COHERENT:
            state, diagnostics = StateService.squeezed_coherent_state(
                parameters.R, parameters.r, truncation, tolerances, cross_check
            )
        elif spec.variant == StateVariant.DISPLACED_NUMBER:
            state, diagnostics = StateService.displaced_number_state(
                parameters.alpha, parameters.n0, truncation, tolerances, cross_check
            )
        else:
            raise InvariantError(f"Unknown state variant {spec.variant!r}.")

        mean = variance = None
        if diagnostics is not None:
            mean, variance = number_moments(state.probabilities)

        logger.info(f"Built {spec.variant} state of dimension {state.dim}")
        return BuiltState(
            spec=spec,
            state=state,
            truncation=diagnostics,
            mean_photons=mean,
            number_variance=variance,
        )

    @staticmethod
    def _geometric_amplitudes(
        xi: complex, truncation: Optional[TruncationConfig]
    ) -> Tuple[np.ndarray, TruncationDiagnostics]:
        truncation = truncation or TruncationConfig()
        tail_mass_tol, ceiling = _truncation_limits(truncation)
        modulus = abs(xi)

        needed = StateService.sg_dimension(xi, tail_mass_tol)
        dim = truncation.dim or needed
        if dim < needed and truncation.auto_grow:
            dim = needed
        if dim > ceiling:
            raise TruncationError(
                "Phase-state cutoff exceeds the dimension ceiling.", needed=dim, ceiling=ceiling
            )

        amplitudes = math.sqrt(1 - modulus**2) * np.power(complex(xi), np.arange(dim))
        if modulus == 0:
            tail_sqrt_sum = tail_mass = 0.0
        else:
            tail_mass = modulus ** (2 * dim)
            tail_sqrt_sum = math.sqrt(1 - modulus**2) * modulus**dim / (1 - modulus)
        if tail_mass > tail_mass_tol:
            raise TruncationError(
                "Fixed cutoff leaves too much tail mass.", dim=dim, tail_mass=tail_mass
            )

        return amplitudes, TruncationDiagnostics(
            dim=dim,
            tail_mass_tol=tail_mass_tol,
            tail_mass=tail_mass,
            tail_sqrt_sum=tail_sqrt_sum,
        )

    @staticmethod
    def _grow(
        build: Callable[[int], np.ndarray],
        oracle: Callable[[int], np.ndarray],
        mean: float,
        variance: float,
        truncation: Optional[TruncationConfig],
        tolerances: Optional[Tolerances],
        cross_check: Optional[bool],
        minimum_dim: int = 2,
    ) -> Tuple[PureState, TruncationDiagnostics]:
        """
        Double the cutoff until the guard band is empty to tail_mass_tol.

        Acceptance looks at the guard-band probability mass; the guard-band
        sqrt-sum is reported alongside it. The last attempt is clamped to the
        ceiling.
        """
        truncation = truncation or TruncationConfig()
        tolerances = resolve_tolerances(tolerances)
        tail_mass_tol, ceiling = _truncation_limits(truncation)
        fraction = settings.COHERENCE_LAB["GUARD_BAND_FRACTION"]
        if cross_check is None:
            cross_check = bool(settings.COHERENCE_LAB["CROSS_CHECK"])

        dim = truncation.dim or min(math.ceil(mean + 8 * math.sqrt(variance + 1) + 20), ceiling)
        dim = max(dim, minimum_dim)
        steps = 0

        while True:
            if dim > ceiling:
                raise TruncationError(
                    "Tail tolerance not met below the dimension ceiling.",
                    ceiling=ceiling,
                    tail_mass_tol=tail_mass_tol,
                    mean_photons=mean,
                )

            amplitudes = fix_global_phase(build(dim))
            guard = max(1, math.ceil(fraction * dim))
            guard_moduli = np.abs(amplitudes[-guard:])
            guard_mass = float(np.sum(guard_moduli**2))
            guard_sqrt_sum = float(np.sum(guard_moduli))

            if guard_mass <= tail_mass_tol:
                break
            if not truncation.auto_grow:
                raise TruncationError(
                    "Fixed cutoff leaves too much mass in the guard band.",
                    dim=dim,
                    guard_mass=guard_mass,
                )
            if dim >= ceiling:
                raise TruncationError(
                    "Tail tolerance not met below the dimension ceiling.",
                    ceiling=ceiling,
                    tail_mass_tol=tail_mass_tol,
                    guard_mass=guard_mass,
                    mean_photons=mean,
                )
            logger.debug(
                f"Growing truncation from {dim}: guard mass {guard_mass:.3e}, "
                f"guard sqrt-sum {guard_sqrt_sum:.3e}"
            )
            dim = min(2 * dim, ceiling)
            steps += 1

        norm_sq = float(np.sum(np.abs(amplitudes) ** 2))
        if abs(norm_sq - 1.0) > tolerances.norm_tol:
            raise TruncationError("Truncated state is not normalized.", dim=dim, norm_sq=norm_sq)

        deviation = None
        if cross_check:
            reference = oracle(dim)
            overlap = np.vdot(reference, amplitudes)
            if overlap != 0:
                reference = reference * (overlap / abs(overlap))
            kept = dim - guard
            deviation = float(np.max(np.abs(amplitudes[:kept] - reference[:kept])))
            if deviation > ORACLE_TOL:
                raise ConsistencyError(
                    "Operator-exponential state disagrees with its closed form.",
                    dim=dim,
                    deviation=deviation,
                )

        return PureState(amplitudes, BASIS_LABELS["FOCK"]), TruncationDiagnostics(
            dim=dim,
            tail_mass_tol=tail_mass_tol,
            tail_mass=guard_mass,
            tail_sqrt_sum=guard_sqrt_sum,
            growth_steps=steps,
            oracle_max_deviation=deviation,
        )
