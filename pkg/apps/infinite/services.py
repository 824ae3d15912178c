"""
Infinite-dimensional Pythagoras structure with a thermal-like reference.

The maximally mixed state does not exist in infinite dimension; the
geometric state (1 - xi) sum xi^n |n><n| stands in for it as xi -> 1.
Overlaps with the reference are summed termwise over the state's support,
so the reference is never materialized at extreme xi.
"""

import math
from typing import Callable, Optional, Sequence, Union

import numpy as np
from django.conf import settings
from loguru import logger

from apps.hellinger.services import DensityService
from apps.hellinger.types import (DensityMatrix, PureState, Tolerances,
                                  resolve_tolerances)
from apps.infinite.types import (CONVERGED, DIVERGING, ConvergenceResult,
                                 InfinitePythagoras, LimitPoint, LimitSweep,
                                 PythagorasTerms, ThermalReference,
                                 WindowPolicy)
from apps.quantifiers.services import QuantifierService
from apps.utils.exceptions import InvariantError, TruncationError

State = Union[PureState, DensityMatrix]

DEFAULT_XI_GRID = tuple(1.0 - np.logspace(-1, -6, 11))
EXTRAPOLATION_POINTS = 4


def _check_xi(xi: float) -> None:
    if not 0.0 <= xi < 1.0:
        raise InvariantError("Thermal parameter must satisfy 0 <= xi < 1.", xi=xi)


def _populations(state: State) -> np.ndarray:
    if isinstance(state, PureState):
        return state.probabilities
    return state.populations


class InfiniteService:
    """Service class for the xi -> 1 limit."""

    @staticmethod
    def thermal_reference(
        xi: float,
        dim: Optional[int] = None,
        tolerances: Optional[Tolerances] = None,
    ) -> ThermalReference:
        """
        Thermal-like reference over the first dim levels.

        Args:
            xi: Geometric ratio, 0 <= xi < 1
            dim: Window size; by default the smallest one whose outside
                mass is below tail_mass_tol

        Returns:
            ThermalReference with renormalized populations

        Raises:
            InvariantError: If xi is outside [0, 1)
            TruncationError: If the default window exceeds the ceiling
        """
        _check_xi(xi)
        tolerances = resolve_tolerances(tolerances)
        ceiling = settings.COHERENCE_LAB["DIM_CEILING"]

        if dim is None:
            dim = 1 if xi == 0 else math.ceil(math.log(tolerances.tail_mass_tol) / math.log(xi))
            if dim > ceiling:
                raise TruncationError(
                    "Thermal reference window exceeds the dimension ceiling.",
                    xi=xi,
                    needed=dim,
                    ceiling=ceiling,
                )
        if dim < 1:
            raise InvariantError("Thermal reference needs at least one level.", dim=dim)

        weights = (1.0 - xi) * np.power(xi, np.arange(dim, dtype=float))
        outside = xi**dim
        return ThermalReference(
            xi=xi,
            dim=dim,
            populations=weights / np.sum(weights),
            outside_mass=outside,
        )

    @staticmethod
    def convergence_check(
        source: Union[Callable[[int], np.ndarray], Sequence[float]],
        policy: Optional[WindowPolicy] = None,
    ) -> ConvergenceResult:
        """
        Classify whether sum sqrt(p_n) converges.

        A growth handle is evaluated on doubling windows; a relative growth
        below the policy tolerance on the last doubling means converged. A
        fixed vector longer than the start window converges when its top
        guard band carries a relative sqrt-weight below that tolerance;
        shorter vectors are exact finite supports.

        Args:
            source: Either a callable returning p over the first d levels,
                or a fixed probability vector
            policy: Window growth settings
        """
        policy = policy or WindowPolicy()

        if callable(source):
            dims = [policy.start * 2**step for step in range(policy.max_doublings + 1)]
            sums = []
            for dim in dims:
                sums.append(float(np.sum(np.sqrt(np.clip(source(dim), 0.0, None)))))
                if len(sums) >= 2 and sums[-2] > 0:
                    if (sums[-1] - sums[-2]) / sums[-2] < policy.relative_growth_tol:
                        return ConvergenceResult(CONVERGED, dims[: len(sums)], sums)
            logger.debug(f"Square-root sums still growing at window {dims[-1]}")
            return ConvergenceResult(DIVERGING, dims, sums)

        roots = np.sqrt(np.clip(np.asarray(source, dtype=float), 0.0, None))
        length = roots.size
        total = float(np.sum(roots))
        if length <= policy.start:
            return ConvergenceResult(CONVERGED, [length], [total])

        band = math.ceil(settings.COHERENCE_LAB["GUARD_BAND_FRACTION"] * length)
        dims = [length - band, length]
        sums = [float(np.sum(roots[: length - band])), total]
        result = ConvergenceResult(CONVERGED, dims, sums)
        if sums[0] == 0 or result.relative_growth >= policy.relative_growth_tol:
            return ConvergenceResult(DIVERGING, dims, sums)
        return result

    @staticmethod
    def thermal_overlap(populations: np.ndarray, xi: float) -> float:
        """sqrt(1 - xi) sum xi^(n/2) sqrt(p_n) over the support of p."""
        _check_xi(xi)
        support = np.flatnonzero(populations > 0)
        if support.size == 0:
            return 0.0
        if xi == 0:
            return float(math.sqrt(populations[0])) if populations[0] > 0 else 0.0
        logs = 0.5 * support * math.log(xi) + 0.5 * np.log(populations[support])
        return math.sqrt(1.0 - xi) * float(np.sum(np.exp(logs)))

    @staticmethod
    def certainty_against_thermal(populations: np.ndarray, xi: float) -> float:
        """S_H(xi) = 2 - 2 sqrt(1 - xi) sum xi^(n/2) sqrt(p_n)."""
        return max(2.0 - 2.0 * InfiniteService.thermal_overlap(populations, xi), 0.0)

    @staticmethod
    def certainty_limit_sweep(
        state: State,
        xi_grid: Sequence[float] = DEFAULT_XI_GRID,
        tolerances: Optional[Tolerances] = None,
        policy: Optional[WindowPolicy] = None,
    ) -> LimitSweep:
        """
        Sweep S_H(xi) and NC_H(xi) = C_H + S_H(xi) towards xi -> 1.

        Args:
            state: Fock-basis state
            xi_grid: Reference parameters in [0, 1)
            tolerances: Tolerances for the coherence and monotonicity
            policy: Convergence-check windows

        Returns:
            LimitSweep with an extrapolated NC_H limit

        Raises:
            InvariantError: If the sqrt-sum of the populations diverges
        """
        tolerances = resolve_tolerances(tolerances)
        populations = _populations(state)
        convergence = InfiniteService.convergence_check(populations, policy)
        if not convergence.converged:
            raise InvariantError(
                "Populations have a diverging square-root sum.",
                relative_growth=convergence.relative_growth,
            )

        c_h = InfiniteService._coherence(state, tolerances)
        grid = np.sort(np.asarray(xi_grid, dtype=float))
        points = []
        for xi in grid:
            overlap = InfiniteService.thermal_overlap(populations, float(xi))
            s_h = max(2.0 - 2.0 * overlap, 0.0)
            points.append(
                LimitPoint(xi=float(xi), s_h=s_h, nc_h=c_h + s_h, cross_term=2.0 * overlap)
            )

        # terms sqrt(1 - xi) xi^(n/2) peak at xi = n / (n + 1)
        significant = np.flatnonzero(np.sqrt(populations) >= tolerances.tail_mass_tol)
        n_max = int(significant[-1]) if significant.size else 0
        monotone_from = n_max / (n_max + 1)
        tail = [point.s_h for point in points if point.xi >= monotone_from]
        monotone = all(
            later >= earlier - 1e-9 for earlier, later in zip(tail, tail[1:])
        )

        fit = points[-EXTRAPOLATION_POINTS:]
        u = np.array([math.sqrt(1.0 - point.xi) for point in fit])
        nc = np.array([point.nc_h for point in fit])
        degree = min(2, len(fit) - 1)
        extrapolated = float(np.polyfit(u, nc, degree)[-1]) if degree > 0 else float(nc[0])

        limit = c_h + 2.0
        logger.info(
            f"Limit sweep over {len(points)} points: NC_H -> {extrapolated:.10g} (C_H + 2 = {limit:.10g})"
        )
        return LimitSweep(
            c_h=c_h,
            points=points,
            nc_h_limit=limit,
            nc_h_extrapolated=extrapolated,
            residual_at_largest_xi=abs(points[-1].nc_h - limit),
            monotone_from=monotone_from,
            monotone=monotone,
            convergence=convergence,
        )

    @staticmethod
    def infinite_pythagoras_residual(
        state: State, xi: float, tolerances: Optional[Tolerances] = None
    ) -> InfinitePythagoras:
        """
        Pythagoras identities with the thermal reference in place of I/N.

        Distances are evaluated on the state's support block; the reference
        weight beyond it enters analytically as sum_{n >= d} t_n (Hellinger)
        and sum_{n >= d} t_n^2 (Hilbert-Schmidt).

        Raises:
            InvariantError: If xi is outside [0, 1)
        """
        _check_xi(xi)
        tolerances = resolve_tolerances(tolerances)
        populations = _populations(state)
        support_dim = populations.size

        levels = np.arange(support_dim, dtype=float)
        t = (1.0 - xi) * np.power(xi, levels)
        outside_mass = xi**support_dim
        outside_sq = (1.0 - xi) ** 2 * xi ** (2 * support_dim) / (1.0 - xi**2)
        root_t = np.sqrt(t)
        root_p = np.sqrt(populations)

        if isinstance(state, PureState):
            moduli = np.abs(state.amplitudes)
            x = float(np.sum(moduli))
            sum_p = float(np.sum(populations))
            purity = sum_p**2
            # sqrt-purity of a pure state is x^2; off-diagonal weight follows
            h_total = x**2 - 2.0 * float(np.sum(root_p * root_t)) + float(np.sum(t)) + outside_mass
            h_coherence = x**2 - sum_p
            hs_total = purity - 2.0 * float(np.sum(populations * t)) + float(np.sum(t**2)) + outside_sq
            hs_coherence = purity - float(np.sum(populations**2))
        else:
            root = DensityService.hermitian_elementwise_sqrt(state, tolerances).entries
            difference = root - np.diag(root_t)
            h_total = DensityService.trace_of_product(difference, difference).real + outside_mass
            off_root = root - np.diag(root.diagonal())
            h_coherence = DensityService.trace_of_product(off_root, off_root).real
            gap = state.entries - np.diag(t)
            hs_total = DensityService.trace_of_product(gap, gap).real + outside_sq
            off = state.entries - np.diag(state.entries.diagonal())
            hs_coherence = DensityService.trace_of_product(off, off).real

        h_certainty = float(np.sum((root_p - root_t) ** 2)) + outside_mass
        hs_certainty = float(np.sum((populations - t) ** 2)) + outside_sq

        return InfinitePythagoras(
            xi=xi,
            support_dim=support_dim,
            hellinger=PythagorasTerms(
                total=h_total,
                coherence=h_coherence,
                certainty=h_certainty,
                residual=abs(h_total - h_coherence - h_certainty),
            ),
            hilbert_schmidt=PythagorasTerms(
                total=hs_total,
                coherence=hs_coherence,
                certainty=hs_certainty,
                residual=abs(hs_total - hs_coherence - hs_certainty),
            ),
        )

    @staticmethod
    def nonclassicality_infinite(
        state: State,
        tolerances: Optional[Tolerances] = None,
        policy: Optional[WindowPolicy] = None,
    ) -> float:
        """
        Limit NC_H = C_H + 2 of the nonclassicality against the thermal reference.

        Raises:
            InvariantError: If the sqrt-sum of the populations diverges
        """
        tolerances = resolve_tolerances(tolerances)
        convergence = InfiniteService.convergence_check(_populations(state), policy)
        if not convergence.converged:
            raise InvariantError(
                "Populations have a diverging square-root sum.",
                relative_growth=convergence.relative_growth,
            )
        return InfiniteService._coherence(state, tolerances) + 2.0

    @staticmethod
    def gaussian_coherence_estimate(number_variance: float) -> float:
        """
        Coherence of a broad, smooth number distribution: 2 sqrt(2 pi var) - 1.

        Raises:
            InvariantError: If the variance is not positive
        """
        if not number_variance > 0:
            raise InvariantError(
                "Number variance must be positive.", number_variance=number_variance
            )
        return 2.0 * math.sqrt(2.0 * math.pi * number_variance) - 1.0

    @staticmethod
    def rough_number_variance(mean_photons: float, r: float) -> float:
        """Large-displacement estimate n e^(2r) of the number variance."""
        return mean_photons * math.exp(2.0 * r)

    @staticmethod
    def sg_coherence_closed_form(modulus: float) -> float:
        """C_H = 2|xi| / (1 - |xi|) of the Susskind-Glogower and TMSV states."""
        if not 0.0 <= modulus < 1.0:
            raise InvariantError("Phase-state parameter must satisfy |xi| < 1.", modulus=modulus)
        return 2.0 * modulus / (1.0 - modulus)

    @staticmethod
    def sg_coherence_from_mean_photons(mean_photons: float) -> float:
        """Same coherence written with n = |xi|^2 / (1 - |xi|^2): 2(n + sqrt(n + n^2))."""
        if mean_photons < 0:
            raise InvariantError("Mean photon number must be nonnegative.", mean_photons=mean_photons)
        return 2.0 * (mean_photons + math.sqrt(mean_photons + mean_photons**2))

    @staticmethod
    def sg_coherence_asymptote(mean_photons: float) -> float:
        return 4.0 * mean_photons

    @staticmethod
    def xi_from_mean_photons(mean_photons: float) -> float:
        return math.sqrt(mean_photons / (1.0 + mean_photons))

    @staticmethod
    def mean_photons_from_xi(modulus: float) -> float:
        return modulus**2 / (1.0 - modulus**2)

    @staticmethod
    def _coherence(state: State, tolerances: Tolerances) -> float:
        if isinstance(state, PureState):
            return QuantifierService.report_pure(state, tolerances).c_h
        return QuantifierService.coherence_h(state, tolerances)
