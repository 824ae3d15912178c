"""
Coherence, certainty and nonclassicality quantifiers.

Every Hellinger-family quantifier has two equivalent evaluations: a squared
distance built from elementwise square roots, and an entrywise sum. With
CROSS_CHECK enabled both are computed and compared; otherwise only the
entrywise form runs.
"""

import math
from typing import Optional, Sequence, Tuple

import numpy as np
from django.conf import settings
from loguru import logger

from apps.hellinger.services import DensityService, SqrtFunction
from apps.hellinger.types import (DensityMatrix, PureState, Tolerances,
                                  resolve_tolerances)
from apps.quantifiers.types import (BasisOptimum, HSQuantifiers,
                                    PythagorasCheck, QuantifierReport,
                                    QubitClosedForms)
from apps.utils.constants import QUBIT_ROTATION_GRID
from apps.utils.exceptions import (ConsistencyError, ContractError,
                                   InvariantError)


def _cross_check_enabled(cross_check: Optional[bool]) -> bool:
    if cross_check is not None:
        return cross_check
    return bool(settings.COHERENCE_LAB["CROSS_CHECK"])


def _require_agreement(name: str, left: float, right: float, tolerances: Tolerances) -> None:
    limit = tolerances.consistency_tol * max(1.0, abs(left), abs(right))
    if abs(left - right) > limit:
        raise ConsistencyError(
            f"Two evaluations of {name} disagree.",
            quantity=name,
            distance_form=left,
            entrywise_form=right,
            difference=abs(left - right),
        )


class QuantifierService:
    """Service class for the quantifiers of a single state."""

    @staticmethod
    def l1_coherence(rho: DensityMatrix) -> float:
        """Sum of the moduli of the off-diagonal entries."""
        moduli = np.abs(rho.entries)
        return float(np.sum(moduli) - np.sum(moduli.diagonal()))

    @staticmethod
    def x_sum(rho: DensityMatrix) -> float:
        """Sum of the square roots of the populations."""
        return float(np.sum(np.sqrt(rho.populations)))

    @staticmethod
    def coherence_h(
        rho: DensityMatrix,
        tolerances: Optional[Tolerances] = None,
        sqrt_fn: Optional[SqrtFunction] = None,
        cross_check: Optional[bool] = None,
    ) -> float:
        """
        Hellinger coherence: squared distance to the diagonal part.

        Args:
            rho: Valid density matrix
            tolerances: Consistency tolerance for the cross-check
            sqrt_fn: Elementwise root used by the distance form
            cross_check: Force or skip the distance-form evaluation

        Returns:
            The entrywise form sum_{j != k} |rho_jk|

        Raises:
            ConsistencyError: If the distance form disagrees with the sum
        """
        tolerances = resolve_tolerances(tolerances)
        value = QuantifierService.l1_coherence(rho)

        if _cross_check_enabled(cross_check):
            distance = DensityService.hellinger_distance_sq(
                rho, DensityService.diagonal_part(rho), tolerances, sqrt_fn
            )
            _require_agreement("coherence_h", distance, value, tolerances)

        return value

    @staticmethod
    def coherence_pure(
        probabilities: Sequence[float], tolerances: Optional[Tolerances] = None
    ) -> float:
        """
        Coherence of a pure state from its populations: (sum sqrt(p))^2 - 1.

        Raises:
            InvariantError: If p is not a probability vector
        """
        p = DensityService.probability_vector(probabilities, tolerances)
        return max(float(np.sum(np.sqrt(p))) ** 2 - 1.0, 0.0)

    @staticmethod
    def certainty_h(
        rho: DensityMatrix,
        tolerances: Optional[Tolerances] = None,
        sqrt_fn: Optional[SqrtFunction] = None,
        cross_check: Optional[bool] = None,
    ) -> float:
        """
        Hellinger certainty: squared distance between rho_d and I/N.

        Returns:
            2 (1 - x / sqrt(N)) with x the sum of sqrt populations
        """
        tolerances = resolve_tolerances(tolerances)
        value = max(2.0 * (1.0 - QuantifierService.x_sum(rho) / math.sqrt(rho.dim)), 0.0)

        if _cross_check_enabled(cross_check):
            distance = DensityService.hellinger_distance_sq(
                DensityService.diagonal_part(rho),
                DensityService.maximally_mixed(rho.dim, rho.basis_label),
                tolerances,
                sqrt_fn,
            )
            _require_agreement("certainty_h", distance, value, tolerances)

        return value

    @staticmethod
    def nonclassicality_h(
        rho: DensityMatrix,
        tolerances: Optional[Tolerances] = None,
        sqrt_fn: Optional[SqrtFunction] = None,
        cross_check: Optional[bool] = None,
    ) -> float:
        """
        Hellinger nonclassicality: squared distance to I/N.

        Raises:
            ConsistencyError: If the distance differs from coherence + certainty
        """
        tolerances = resolve_tolerances(tolerances)
        value = QuantifierService.l1_coherence(rho) + max(
            2.0 * (1.0 - QuantifierService.x_sum(rho) / math.sqrt(rho.dim)), 0.0
        )

        if _cross_check_enabled(cross_check):
            distance = DensityService.hellinger_distance_sq(
                rho,
                DensityService.maximally_mixed(rho.dim, rho.basis_label),
                tolerances,
                sqrt_fn,
            )
            _require_agreement("nonclassicality_h", distance, value, tolerances)
            return distance

        return value

    @staticmethod
    def renyi_half(
        probabilities: Sequence[float], tolerances: Optional[Tolerances] = None
    ) -> float:
        """Renyi entropy of order 1/2, 2 ln(sum sqrt(p)); zero entries add nothing."""
        p = DensityService.probability_vector(probabilities, tolerances)
        return 2.0 * math.log(float(np.sum(np.sqrt(p))))

    @staticmethod
    def certainty_from_renyi(renyi: float, dim: int) -> float:
        """Certainty written through the Renyi-1/2 entropy."""
        return 2.0 * (1.0 - math.exp(renyi / 2.0) / math.sqrt(dim))

    @staticmethod
    def pythagoras_residual_h(
        rho: DensityMatrix,
        reference: DensityMatrix,
        tolerances: Optional[Tolerances] = None,
        sqrt_fn: Optional[SqrtFunction] = None,
    ) -> PythagorasCheck:
        """
        Hellinger Pythagoras identity through the diagonal part of rho.

        Args:
            rho: Valid density matrix
            reference: Incoherent reference state (I/N or any diagonal state)
            tolerances: Tolerances for the diagonality check
            sqrt_fn: Elementwise root

        Returns:
            PythagorasCheck with |d(rho, ref) - d(rho, rho_d) - d(rho_d, ref)|
            and the cross term tr[(sqrt(rho) - sqrt(rho_d))(sqrt(rho_d) - sqrt(ref))]

        Raises:
            ContractError: If the reference is not diagonal
        """
        tolerances = resolve_tolerances(tolerances)
        QuantifierService._require_incoherent(reference, tolerances)
        root = sqrt_fn or (
            lambda state: DensityService.hermitian_elementwise_sqrt(state, tolerances)
        )
        diagonal = DensityService.diagonal_part(rho)

        total = DensityService.hellinger_distance_sq(rho, reference, tolerances, root)
        coherence = DensityService.hellinger_distance_sq(rho, diagonal, tolerances, root)
        certainty = DensityService.hellinger_distance_sq(diagonal, reference, tolerances, root)

        root_rho = root(rho).entries
        root_diagonal = root(diagonal).entries
        cross = DensityService.trace_of_product(
            root_rho - root_diagonal, root_diagonal - root(reference).entries
        )

        return PythagorasCheck(
            total=total,
            coherence=coherence,
            certainty=certainty,
            cross_term=abs(cross),
            residual=abs(total - coherence - certainty),
        )

    @staticmethod
    def pythagoras_residual_hs(
        rho: DensityMatrix,
        reference: DensityMatrix,
        tolerances: Optional[Tolerances] = None,
    ) -> PythagorasCheck:
        """
        Hilbert-Schmidt Pythagoras identity through the diagonal part of rho.

        Raises:
            ContractError: If the reference is not diagonal
        """
        tolerances = resolve_tolerances(tolerances)
        QuantifierService._require_incoherent(reference, tolerances)
        diagonal = DensityService.diagonal_part(rho)

        total = DensityService.hilbert_schmidt_distance_sq(rho, reference, tolerances)
        coherence = DensityService.hilbert_schmidt_distance_sq(rho, diagonal, tolerances)
        certainty = DensityService.hilbert_schmidt_distance_sq(diagonal, reference, tolerances)
        cross = DensityService.trace_of_product(
            rho.entries - diagonal.entries, diagonal.entries - reference.entries
        )

        return PythagorasCheck(
            total=total,
            coherence=coherence,
            certainty=certainty,
            cross_term=abs(cross),
            residual=abs(total - coherence - certainty),
        )

    @staticmethod
    def sqrt_purity(
        rho: DensityMatrix,
        tolerances: Optional[Tolerances] = None,
        sqrt_fn: Optional[SqrtFunction] = None,
    ) -> float:
        """Purity of the elementwise square root, tr[(sqrt rho)^2] = C_H + 1."""
        tolerances = resolve_tolerances(tolerances)
        root = (sqrt_fn or (
            lambda state: DensityService.hermitian_elementwise_sqrt(state, tolerances)
        ))(rho).entries
        value = DensityService.trace_of_product(root, root)
        if abs(value.imag) > tolerances.imag_tol:
            raise ConsistencyError(
                "Square-root purity has a non-negligible imaginary part.",
                imaginary=value.imag,
            )
        return value.real

    @staticmethod
    def duality_gap(
        rho: DensityMatrix,
        tolerances: Optional[Tolerances] = None,
        coherence: Optional[float] = None,
        certainty: Optional[float] = None,
    ) -> float:
        """
        Gap in 1 >= S_H / 2 + sqrt((C_H + 1) / N); zero on pure states.

        Raises:
            ConsistencyError: If the gap is negative beyond consistency_tol
        """
        tolerances = resolve_tolerances(tolerances)
        if coherence is None:
            coherence = QuantifierService.coherence_h(rho, tolerances, cross_check=False)
        if certainty is None:
            certainty = QuantifierService.certainty_h(rho, tolerances, cross_check=False)
        return QuantifierService._checked_gap(coherence, certainty, rho.dim, tolerances)

    @staticmethod
    def hs_quantifiers(
        rho: DensityMatrix, tolerances: Optional[Tolerances] = None
    ) -> HSQuantifiers:
        """
        Hilbert-Schmidt coherence, certainty and nonclassicality.

        nc_hs is evaluated as tr[(rho - I/N)^2]; the residual compares it with
        c_hs + s_hs.
        """
        tolerances = resolve_tolerances(tolerances)
        moduli_sq = np.abs(rho.entries) ** 2
        c_hs = float(np.sum(moduli_sq) - np.sum(moduli_sq.diagonal()))
        s_hs = float(np.sum((rho.entries.diagonal().real - 1.0 / rho.dim) ** 2))
        nc_hs = DensityService.hilbert_schmidt_distance_sq(
            rho, DensityService.maximally_mixed(rho.dim, rho.basis_label), tolerances
        )
        return HSQuantifiers(
            c_hs=c_hs, s_hs=s_hs, nc_hs=nc_hs, residual=abs(nc_hs - c_hs - s_hs)
        )

    @staticmethod
    def qubit_closed_forms(bloch: Sequence[float]) -> QubitClosedForms:
        """
        Closed-form qubit quantifiers for rho = (1 + s . sigma) / 2.

        Raises:
            InvariantError: If |s| > 1
        """
        s_x, s_y, s_z = QuantifierService._bloch_vector(bloch)
        c_h = math.hypot(s_x, s_y)
        s_h = max(2.0 - math.sqrt(1.0 + s_z) - math.sqrt(max(1.0 - s_z, 0.0)), 0.0)
        return QubitClosedForms(
            c_h=c_h,
            s_h=s_h,
            nc_h=c_h + s_h,
            c_h_max_over_bases=math.sqrt(s_x**2 + s_y**2 + s_z**2),
        )

    @staticmethod
    def qubit_basis_optimum(
        rho: DensityMatrix, grid: Tuple[int, int] = QUBIT_ROTATION_GRID
    ) -> BasisOptimum:
        """
        Maximize the qubit coherence over basis rotations rho -> U rho U^dagger.

        The new basis is {|n>, |-n>} for Bloch directions n on a (phi, theta)
        grid; the direction perpendicular to s is added as an extra candidate.

        Raises:
            InvariantError: If rho is not a 2x2 matrix
        """
        if rho.dim != 2:
            raise InvariantError("Basis-rotation search requires a qubit.", dim=rho.dim)

        n_phi, n_theta = grid
        phi, theta = np.meshgrid(
            np.linspace(0.0, 2 * np.pi, n_phi, endpoint=False),
            np.linspace(0.0, np.pi, n_theta),
            indexing="ij",
        )
        phi = phi.ravel()
        theta = theta.ravel()

        matrix = rho.entries
        s = np.array(
            [
                2 * matrix[0, 1].real,
                -2 * matrix[0, 1].imag,
                (matrix[0, 0] - matrix[1, 1]).real,
            ]
        )
        perpendicular = QuantifierService._perpendicular(s)
        theta = np.append(theta, math.acos(float(np.clip(perpendicular[2], -1.0, 1.0))))
        phi = np.append(phi, math.atan2(perpendicular[1], perpendicular[0]))

        up = np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=1)
        down = np.stack([-np.exp(-1j * phi) * np.sin(theta / 2), np.cos(theta / 2)], axis=1)

        coherences = 2 * np.abs(np.einsum("gi,ij,gj->g", up.conj(), matrix, down))
        rotated_s_z = (
            np.einsum("gi,ij,gj->g", up.conj(), matrix, up)
            - np.einsum("gi,ij,gj->g", down.conj(), matrix, down)
        ).real

        best = int(np.argmax(coherences))
        c_h_max = float(coherences[best])
        s_z = float(rotated_s_z[best])
        s_h = max(2.0 - math.sqrt(1.0 + s_z) - math.sqrt(max(1.0 - s_z, 0.0)), 0.0)

        return BasisOptimum(
            c_h_max=c_h_max,
            theta=float(theta[best]),
            phi=float(phi[best]),
            rotated_s_z=s_z,
            grid_c_h_max=float(np.max(coherences[:-1])),
            nc_h_at_optimum=c_h_max + s_h,
        )

    @staticmethod
    def report(
        rho: DensityMatrix,
        tolerances: Optional[Tolerances] = None,
        sqrt_fn: Optional[SqrtFunction] = None,
        cross_check: Optional[bool] = None,
    ) -> QuantifierReport:
        """
        Full quantifier report of a density matrix.

        Args:
            rho: Valid density matrix
            tolerances: Tolerances for every consistency check
            sqrt_fn: Elementwise root for the distance forms
            cross_check: Force or skip the distance-form evaluations

        Returns:
            QuantifierReport

        Raises:
            ConsistencyError: If any pair of equivalent evaluations disagrees
        """
        tolerances = resolve_tolerances(tolerances)
        c_h = QuantifierService.coherence_h(rho, tolerances, sqrt_fn, cross_check)
        s_h = QuantifierService.certainty_h(rho, tolerances, sqrt_fn, cross_check)
        nc_h = QuantifierService.nonclassicality_h(rho, tolerances, sqrt_fn, cross_check)
        hs = QuantifierService.hs_quantifiers(rho, tolerances)
        # three independent distances, whatever the cross-check setting
        pythagoras = QuantifierService.pythagoras_residual_h(
            rho, DensityService.maximally_mixed(rho.dim, rho.basis_label), tolerances, sqrt_fn
        )

        populations = rho.populations / np.sum(rho.populations)
        renyi = QuantifierService.renyi_half(populations, tolerances)
        _require_agreement(
            "certainty_h",
            s_h,
            QuantifierService.certainty_from_renyi(renyi, rho.dim),
            tolerances,
        )

        return QuantifierReport(
            dim=rho.dim,
            c_h=c_h,
            s_h=s_h,
            nc_h=nc_h,
            c_hs=hs.c_hs,
            s_hs=hs.s_hs,
            nc_hs=hs.nc_hs,
            pythagoras_residual_h=pythagoras.residual,
            pythagoras_residual_hs=hs.residual,
            x_sum=QuantifierService.x_sum(rho),
            renyi_half=renyi,
            sqrt_purity=QuantifierService.sqrt_purity(rho, tolerances, sqrt_fn),
            duality_gap=QuantifierService._checked_gap(c_h, s_h, rho.dim, tolerances),
        )

    @staticmethod
    def report_pure(
        psi: PureState, tolerances: Optional[Tolerances] = None
    ) -> QuantifierReport:
        """
        Full quantifier report of a pure state from its amplitudes.

        Uses the pure-state closed forms, so the cost is linear in the
        dimension and no density matrix is formed.

        Raises:
            InvariantError: If the amplitudes are not normalized
        """
        tolerances = resolve_tolerances(tolerances)
        norm_sq = psi.norm_sq
        if abs(norm_sq - 1.0) > tolerances.norm_tol:
            raise InvariantError("Pure state is not normalized.", norm_sq=norm_sq)

        n = psi.dim
        moduli = np.abs(psi.amplitudes)
        p = moduli**2
        x = float(np.sum(moduli))
        sum_p_sq = float(np.sum(p**2))

        c_h = max(x**2 - norm_sq, 0.0)
        s_h = max(norm_sq - 2.0 * x / math.sqrt(n) + 1.0, 0.0)
        nc_h = max(x**2 - 2.0 * x / math.sqrt(n) + 1.0, 0.0)
        c_hs = max(norm_sq**2 - sum_p_sq, 0.0)
        s_hs = float(np.sum((p - 1.0 / n) ** 2))
        nc_hs = max(norm_sq**2 - 2.0 * norm_sq / n + 1.0 / n, 0.0)
        renyi = 2.0 * math.log(x)

        # truncated states keep their tail deficit, 1 - norm_sq, in the closed form
        _require_agreement(
            "certainty_h",
            s_h,
            QuantifierService.certainty_from_renyi(renyi, n) + norm_sq - 1.0,
            tolerances,
        )
        logger.debug(f"Quantified pure state of dimension {n}: C_H={c_h:.6g}")

        return QuantifierReport(
            dim=n,
            c_h=c_h,
            s_h=s_h,
            nc_h=nc_h,
            c_hs=c_hs,
            s_hs=s_hs,
            nc_hs=nc_hs,
            pythagoras_residual_h=abs(nc_h - c_h - s_h),
            pythagoras_residual_hs=abs(nc_hs - c_hs - s_hs),
            x_sum=x,
            renyi_half=renyi,
            sqrt_purity=x**2,
            duality_gap=QuantifierService._checked_gap(c_h, s_h, n, tolerances),
        )

    @staticmethod
    def _checked_gap(coherence: float, certainty: float, dim: int, tolerances: Tolerances) -> float:
        gap = 1.0 - certainty / 2.0 - math.sqrt((coherence + 1.0) / dim)
        if gap < -tolerances.consistency_tol * max(1.0, float(dim)):
            raise ConsistencyError("Duality inequality violated.", gap=gap, dim=dim)
        return gap

    @staticmethod
    def _require_incoherent(reference: DensityMatrix, tolerances: Tolerances) -> None:
        if not DensityService.is_diagonal(reference, tolerances):
            raise ContractError(
                "Pythagoras reference must be diagonal in the working basis.",
                basis_label=reference.basis_label,
            )

    @staticmethod
    def _bloch_vector(bloch: Sequence[float]) -> Tuple[float, float, float]:
        s = np.asarray(bloch, dtype=float)
        if s.shape != (3,) or not np.all(np.isfinite(s)):
            raise InvariantError("Bloch vector must have three finite components.")
        length = float(np.linalg.norm(s))
        if length > 1.0 + 1e-12:
            raise InvariantError("Bloch vector lies outside the unit ball.", length=length)
        return float(s[0]), float(s[1]), float(s[2])

    @staticmethod
    def _perpendicular(s: np.ndarray) -> np.ndarray:
        length = float(np.linalg.norm(s))
        if length == 0.0:
            return np.array([1.0, 0.0, 0.0])
        unit = s / length
        helper = np.array([0.0, 0.0, 1.0]) if abs(unit[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
        direction = np.cross(unit, helper)
        return direction / np.linalg.norm(direction)
