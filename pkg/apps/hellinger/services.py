"""
Density-matrix services: validation, the elementwise square root and the
two distances every quantifier is built from.
"""

from typing import Callable, Optional, Sequence, Union

import numpy as np
from loguru import logger

from apps.hellinger.types import (DensityDiagnostics, DensityMatrix,
                                  InvariantViolation, SqrtMatrix, Tolerances,
                                  resolve_tolerances)
from apps.utils.constants import BASIS_LABELS
from apps.utils.exceptions import (ConsistencyError, InvalidDensityMatrixError,
                                   InvariantError, StructuralError)

SqrtFunction = Callable[[DensityMatrix], SqrtMatrix]


class DensityService:
    """Service class for density-matrix construction and distances."""

    @staticmethod
    def validate_density(
        entries,
        tolerances: Optional[Tolerances] = None,
        basis_label: str = BASIS_LABELS["COMPUTATIONAL"],
    ) -> Union[DensityMatrix, DensityDiagnostics]:
        """
        Check the three density-matrix invariants.

        Tiny negative eigenvalues within psd_tol are accepted as they are;
        the matrix is never projected.

        Args:
            entries: Square complex matrix
            tolerances: Validation tolerances (defaults from settings)
            basis_label: Name of the reference basis

        Returns:
            DensityMatrix when every invariant holds, otherwise diagnostics
            naming each violated invariant and its magnitude

        Raises:
            StructuralError: If the input is not a non-empty square matrix
        """
        tolerances = resolve_tolerances(tolerances)
        matrix = np.asarray(entries, dtype=complex)

        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
            raise StructuralError(
                "Density matrix must be a non-empty square matrix.",
                shape=list(matrix.shape),
            )

        violations = []

        hermiticity = float(np.max(np.abs(matrix - matrix.conj().T)))
        if hermiticity > tolerances.herm_tol:
            violations.append(
                InvariantViolation("hermitian", hermiticity, tolerances.herm_tol)
            )

        trace_defect = float(abs(np.trace(matrix) - 1.0))
        if trace_defect > tolerances.trace_tol:
            violations.append(
                InvariantViolation("unit_trace", trace_defect, tolerances.trace_tol)
            )

        hermitian_part = 0.5 * (matrix + matrix.conj().T)
        smallest = float(np.linalg.eigvalsh(hermitian_part)[0])
        if smallest < -tolerances.psd_tol:
            violations.append(
                InvariantViolation("positive_semidefinite", -smallest, tolerances.psd_tol)
            )

        if violations:
            logger.debug(
                f"Rejected {matrix.shape[0]}x{matrix.shape[0]} matrix: "
                f"{[violation.invariant for violation in violations]}"
            )
            return DensityDiagnostics(dim=matrix.shape[0], violations=violations)

        return DensityMatrix(matrix, basis_label)

    @staticmethod
    def require_density(
        entries,
        tolerances: Optional[Tolerances] = None,
        basis_label: str = BASIS_LABELS["COMPUTATIONAL"],
    ) -> DensityMatrix:
        """
        Validate a matrix and raise instead of returning diagnostics.

        Raises:
            InvalidDensityMatrixError: If any invariant is violated
        """
        result = DensityService.validate_density(entries, tolerances, basis_label)
        if isinstance(result, DensityDiagnostics):
            raise InvalidDensityMatrixError(
                f"Invalid density matrix: {', '.join(result.violated)}.",
                **result.as_dict(),
            )
        return result

    @staticmethod
    def hermitian_elementwise_sqrt(
        rho: DensityMatrix, tolerances: Optional[Tolerances] = None
    ) -> SqrtMatrix:
        """
        Elementwise square root with a Hermitian-consistent branch.

        Diagonal: real nonnegative root. Upper triangle: principal complex
        root. Lower triangle: conjugate mirror of the upper triangle, so that
        s_ij * s_ji = |rho_ij| for every pair.

        Args:
            rho: Valid density matrix
            tolerances: Tolerances for the diagonal sign check

        Returns:
            SqrtMatrix with tr(S @ S) = 1 + sum_{j != k} |rho_jk|

        Raises:
            InvariantError: If a diagonal entry is negative beyond psd_tol
        """
        tolerances = resolve_tolerances(tolerances)
        matrix = rho.entries
        diagonal = matrix.diagonal().real

        if np.any(diagonal < -tolerances.psd_tol):
            raise InvariantError(
                "Negative diagonal entry in elementwise square root.",
                smallest=float(diagonal.min()),
            )

        root = np.zeros_like(matrix)
        np.fill_diagonal(root, np.sqrt(np.clip(diagonal, 0.0, None)))

        upper = np.triu_indices(rho.dim, k=1)
        entries = np.empty_like(matrix[upper])
        entries.real = matrix[upper].real
        # -0.0 imaginary parts would pick the lower branch on the negative axis
        entries.imag = matrix[upper].imag + 0.0
        root[upper] = np.sqrt(entries)
        root[upper[1], upper[0]] = np.conj(root[upper])

        return SqrtMatrix(root)

    @staticmethod
    def trace_of_product(left: np.ndarray, right: np.ndarray) -> complex:
        """tr(left @ right) without forming the product."""
        return complex(np.sum(left * right.T))

    @staticmethod
    def hellinger_distance_sq(
        a: DensityMatrix,
        b: DensityMatrix,
        tolerances: Optional[Tolerances] = None,
        sqrt_fn: Optional[SqrtFunction] = None,
    ) -> float:
        """
        Squared Hellinger-like distance tr[(sqrt(a) - sqrt(b))^2].

        Args:
            a: First density matrix
            b: Second density matrix
            tolerances: Imaginary-residue tolerance
            sqrt_fn: Elementwise root to use (Hermitian-consistent by default)

        Returns:
            Nonnegative real distance squared

        Raises:
            StructuralError: On dimension or basis mismatch
            ConsistencyError: If the trace has an imaginary part above imag_tol
        """
        tolerances = resolve_tolerances(tolerances)
        DensityService._check_compatible(a, b)
        root = sqrt_fn or (
            lambda rho: DensityService.hermitian_elementwise_sqrt(rho, tolerances)
        )

        difference = root(a).entries - root(b).entries
        return DensityService._real_trace(
            DensityService.trace_of_product(difference, difference), tolerances
        )

    @staticmethod
    def hilbert_schmidt_distance_sq(
        a: DensityMatrix, b: DensityMatrix, tolerances: Optional[Tolerances] = None
    ) -> float:
        """
        Squared Hilbert-Schmidt distance tr[(a - b)^2].

        Raises:
            StructuralError: On dimension or basis mismatch
            ConsistencyError: If the trace has an imaginary part above imag_tol
        """
        tolerances = resolve_tolerances(tolerances)
        DensityService._check_compatible(a, b)

        difference = a.entries - b.entries
        return DensityService._real_trace(
            DensityService.trace_of_product(difference, difference), tolerances
        )

    @staticmethod
    def diagonal_part(rho: DensityMatrix) -> DensityMatrix:
        """Closest incoherent state: rho with its off-diagonal entries zeroed."""
        return DensityMatrix(np.diag(rho.entries.diagonal().real), rho.basis_label)

    @staticmethod
    def maximally_mixed(
        dim: int, basis_label: str = BASIS_LABELS["COMPUTATIONAL"]
    ) -> DensityMatrix:
        """
        The maximally mixed state I/N.

        Raises:
            InvariantError: If dim < 1
        """
        if dim < 1:
            raise InvariantError("Dimension must be a positive integer.", dim=dim)
        return DensityMatrix(np.eye(dim) / dim, basis_label)

    @staticmethod
    def diagonal_state(
        probabilities: Sequence[float],
        basis_label: str = BASIS_LABELS["COMPUTATIONAL"],
        tolerances: Optional[Tolerances] = None,
    ) -> DensityMatrix:
        """
        Incoherent state with the given populations.

        Raises:
            InvariantError: If the populations are not a probability vector
        """
        tolerances = resolve_tolerances(tolerances)
        p = DensityService.probability_vector(probabilities, tolerances)
        return DensityMatrix(np.diag(p), basis_label)

    @staticmethod
    def probability_vector(
        probabilities: Sequence[float], tolerances: Optional[Tolerances] = None
    ) -> np.ndarray:
        """
        Validate a probability vector and clip round-off negatives.

        Raises:
            InvariantError: If entries are negative or the sum is not 1
        """
        tolerances = resolve_tolerances(tolerances)
        p = np.asarray(probabilities, dtype=float)

        if p.ndim != 1 or p.size == 0:
            raise InvariantError("Probability vector must be one-dimensional and non-empty.")
        if np.any(p < -tolerances.norm_tol):
            raise InvariantError(
                "Probability vector has negative entries.", smallest=float(p.min())
            )
        total = float(np.sum(p))
        if abs(total - 1.0) > tolerances.norm_tol:
            raise InvariantError("Probability vector is not normalized.", total=total)

        return np.clip(p, 0.0, None)

    @staticmethod
    def is_diagonal(rho: DensityMatrix, tolerances: Optional[Tolerances] = None) -> bool:
        tolerances = resolve_tolerances(tolerances)
        off_diagonal = rho.entries - np.diag(rho.entries.diagonal())
        return bool(np.max(np.abs(off_diagonal), initial=0.0) <= tolerances.herm_tol)

    @staticmethod
    def _check_compatible(a: DensityMatrix, b: DensityMatrix) -> None:
        if a.dim != b.dim:
            raise StructuralError(
                "Density matrices have different dimensions.", dims=[a.dim, b.dim]
            )
        if a.basis_label != b.basis_label:
            raise StructuralError(
                "Density matrices are expressed in different bases.",
                basis_labels=[a.basis_label, b.basis_label],
            )

    @staticmethod
    def _real_trace(value: complex, tolerances: Tolerances) -> float:
        if abs(value.imag) > tolerances.imag_tol:
            raise ConsistencyError(
                "Distance has a non-negligible imaginary part.", imaginary=value.imag
            )
        return max(value.real, 0.0)
