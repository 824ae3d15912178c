"""
Phase-averaged reference states over the overcomplete phase basis

    |phi> = N^(-1/2) sum_{j=1..N} e^(i j phi) |j>.

Phase integrals run on a uniform M-node grid over [0, 2 pi). The rule is
exact for rho_d, whose integrand is a trigonometric polynomial; the
continuous square root integrates sqrt(<phi|rho|phi>) and is refined by
node doubling.
"""

import math
from typing import Callable, Optional, Tuple

import numpy as np
from django.conf import settings
from loguru import logger

from apps.hellinger.services import DensityService
from apps.hellinger.types import DensityMatrix, Tolerances, resolve_tolerances
from apps.overcomplete.types import (ContinuousCoherence, ContinuousSqrt,
                                     OrthogonalityReport, PhaseBasisConfig,
                                     PhasePythagoras, PhaseRhoD,
                                     SqrtPrefactor)
from apps.utils.exceptions import (InvariantError, QuadratureError,
                                   StructuralError)


class PhaseBasisService:
    """Service class for the overcomplete phase basis."""

    @staticmethod
    def resolve_config(config: PhaseBasisConfig) -> PhaseBasisConfig:
        """
        Fill in the default node count and validate the configuration.

        Raises:
            InvariantError: If N < 1, M < 4N or the prefactor is unknown
        """
        if config.n < 1:
            raise InvariantError("Phase basis needs N >= 1.", N=config.n)
        nodes = config.quadrature_nodes
        if nodes is None:
            nodes = settings.COHERENCE_LAB["QUADRATURE_NODES_PER_DIM"] * config.n
        if nodes < 4 * config.n:
            raise InvariantError(
                "Quadrature needs at least 4N nodes.", N=config.n, quadrature_nodes=nodes
            )
        if config.prefactor not in SqrtPrefactor.values:
            raise InvariantError(
                "Unknown square-root prefactor.",
                prefactor=config.prefactor,
                allowed=list(SqrtPrefactor.values),
            )
        return PhaseBasisConfig(n=config.n, quadrature_nodes=nodes, prefactor=config.prefactor)

    @staticmethod
    def phase_overlap(phi: float, phi_prime: float, n: int) -> complex:
        """<phi'|phi> = (1/N) sum_{j=1..N} e^(i j (phi - phi'))."""
        j = np.arange(1, n + 1)
        return complex(np.mean(np.exp(1j * j * (phi - phi_prime))))

    @staticmethod
    def phase_vectors(n: int, nodes: int) -> np.ndarray:
        """Rows are the phase states at phi_m = 2 pi m / M."""
        phis = 2.0 * math.pi * np.arange(nodes) / nodes
        return np.exp(1j * np.outer(phis, np.arange(1, n + 1))) / math.sqrt(n)

    @staticmethod
    def phase_weights(rho: DensityMatrix, vectors: np.ndarray) -> np.ndarray:
        """<phi_m|rho|phi_m> at every node, clipped at zero."""
        weights = np.einsum("mk,kl,ml->m", vectors.conj(), rho.entries, vectors).real
        return np.clip(weights, 0.0, None)

    @staticmethod
    def phase_rho_d(rho: DensityMatrix, config: PhaseBasisConfig) -> PhaseRhoD:
        """
        rho_d = (N / 2 pi) int dphi <phi|rho|phi> |phi><phi|.

        In the number basis this averages each diagonal of rho, so rho_d is a
        Toeplitz matrix; generically it is not diagonal.

        Raises:
            StructuralError: If rho does not have dimension N
        """
        config = PhaseBasisService._check(rho, config)
        matrix = PhaseBasisService._rho_d_matrix(rho, config.n, config.quadrature_nodes)
        off_diagonal = matrix - np.diag(matrix.diagonal())
        return PhaseRhoD(
            matrix=matrix,
            off_diagonal_mass=float(np.sum(np.abs(off_diagonal))),
            nodes=config.quadrature_nodes,
        )

    @staticmethod
    def continuous_sqrt(rho: DensityMatrix, config: PhaseBasisConfig) -> ContinuousSqrt:
        """
        Continuous square root c int dphi sqrt(<phi|rho|phi>) |phi><phi| of rho_d.

        c is sqrt(N / 2 pi) for the printed prefactor and N / 2 pi for the
        unit one; only the latter squares back to I/N for uniform weights.
        """
        config = PhaseBasisService._check(rho, config)
        matrix = PhaseBasisService._sqrt_matrix(rho, config, config.quadrature_nodes)
        rho_d = PhaseBasisService._rho_d_matrix(rho, config.n, config.quadrature_nodes)
        return ContinuousSqrt(
            matrix=matrix,
            prefactor=str(config.prefactor),
            square_defect=float(np.linalg.norm(matrix @ matrix - rho_d)),
            nodes=config.quadrature_nodes,
        )

    @staticmethod
    def phase_pythagoras_residual(
        rho: DensityMatrix, config: PhaseBasisConfig, tolerances: Optional[Tolerances] = None
    ) -> PhasePythagoras:
        """Pythagoras split of d(rho, I/N) through the phase-averaged state."""
        config = PhaseBasisService._check(rho, config)
        terms, _ = PhaseBasisService._terms(rho, config, config.quadrature_nodes, tolerances)
        return terms

    @staticmethod
    def continuous_basis_coherence(
        rho: DensityMatrix, config: PhaseBasisConfig, tolerances: Optional[Tolerances] = None
    ) -> ContinuousCoherence:
        """tr(sqrt(rho)^2) - 1 against tr[(sqrt(rho) - sqrt(rho_d))^2]."""
        config = PhaseBasisService._check(rho, config)
        _, coherence = PhaseBasisService._terms(rho, config, config.quadrature_nodes, tolerances)
        return coherence

    @staticmethod
    def orthogonality_violation(
        rho: DensityMatrix, config: PhaseBasisConfig, tolerances: Optional[Tolerances] = None
    ) -> OrthogonalityReport:
        """
        |tr[(sqrt(rho) - sqrt(rho_d))(sqrt(rho_d) - I/sqrt(N))]| with node doubling.

        Args:
            rho: Valid density matrix of dimension N
            config: Phase basis; its node count is the starting grid

        Returns:
            OrthogonalityReport at the first node count whose cross term
            changed by at most QUADRATURE_STABILITY_TOL under doubling

        Raises:
            QuadratureError: If no doubling within QUADRATURE_MAX_DOUBLINGS
                stabilises the cross term
        """
        config = PhaseBasisService._check(rho, config)
        tolerances = resolve_tolerances(tolerances)

        def evaluate(nodes: int):
            return PhaseBasisService._terms(rho, config, nodes, tolerances)

        (terms, coherence), nodes, doublings, change = PhaseBasisService._refine(
            evaluate, config.quadrature_nodes, lambda result: result[0].cross_term
        )
        root = PhaseBasisService._sqrt_matrix(rho, config, nodes)
        rho_d = PhaseBasisService.phase_rho_d(
            rho, PhaseBasisConfig(config.n, nodes, config.prefactor)
        )

        report = OrthogonalityReport(
            violation=abs(terms.cross_term),
            cross_term=terms.cross_term,
            nodes=nodes,
            doublings=doublings,
            stability=change,
            prefactor=str(config.prefactor),
            square_defect=float(np.linalg.norm(root @ root - rho_d.matrix)),
            off_diagonal_mass=rho_d.off_diagonal_mass,
            pythagoras=terms,
            coherence=coherence,
        )
        logger.info(
            f"Phase-basis cross term {terms.cross_term:.10g} at {nodes} nodes ({config.prefactor} prefactor)"
        )
        return report

    @staticmethod
    def _check(rho: DensityMatrix, config: PhaseBasisConfig) -> PhaseBasisConfig:
        config = PhaseBasisService.resolve_config(config)
        if rho.dim != config.n:
            raise StructuralError(
                "Density matrix dimension does not match the phase basis.",
                dim=rho.dim,
                N=config.n,
            )
        return config

    @staticmethod
    def _rho_d_matrix(rho: DensityMatrix, n: int, nodes: int) -> np.ndarray:
        vectors = PhaseBasisService.phase_vectors(n, nodes)
        weights = PhaseBasisService.phase_weights(rho, vectors)
        # (N / 2 pi) * (2 pi / M) sum_m w_m |phi_m><phi_m|
        return (n / nodes) * (vectors.T * weights) @ vectors.conj()

    @staticmethod
    def _sqrt_matrix(rho: DensityMatrix, config: PhaseBasisConfig, nodes: int) -> np.ndarray:
        vectors = PhaseBasisService.phase_vectors(config.n, nodes)
        roots = np.sqrt(PhaseBasisService.phase_weights(rho, vectors))
        if config.prefactor == SqrtPrefactor.UNIT:
            scale = config.n / (2.0 * math.pi)
        else:
            scale = math.sqrt(config.n / (2.0 * math.pi))
        return scale * (2.0 * math.pi / nodes) * (vectors.T * roots) @ vectors.conj()

    @staticmethod
    def _terms(
        rho: DensityMatrix,
        config: PhaseBasisConfig,
        nodes: int,
        tolerances: Optional[Tolerances],
    ) -> Tuple[PhasePythagoras, ContinuousCoherence]:
        root = DensityService.hermitian_elementwise_sqrt(rho, tolerances).entries
        root_d = PhaseBasisService._sqrt_matrix(rho, config, nodes)
        reference = np.eye(config.n) / math.sqrt(config.n)

        def trace(left, right):
            return DensityService.trace_of_product(left, right).real

        total = trace(root - reference, root - reference)
        coherence = trace(root - root_d, root - root_d)
        certainty = trace(root_d - reference, root_d - reference)
        cross = trace(root - root_d, root_d - reference)
        sqrt_purity_form = trace(root, root) - 1.0

        return (
            PhasePythagoras(
                total=total,
                coherence=coherence,
                certainty=certainty,
                cross_term=cross,
                residual=abs(total - coherence - certainty),
            ),
            ContinuousCoherence(
                sqrt_purity_form=sqrt_purity_form,
                distance_form=coherence,
                mismatch=abs(sqrt_purity_form - coherence),
            ),
        )

    @staticmethod
    def _refine(evaluate: Callable[[int], object], nodes: int, value: Callable[[object], float]):
        config = settings.COHERENCE_LAB
        tol = config["QUADRATURE_STABILITY_TOL"]
        coarse = evaluate(nodes)
        change = math.inf
        for doubling in range(1, config["QUADRATURE_MAX_DOUBLINGS"] + 1):
            fine = evaluate(2 * nodes)
            change = abs(value(fine) - value(coarse))
            logger.debug(f"Quadrature {nodes} -> {2 * nodes} nodes: change {change:.3g}")
            nodes *= 2
            if change <= tol:
                return fine, nodes, doubling, change
            coarse = fine
        raise QuadratureError(nodes=nodes, change=change, tolerance=tol)
