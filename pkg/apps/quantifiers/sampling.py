"""
Random state samplers for the property suites.

Density matrices come from the Ginibre construction G G^dagger / tr.
"""

from typing import Optional

import numpy as np

from apps.hellinger.types import DensityMatrix, PureState


def random_density_matrix(
    dim: int,
    rng: np.random.Generator,
    real: bool = False,
    rank: Optional[int] = None,
) -> DensityMatrix:
    """
    Sample a density matrix from the Ginibre ensemble.

    Args:
        dim: Hilbert-space dimension
        rng: Seeded numpy generator
        real: Use a real Ginibre matrix (real symmetric result, stored complex)
        rank: Number of Ginibre columns (full rank by default)

    Returns:
        DensityMatrix with unit trace
    """
    columns = rank or dim
    ginibre = rng.standard_normal((dim, columns))
    if not real:
        ginibre = ginibre + 1j * rng.standard_normal((dim, columns))

    rho = ginibre @ ginibre.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho / np.trace(rho).real)


def random_pure_state(dim: int, rng: np.random.Generator) -> PureState:
    """Haar-random pure state."""
    amplitudes = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(amplitudes / np.linalg.norm(amplitudes))


def random_diagonal_state(dim: int, rng: np.random.Generator) -> DensityMatrix:
    """Incoherent state with Dirichlet-distributed populations."""
    return DensityMatrix(np.diag(rng.dirichlet(np.ones(dim))))


def random_bloch_vector(rng: np.random.Generator) -> np.ndarray:
    """Uniform sample from the Bloch ball."""
    direction = rng.standard_normal(3)
    direction /= np.linalg.norm(direction)
    return direction * rng.random() ** (1.0 / 3.0)
