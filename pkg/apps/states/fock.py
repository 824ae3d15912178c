"""
Truncated single-mode Fock-space operators.
"""

import math
from functools import lru_cache

import numpy as np
from scipy import sparse
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply

from apps.utils.exceptions import InvariantError


@lru_cache(maxsize=32)
def _ladder(dim: int) -> sparse.csr_matrix:
    return sparse.diags(
        np.sqrt(np.arange(1, dim, dtype=float)),
        offsets=1,
        shape=(dim, dim),
        format="csr",
        dtype=complex,
    )


class FockOperators:
    """
    Ladder operator and Gaussian unitaries on the span of |0>, ..., |dim-1>.

    Dense exponentials are for inspection and unitarity checks; states are
    built with apply_displacement / apply_squeeze, which never form the
    dense matrix.
    """

    def __init__(self, dim: int):
        if dim < 2:
            raise InvariantError("Fock truncation needs at least two levels.", dim=dim)
        self.dim = dim
        self.a = _ladder(dim)
        self.a_dag = self.a.conj().T.tocsr()

    @property
    def annihilation(self) -> np.ndarray:
        return self.a.toarray()

    def displacement_generator(self, alpha: complex) -> sparse.csr_matrix:
        return (alpha * self.a_dag - np.conj(alpha) * self.a).tocsr()

    def squeeze_generator(self, r: float) -> sparse.csr_matrix:
        """Generator of S(r) = exp(r (a^2 - a_dag^2) / 2)."""
        return (0.5 * r * (self.a @ self.a - self.a_dag @ self.a_dag)).tocsr()

    def displacement(self, alpha: complex) -> np.ndarray:
        return expm(self.displacement_generator(alpha).toarray())

    def squeeze(self, r: float) -> np.ndarray:
        return expm(self.squeeze_generator(r).toarray())

    def apply_displacement(self, alpha: complex, vector: np.ndarray) -> np.ndarray:
        if alpha == 0:
            return np.array(vector, dtype=complex)
        return expm_multiply(self.displacement_generator(alpha), np.asarray(vector, dtype=complex))

    def apply_squeeze(self, r: float, vector: np.ndarray) -> np.ndarray:
        if r == 0:
            return np.array(vector, dtype=complex)
        return expm_multiply(self.squeeze_generator(r), np.asarray(vector, dtype=complex))

    def basis_state(self, n: int) -> np.ndarray:
        if not 0 <= n < self.dim:
            raise InvariantError("Fock level outside the truncation.", n=n, dim=self.dim)
        vector = np.zeros(self.dim, dtype=complex)
        vector[n] = 1.0
        return vector

    def guard_band(self, fraction: float) -> int:
        """Number of top levels treated as the guard band."""
        return max(1, math.ceil(fraction * self.dim))

    def unitarity_defect(self, unitary: np.ndarray, fraction: float) -> float:
        """Largest deviation of U^dagger U from I on the levels below the guard band."""
        kept = self.dim - self.guard_band(fraction)
        block = unitary[:, :kept]
        gram = block.conj().T @ block
        return float(np.max(np.abs(gram - np.eye(kept))))
