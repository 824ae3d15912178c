"""
Independent closed-form constructions used to cross-validate the builders.

Factorial ratios are taken in the log-gamma domain; signs are tracked
separately so no intermediate overflows.
"""

import math
from typing import List

import numpy as np
from scipy.special import eval_genlaguerre, gammaln

from apps.utils.exceptions import InvariantError


def binomial_expansion(n: int, m: int) -> List[int]:
    """
    Integer coefficients of (x + y)^n (x - y)^m.

    Entry j is the coefficient of x^j y^(n + m - j).
    """
    coefficients = [1]
    for sign, power in ((1, n), (-1, m)):
        for _ in range(power):
            shifted = [0] + coefficients
            scaled = [sign * value for value in coefficients] + [0]
            coefficients = [left + right for left, right in zip(shifted, scaled)]
    return coefficients


def beam_splitter_oracle(n: int, m: int) -> np.ndarray:
    """
    Output amplitudes of |n>|m> after a 50/50 beam splitter, read off the
    expansion of (a1_dag + a2_dag)^n (a1_dag - a2_dag)^m |0, 0>.
    """
    total = n + m
    amplitudes = np.zeros(total + 1)
    for j, coefficient in enumerate(binomial_expansion(n, m)):
        if coefficient == 0:
            continue
        log_norm = 0.5 * (
            gammaln(j + 1) + gammaln(total - j + 1)
            - gammaln(n + 1) - gammaln(m + 1) - total * math.log(2.0)
        )
        amplitudes[j] = math.copysign(math.exp(log_norm + math.log(abs(coefficient))), coefficient)
    return amplitudes


def squeezed_coherent_amplitudes(R: float, r: float, dim: int) -> np.ndarray:
    """
    Fock amplitudes of D(R) S(r)^dagger |0> from the Hermite-polynomial
    three-term recurrence.

    psi_{n+1} = (beta psi_n - tau sqrt(n) psi_{n-1}) / sqrt(n + 1) with
    tau = -tanh r and beta = R - R tanh r. The recurrence runs on rescaled
    values and the log scale is restored at the end.
    """
    alpha = complex(R)
    tau = -math.tanh(r)
    beta = alpha + np.conj(alpha) * tau
    log_psi0 = -0.5 * abs(alpha) ** 2 - 0.5 * (np.conj(alpha) ** 2 * tau).real - 0.5 * math.log(
        math.cosh(r)
    )

    values = np.zeros(dim, dtype=complex)
    log_scale = np.zeros(dim)
    values[0] = 1.0
    previous, current = 0.0 + 0.0j, 1.0 + 0.0j
    scale = 0.0
    for n in range(dim - 1):
        following = (beta * current - tau * math.sqrt(n) * previous) / math.sqrt(n + 1)
        previous, current = current, following
        magnitude = abs(current)
        if magnitude > 1e100:
            previous /= magnitude
            current /= magnitude
            scale += math.log(magnitude)
        values[n + 1] = current
        log_scale[n + 1] = scale

    return _restore(values, log_scale + log_psi0)


def displaced_number_amplitudes(alpha: complex, n0: int, dim: int) -> np.ndarray:
    """
    Fock amplitudes <m|D(alpha)|n0> from associated Laguerre polynomials.

    For m >= n0: sqrt(n0!/m!) alpha^(m-n0) e^(-|alpha|^2/2) L_n0^(m-n0)(|alpha|^2);
    for m < n0 the roles swap and alpha becomes -conj(alpha).
    """
    if n0 < 0:
        raise InvariantError("Number-state label must be nonnegative.", n0=n0)

    amplitudes = np.zeros(dim, dtype=complex)
    if alpha == 0:
        if n0 < dim:
            amplitudes[n0] = 1.0
        return amplitudes

    x = abs(alpha) ** 2
    log_modulus = math.log(abs(alpha))
    for level in range(dim):
        low, high = min(level, n0), max(level, n0)
        base = alpha if level >= n0 else -np.conj(alpha)
        phase = np.exp(1j * (high - low) * np.angle(base))
        laguerre = float(eval_genlaguerre(low, high - low, x))
        if laguerre == 0.0:
            continue
        log_value = (
            0.5 * (gammaln(low + 1) - gammaln(high + 1))
            + (high - low) * log_modulus
            - 0.5 * x
            + math.log(abs(laguerre))
        )
        amplitudes[level] = math.copysign(1.0, laguerre) * math.exp(log_value) * phase
    return amplitudes


def _restore(values: np.ndarray, log_scale: np.ndarray) -> np.ndarray:
    restored = np.zeros_like(values)
    nonzero = values != 0
    restored[nonzero] = np.exp(
        np.log(np.abs(values[nonzero])) + log_scale[nonzero] + 1j * np.angle(values[nonzero])
    )
    return restored
