"""
Seeded property suites.

Every suite draws all of its trial inputs from one numpy generator before
evaluating them on a thread pool, so a seed fixes the report exactly. A
property that raises a CoherenceLabError counts as failed.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from django.conf import settings
from loguru import logger

from apps.hellinger.services import DensityService, SqrtFunction
from apps.hellinger.types import PureState, Tolerances, resolve_tolerances
from apps.infinite.services import InfiniteService
from apps.quantifiers.sampling import (random_bloch_vector,
                                       random_density_matrix,
                                       random_diagonal_state,
                                       random_pure_state)
from apps.quantifiers.services import QuantifierService
from apps.reports.types import VerificationReport, VerifySuite
from apps.states.fock import FockOperators
from apps.states.services import ORACLE_TOL, StateService, number_moments
from apps.utils.constants import (DEFAULT_SEED, DEFAULT_TRIALS,
                                  RANDOM_SUITE_DIMS)
from apps.utils.exceptions import CoherenceLabError, InvariantError

Outcome = Tuple[str, bool, Optional[str]]
MAX_FAILURE_MESSAGES = 20
SUITE_ORDER = [
    VerifySuite.PYTHAGORAS.value,
    VerifySuite.BOUNDS.value,
    VerifySuite.ORACLES.value,
    VerifySuite.INFINITE.value,
]


def _check(name: str, check: Callable[[], bool], detail: str = "") -> Outcome:
    try:
        ok = bool(check())
    except CoherenceLabError as e:
        return name, False, f"{e.default_code}: {e.detail}"
    return name, ok, None if ok else detail or "property does not hold"


def _close(left: float, right: float, tol: float) -> bool:
    return abs(left - right) <= tol * max(1.0, abs(left), abs(right))


def _pythagoras_trial(trial: Dict, tolerances: Tolerances, sqrt_fn: Optional[SqrtFunction]) -> List[Outcome]:
    rho = trial["rho"]
    slack = tolerances.consistency_tol * max(1.0, float(rho.dim))
    mixed = DensityService.maximally_mixed(rho.dim)

    def coherence_forms():
        QuantifierService.coherence_h(rho, tolerances, sqrt_fn, cross_check=True)
        return True

    def nonclassicality_forms():
        QuantifierService.nonclassicality_h(rho, tolerances, sqrt_fn, cross_check=True)
        return True

    def pure_closed_forms():
        psi = trial["psi"]
        pure = QuantifierService.report_pure(psi, tolerances)
        dense = QuantifierService.report(psi.to_density(), tolerances, sqrt_fn)
        return all(
            _close(getattr(pure, key), getattr(dense, key), slack)
            for key in ("c_h", "s_h", "nc_h", "c_hs", "s_hs", "nc_hs")
        )

    return [
        _check(
            "pythagoras_h",
            lambda: QuantifierService.pythagoras_residual_h(rho, mixed, tolerances, sqrt_fn).residual <= slack,
        ),
        _check(
            "pythagoras_h_diagonal_reference",
            lambda: QuantifierService.pythagoras_residual_h(
                rho, trial["reference"], tolerances, sqrt_fn
            ).residual <= slack,
        ),
        _check(
            "pythagoras_hs",
            lambda: QuantifierService.pythagoras_residual_hs(rho, mixed, tolerances).residual <= slack,
        ),
        _check("coherence_forms", coherence_forms),
        _check("nonclassicality_forms", nonclassicality_forms),
        _check(
            "sqrt_purity",
            lambda: _close(
                QuantifierService.sqrt_purity(rho, tolerances, sqrt_fn),
                QuantifierService.l1_coherence(rho) + 1.0,
                slack,
            ),
        ),
        _check("pure_closed_forms", pure_closed_forms),
    ]


def _bounds_trial(trial: Dict, tolerances: Tolerances, sqrt_fn: Optional[SqrtFunction]) -> List[Outcome]:
    rho, psi, bloch = trial["rho"], trial["psi"], trial["bloch"]
    slack = tolerances.consistency_tol * max(1.0, float(rho.dim))

    def report_invariants():
        violations = QuantifierService.report(rho, tolerances, sqrt_fn).invariant_violations(tolerances)
        return not violations

    def pure_duality():
        report = QuantifierService.report_pure(psi, tolerances)
        return not report.invariant_violations(tolerances) and abs(report.duality_gap) <= slack

    def renyi_link():
        report = QuantifierService.report(rho, tolerances, sqrt_fn)
        renyi = QuantifierService.renyi_half(rho.populations, tolerances)
        return _close(report.s_h, QuantifierService.certainty_from_renyi(renyi, rho.dim), slack)

    def qubit_closed_forms():
        closed = QuantifierService.qubit_closed_forms(bloch)
        report = QuantifierService.report(StateService.qubit_from_bloch(bloch), tolerances, sqrt_fn)
        return all(
            _close(getattr(closed, key), getattr(report, key), 1e-12) for key in ("c_h", "s_h", "nc_h")
        )

    def qubit_optimum():
        optimum = QuantifierService.qubit_basis_optimum(StateService.qubit_from_bloch(bloch))
        length = float(np.linalg.norm(bloch))
        return (
            abs(optimum.c_h_max - length) <= 1e-9
            and abs(optimum.nc_h_at_optimum - optimum.c_h_max) <= 1e-9
            and optimum.grid_c_h_max <= optimum.c_h_max + 1e-12
        )

    def phase_state_maximal():
        n = trial["phase_dim"]
        state = StateService.finite_phase_state(n, trial["phases"])
        return _close(QuantifierService.report_pure(state, tolerances).c_h, n - 1.0, slack)

    return [
        _check("report_invariants", report_invariants),
        _check("pure_duality_equality", pure_duality),
        _check("renyi_certainty_link", renyi_link),
        _check("qubit_closed_forms", qubit_closed_forms),
        _check("qubit_basis_optimum", qubit_optimum),
        _check("phase_state_maximal", phase_state_maximal),
    ]


def _oracles_trial(trial: Dict, tolerances: Tolerances, sqrt_fn: Optional[SqrtFunction]) -> List[Outcome]:
    n, m = trial["beam_splitter"]
    R, r = trial["squeezed"]
    alpha, n0 = trial["displaced"]
    modulus = abs(trial["xi"])

    def squeezed_oracle():
        _, diagnostics = StateService.squeezed_coherent_state(R, r, None, tolerances, cross_check=True)
        return diagnostics.oracle_max_deviation <= ORACLE_TOL

    def squeezed_moments():
        psi, _ = StateService.squeezed_coherent_state(R, r, None, tolerances, cross_check=False)
        mean, variance = number_moments(psi.probabilities)
        expected_mean, expected_variance = StateService.squeezed_coherent_moments(R, r)
        return _close(mean, expected_mean, 1e-7) and _close(variance, expected_variance, 1e-7)

    def displaced_oracle():
        _, diagnostics = StateService.displaced_number_state(alpha, n0, None, tolerances, cross_check=True)
        return diagnostics.oracle_max_deviation <= ORACLE_TOL

    def sg_closed_form():
        psi, _ = StateService.sg_phase_state(trial["xi"])
        return _close(
            QuantifierService.report_pure(psi, tolerances).c_h,
            InfiniteService.sg_coherence_closed_form(modulus),
            1e-8,
        )

    def displacement_unitarity():
        operators = FockOperators(40)
        fraction = settings.COHERENCE_LAB["GUARD_BAND_FRACTION"]
        return operators.unitarity_defect(operators.displacement(alpha), fraction) <= 1e-10

    return [
        _check("beam_splitter_oracle", lambda: StateService.beam_splitter_oracle_deviation(n, m) <= 1e-10),
        _check(
            "beam_splitter_normalization",
            lambda: abs(StateService.rotated_number_state(n, m).norm_sq - 1.0) <= 1e-12,
        ),
        _check("squeezed_coherent_oracle", squeezed_oracle),
        _check("squeezed_coherent_moments", squeezed_moments),
        _check("displaced_number_oracle", displaced_oracle),
        _check("sg_closed_form", sg_closed_form),
        _check("displacement_unitarity", displacement_unitarity),
    ]


def _infinite_trial(trial: Dict, tolerances: Tolerances, sqrt_fn: Optional[SqrtFunction]) -> List[Outcome]:
    xi = trial["xi"]
    thermal = trial["thermal_xi"]

    def number_state_limit():
        amplitudes = np.zeros(2 * trial["number"] + 2, dtype=complex)
        amplitudes[trial["number"]] = 1.0
        sweep = InfiniteService.certainty_limit_sweep(PureState(amplitudes), tolerances=tolerances)
        return abs(sweep.nc_h_extrapolated - 2.0) <= 1e-4 and sweep.monotone

    def sg_limit():
        psi, _ = StateService.sg_phase_state(xi)
        sweep = InfiniteService.certainty_limit_sweep(psi, tolerances=tolerances)
        expected = InfiniteService.sg_coherence_closed_form(abs(xi)) + 2.0
        return abs(sweep.nc_h_extrapolated - expected) <= 1e-3

    def pure_thermal_pythagoras():
        psi, _ = StateService.sg_phase_state(xi)
        result = InfiniteService.infinite_pythagoras_residual(psi, thermal, tolerances)
        return all(
            terms.residual <= tolerances.consistency_tol * max(1.0, terms.total)
            for terms in (result.hellinger, result.hilbert_schmidt)
        )

    def mixed_thermal_pythagoras():
        rho = trial["rho"]
        result = InfiniteService.infinite_pythagoras_residual(rho, thermal, tolerances)
        slack = tolerances.consistency_tol * max(1.0, float(rho.dim))
        return result.hellinger.residual <= slack and result.hilbert_schmidt.residual <= slack

    return [
        _check("number_state_limit", number_state_limit),
        _check("sg_limit", sg_limit),
        _check("thermal_pythagoras_pure", pure_thermal_pythagoras),
        _check("thermal_pythagoras_mixed", mixed_thermal_pythagoras),
    ]


def _dimension_trials(trials: int) -> List[Tuple[int, int]]:
    """(dim, k) pairs: every random-state dimension gets the full trial count."""
    return [(dim, k) for dim in RANDOM_SUITE_DIMS for k in range(trials)]


def _pythagoras_inputs(rng: np.random.Generator, trials: int) -> List[Dict]:
    inputs = []
    for dim, k in _dimension_trials(trials):
        inputs.append(
            {
                "dim": dim,
                "rho": random_density_matrix(dim, rng, real=bool(k % 2)),
                "reference": random_diagonal_state(dim, rng),
                "psi": random_pure_state(dim, rng),
            }
        )
    return inputs


def _bounds_inputs(rng: np.random.Generator, trials: int) -> List[Dict]:
    inputs = []
    for dim, k in _dimension_trials(trials):
        phase_dim = int(rng.integers(1, 17))
        inputs.append(
            {
                "dim": dim,
                "rho": random_density_matrix(dim, rng, real=bool(k % 2)),
                "psi": random_pure_state(dim, rng),
                "bloch": tuple(random_bloch_vector(rng)),
                "phase_dim": phase_dim,
                "phases": tuple(rng.uniform(0.0, 2 * math.pi, size=phase_dim)),
            }
        )
    return inputs


def _random_phase(rng: np.random.Generator) -> complex:
    return complex(np.exp(1j * rng.uniform(0.0, 2 * math.pi)))


def _oracles_inputs(rng: np.random.Generator, trials: int) -> List[Dict]:
    inputs = []
    for _ in range(trials):
        inputs.append(
            {
                "beam_splitter": (int(rng.integers(0, 16)), int(rng.integers(0, 16))),
                "squeezed": (float(rng.uniform(0.0, 4.0)), float(rng.uniform(0.0, 1.0))),
                "displaced": (
                    float(rng.uniform(0.0, 3.0)) * _random_phase(rng),
                    int(rng.integers(0, 6)),
                ),
                "xi": float(rng.uniform(0.0, 0.9)) * _random_phase(rng),
            }
        )
    return inputs


def _infinite_inputs(rng: np.random.Generator, trials: int) -> List[Dict]:
    inputs = []
    for dim, _ in _dimension_trials(trials):
        inputs.append(
            {
                "dim": dim,
                "number": int(rng.integers(0, 21)),
                "xi": float(rng.uniform(0.0, 0.9)) * _random_phase(rng),
                "thermal_xi": float(rng.uniform(0.0, 0.999)),
                "rho": random_density_matrix(dim, rng),
            }
        )
    return inputs


SUITES = {
    VerifySuite.PYTHAGORAS.value: (_pythagoras_inputs, _pythagoras_trial),
    VerifySuite.BOUNDS.value: (_bounds_inputs, _bounds_trial),
    VerifySuite.ORACLES.value: (_oracles_inputs, _oracles_trial),
    VerifySuite.INFINITE.value: (_infinite_inputs, _infinite_trial),
}


class VerificationService:
    """Service class for the verify suites."""

    @staticmethod
    def run(
        suite: str = VerifySuite.ALL.value,
        seed: int = DEFAULT_SEED,
        trials: int = DEFAULT_TRIALS,
        sqrt_fn: Optional[SqrtFunction] = None,
        tolerances: Optional[Tolerances] = None,
    ) -> VerificationReport:
        """
        Run one suite, or all of them in a fixed order.

        Args:
            suite: all, pythagoras, bounds, oracles or infinite
            seed: Seed of the input generator; each suite gets its own
                child stream, so a suite alone reproduces its part of "all"
            trials: Trials per dimension for the random-state suites,
                per suite for the oracle suite
            sqrt_fn: Elementwise root for the Hellinger distance forms

        Returns:
            VerificationReport with per-property counters

        Raises:
            InvariantError: If the suite is unknown or trials < 1
        """
        if suite != VerifySuite.ALL.value and suite not in SUITES:
            raise InvariantError(f"Unknown verification suite {suite!r}.", allowed=list(VerifySuite.values))
        if trials < 1:
            raise InvariantError("Verification needs at least one trial.", trials=trials)
        tolerances = resolve_tolerances(tolerances)

        children = np.random.SeedSequence(seed).spawn(len(SUITE_ORDER))
        names = SUITE_ORDER if suite == VerifySuite.ALL.value else [suite]
        report = VerificationReport(suite=suite, seed=seed, trials=trials)

        for name in names:
            part = VerificationService._run_suite(
                name, np.random.default_rng(children[SUITE_ORDER.index(name)]), trials, sqrt_fn, tolerances
            )
            logger.info(f"Suite {name}: {'pass' if part.passed else 'fail'}")
            report.merge(part)

        if suite in (VerifySuite.ALL.value, VerifySuite.INFINITE.value):
            diverging = InfiniteService.convergence_check(
                lambda dim: 6.0 / math.pi**2 / (np.arange(dim) + 1.0) ** 2
            )
            report.record("heavy_tail_diverges", not diverging.converged, "inverse-square tail read as convergent")

        del report.failures[MAX_FAILURE_MESSAGES:]
        return report

    @staticmethod
    def _run_suite(
        name: str,
        rng: np.random.Generator,
        trials: int,
        sqrt_fn: Optional[SqrtFunction],
        tolerances: Tolerances,
    ) -> VerificationReport:
        make_inputs, evaluate = SUITES[name]
        inputs = make_inputs(rng, trials)

        with ThreadPoolExecutor(max_workers=settings.COHERENCE_LAB["THREADS"]) as pool:
            outcomes = list(pool.map(lambda trial: evaluate(trial, tolerances, sqrt_fn), inputs))

        report = VerificationReport(suite=name, seed=0, trials=trials)
        for trial, trial_outcomes in zip(inputs, outcomes):
            if "dim" in trial:
                report.count_dimension(name, trial["dim"])
            for property_name, ok, message in trial_outcomes:
                report.record(property_name, ok, message)
        return report
