"""
Constants used throughout the application.
"""

LIBRARY_NAME = "coherence-lab"
LIBRARY_VERSION = "1.0.0"

EXIT_CODES = {
    "SUCCESS": 0,
    "USAGE": 1,
    "VALIDATION": 2,
    "NUMERICAL": 3,
    "VERIFICATION": 4,
}

STATE_VARIANTS = {
    "QUBIT_BLOCH": "QubitBloch",
    "FINITE_PHASE": "FinitePhase",
    "ROTATED_NUMBER": "RotatedNumber",
    "SG_PHASE": "SGPhase",
    "TMSV": "TMSV",
    "SQUEEZED_COHERENT": "SqueezedCoherent",
    "DISPLACED_NUMBER": "DisplacedNumber",
}

FIGURE_IDS = {
    "FIG2": "fig2",
    "FIG3": "fig3",
    "FIG4": "fig4",
    "FIG5": "fig5",
    "FIG6": "fig6",
    "FIG7": "fig7",
}

VERIFY_SUITES = {
    "ALL": "all",
    "PYTHAGORAS": "pythagoras",
    "BOUNDS": "bounds",
    "ORACLES": "oracles",
    "INFINITE": "infinite",
}

OUTPUT_FORMATS = {
    "CSV": "csv",
    "JSON": "json",
}

BASIS_LABELS = {
    "COMPUTATIONAL": "computational",
    "SIGMA_Z": "sigma_z",
    "FOCK": "fock",
    "TWIN_LADDER": "twin_ladder",
    "BEAM_SPLITTER_OUTPUT": "beam_splitter_output",
}

SQRT_PREFACTORS = {
    "PRINTED": "printed",
    "UNIT": "unit",
}

CSV_FLOAT_FORMAT = "%.17g"
CSV_COMMENT_PREFIX = "# "
INVALID_REASON_COLUMN = "reason"

DEFAULT_SEED = 20200101
DEFAULT_TRIALS = 1000
RANDOM_SUITE_DIMS = (2, 3, 4, 8, 16)

QUBIT_ROTATION_GRID = (360, 180)

ASSUMPTIONS = {
    "DISPLACEMENT": "R is the real coherent amplitude, mean photons from displacement are R**2",
    "SQUEEZING": "squeezed coherent states are D(R) S(r)^dagger |0>, phase-squeezed for real R",
    "BEAM_SPLITTER_PHASE": "c_j omits the per-level sign (-1)**(m - j) of the binomial expansion",
}
