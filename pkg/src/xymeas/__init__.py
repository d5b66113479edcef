"""Joint X/Y qubit measurement simulation and error-statistics toolkit.

Simulates four-outcome joint measurements of the non-commuting qubit
observables X and Y on eigenstate and entangled-pair inputs, estimates the
measurement resolutions and the correlation between the two errors (which
quantum mechanics forces to be imaginary, ``c^2 = -vz^2``), and
reconstructs Kirkwood-Dirac quasi-probabilities from measured outcome
tables.
"""

from .analysis import (
    CLASSICAL_SIGMA,
    CorrelationEstimate,
    ErrorModel,
    Estimate,
    VisibilityEstimate,
    classicality_statistic,
    collapse_pair_counts,
    correct_for_source_noise,
    csquared_from_patterns,
    eigenstate_probs_from_error_model,
    error_model_from_visibilities,
    estimate_vx,
    estimate_vy,
    pattern_of,
    predicted_pattern_probs,
    visibilities_from_error_model,
    vsquared_from_patterns,
)
from .kirkwood import (
    KDDistribution,
    PairKDDistribution,
    SingularInversionError,
    forward_map,
    kd_from_state,
    kd_pair_from_state,
    random_qubit_density,
    reconstruct_kd,
    verify_operator_identities,
)
from .povm import (
    OUTCOMES4,
    OUTCOMES16,
    PATTERNS,
    JointPovm,
    PatternStats,
    PositivityError,
    VisibilityTriple,
    build_povm,
    exact_pattern_probs,
    ideal_operator,
    outcome_probs,
    pair_outcome_probs,
)
from .qubit import (
    ATOL_ALGEBRA,
    ATOL_EIG,
    density,
    eigenstate,
    identity,
    min_eigenvalue_hermitian,
    pauli,
    singlet,
    tensor,
    tensor_state,
    trace_product,
)
from .simulate import (
    BLOCK_SHOTS,
    RNG_ID,
    ExperimentConfig,
    OutcomeCounts4,
    PairCounts16,
    block_rng,
    run_eigenstate_experiment,
    run_pair_experiment,
    sample_categorical,
    werner_state,
)

__version__ = "0.1.0"
