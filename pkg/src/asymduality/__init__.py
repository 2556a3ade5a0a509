"""Asymmetric two-slit interference with a quantum path detector.

Builds the failure-minimizing unambiguous discrimination measurement for the
two detector pointer states, propagates the slit wavepackets to the screen,
extracts fringe metrics, evaluates the distinguishability-visibility duality
relations, and simulates per-quanton detection records.
"""

__version__ = "0.1.0"

from .duality import (
    DualityReport,
    QuantonDetectorState,
    apply_dephasing,
    coherence,
    englert_limit,
    evaluate_config,
    evaluate_duality,
    state_from_config,
)
from .errors import (
    AsymDualityError,
    ConsistencyError,
    ValidationError,
    ZeroProbabilityBranchError,
)
from .fringes import FringeMetrics, ideal_visibility, measure_spacing, measure_visibility
from .model import (
    Case,
    ExperimentConfig,
    PathAmplitudes,
    a_priori_stats,
    classify_case,
    config_from_mapping,
    derive_amplitudes,
    load_config_file,
)
from .montecarlo import GroupStats, SampleBatch, SampleRecord, group_statistics, sample_batch, sample_run
from .optics import (
    Conditioning,
    IntensityPattern,
    Mode,
    PropagationParams,
    default_grid,
    fraunhofer_consistency,
    intensity,
    propagation_params,
    wavepackets_at_screen,
)
from .uqsd import (
    UqsdBasis,
    basis_from_config,
    build_basis,
    distinguishability,
    outcome_probabilities,
    path_observable,
    reconstructed_overlap,
)

__all__ = [
    "AsymDualityError",
    "Case",
    "Conditioning",
    "ConsistencyError",
    "DualityReport",
    "ExperimentConfig",
    "FringeMetrics",
    "GroupStats",
    "IntensityPattern",
    "Mode",
    "PathAmplitudes",
    "PropagationParams",
    "QuantonDetectorState",
    "SampleBatch",
    "SampleRecord",
    "UqsdBasis",
    "ValidationError",
    "ZeroProbabilityBranchError",
    "a_priori_stats",
    "apply_dephasing",
    "basis_from_config",
    "build_basis",
    "classify_case",
    "coherence",
    "config_from_mapping",
    "default_grid",
    "derive_amplitudes",
    "distinguishability",
    "englert_limit",
    "evaluate_config",
    "evaluate_duality",
    "fraunhofer_consistency",
    "group_statistics",
    "ideal_visibility",
    "intensity",
    "load_config_file",
    "measure_spacing",
    "measure_visibility",
    "outcome_probabilities",
    "path_observable",
    "propagation_params",
    "reconstructed_overlap",
    "sample_batch",
    "sample_run",
    "state_from_config",
    "wavepackets_at_screen",
    "__version__",
]
