"""Angle-dependent CHSH bounds for two qubits, for all states and for separable states."""

from .bell import (
    AnglePair,
    BellSetting,
    Observable,
    ProductStateParams,
    TwoQubitState,
    canonical_setting,
    commutator_observable,
    optimal_entangled_state,
    partial_traces,
    product_state,
)
from .bounds import (
    BoundMethod,
    BoundResult,
    NotAnticommuting,
    bound_general,
    bound_general_equal,
    bound_roy,
    bound_separable,
    bound_separable_equal,
    quadratic_separability_gap,
    separability_rhs_anticommuting,
    tsirelson_rhs,
    violation_factor,
    violation_factor_chsh,
)
from .oracle import OracleConfig, phase_only_max, random_state_sampler, separable_max, spectral_max
from .witness import AngleKnowledge, Conclusion, CorrelationData, UnphysicalInput, Verdict, detection_region, evaluate, robust_separable_bound

__version__ = "0.1.0"
