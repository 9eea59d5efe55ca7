"""Diagnostics on states and trajectories."""

from .convergence import (
    CRITICAL,
    SUBCRITICAL,
    SUPERCRITICAL,
    LimitPrediction,
    classify_regime,
    decreasing_from,
    plateau_reached,
    predict_limit,
    refinement_table,
)
from .envelope import (
    BoundReport,
    BoundViolation,
    EnvelopeError,
    TailEnvelope,
    build_tail_envelope,
    check_tail_bound,
    envelope_from_state,
    premise_holds,
    premise_onset,
    search_tail_constant,
)
from .identities import (
    FluxIdentity,
    IdentityRangeError,
    ab_coefficients,
    ab_ratio,
    tail_flux_identity,
    weighted_rate,
)
from .tails import (
    DiagnosticsRecord,
    DiagnosticsSettings,
    ShapeMismatchError,
    diagnose,
    head_distance,
    make_observer,
    moment,
    strong_distance,
    tail_mass,
    tail_masses,
)

__all__ = [
    "BoundReport",
    "BoundViolation",
    "CRITICAL",
    "DiagnosticsRecord",
    "DiagnosticsSettings",
    "EnvelopeError",
    "FluxIdentity",
    "IdentityRangeError",
    "LimitPrediction",
    "SUBCRITICAL",
    "SUPERCRITICAL",
    "ShapeMismatchError",
    "TailEnvelope",
    "ab_coefficients",
    "ab_ratio",
    "build_tail_envelope",
    "check_tail_bound",
    "classify_regime",
    "decreasing_from",
    "diagnose",
    "envelope_from_state",
    "head_distance",
    "make_observer",
    "moment",
    "plateau_reached",
    "predict_limit",
    "premise_holds",
    "premise_onset",
    "refinement_table",
    "search_tail_constant",
    "strong_distance",
    "tail_flux_identity",
    "tail_mass",
    "tail_masses",
    "weighted_rate",
]
