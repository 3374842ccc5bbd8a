"""Spin-model consistent-histories simulator.

Thin wrapper over the compiled core: model construction, state evolution,
Schmidt projections, closed-form decoherence elements, and the selection
algorithms, with numpy arrays at the boundary.
"""

from ._qhist import (
    ConfigError,
    DegeneracyError,
    ExtendabilityReport,
    ILCandidate,
    ILResult,
    MonteCarloReport,
    PairRecord,
    SelectionResult,
    SpinModelConfig,
    VerifyError,
    check_nonextendable,
    classify_pairs,
    closed_form_information,
    decoherence,
    evolve,
    f_info,
    min_entropy_select,
    montecarlo,
    offdiag,
    offdiag_cases,
    probabilities,
    random_config,
    schmidt_axis,
    schmidt_weights,
    select,
    set_information,
    theta,
)

__all__ = [
    "ConfigError",
    "DegeneracyError",
    "ExtendabilityReport",
    "ILCandidate",
    "ILResult",
    "MonteCarloReport",
    "PairRecord",
    "SelectionResult",
    "SpinModelConfig",
    "VerifyError",
    "check_nonextendable",
    "classify_pairs",
    "closed_form_information",
    "decoherence",
    "evolve",
    "f_info",
    "min_entropy_select",
    "montecarlo",
    "offdiag",
    "offdiag_cases",
    "probabilities",
    "random_config",
    "schmidt_axis",
    "schmidt_weights",
    "select",
    "set_information",
    "theta",
]
