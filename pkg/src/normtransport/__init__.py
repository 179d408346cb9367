"""Normalized transport of stationary measures through variable-length codes.

The package computes, exactly where possible and with certified brackets
otherwise: transported cylinder probabilities (forward and inverse), the
normalization identity between mean codeword length and parse-boundary
probability, stationary means of the plain pushforward, recurrence-time
laws with their unary-code bridge, and the code-side prerequisites
(unique decodability, bounded self-avoidance checking).
"""

from .codes import (
    CodedWindow,
    FinitaryCode,
    SelfAvoidVerdict,
    SelfAvoidWitness,
    UDVerdict,
    check_self_avoiding,
    check_unique_decodability,
    encode,
    factorization_commutes,
    make_comma_embedded,
    make_comma_separated,
    make_generic,
    make_unary,
    quasi_period,
    quasi_period_bounded,
    replay_witness,
    spread,
)
from .core import (
    Alphabet,
    CylinderEvent,
    Symbol,
    Window,
    Word,
    matches,
    shift_event,
    shift_window,
)
from .errors import (
    CodeConstructionError,
    ConfigError,
    EnumerationBudgetError,
    InsufficientVisitsError,
    NonCanonicalCylinderError,
    NormTransportError,
    NotIrreducibleError,
    RangeNotCoveredError,
    StochasticityError,
    UnknownSymbolError,
    UnsupportedKindError,
    WindowTooShortError,
    ZeroBoundaryError,
)
from .measures import (
    HiddenChain,
    IIDModel,
    MarkovModel,
    MixtureModel,
    PathSample,
    PushforwardModel,
    birkhoff_frequency,
    cylinder_prob,
    model_digest,
    sample,
    stationary_distribution,
)
from .recurrence import (
    BirkhoffGapAgreement,
    BridgeReport,
    EventSet,
    ExactGapStats,
    GapLaw,
    GapStationarityReport,
    IndicatorModel,
    RecurrenceParse,
    RecurrenceTrace,
    birkhoff_gap_agreement,
    event_prob,
    exact_block_law,
    gap_functional_stats,
    gap_law_table,
    gap_stationarity_report,
    kac_expected_return,
    read_trace,
    recurrence_joint_law,
    recurrence_parse,
    recurrence_times,
    return_map_invariance,
    sample_recurrence_trace,
    unary_bridge,
    write_trace,
)
from .transport import (
    Bracket,
    ComponentTransport,
    DecompositionReport,
    InverseEvaluator,
    TransportResult,
    TransportedMixture,
    TransportedModel,
    boundary_prob,
    cesaro_mean,
    cesaro_profile,
    decomposition_check,
    expected_quasi_period,
    forward,
    inverse,
    normalization_residual,
    transported_model,
)
from .verify import (
    CaseResult,
    SuiteReport,
    cesaro_suite,
    code_suite,
    combine_reports,
    expect_failure_case,
    make_case,
    normalization_suite,
    plain_transport_control,
    recurrence_suite,
    roundtrip_suite,
    stationarity_suite,
)

__version__ = "0.1.0"

__all__ = [
    "Alphabet",
    "Symbol",
    "Word",
    "Window",
    "CylinderEvent",
    "shift_window",
    "shift_event",
    "matches",
    "FinitaryCode",
    "CodedWindow",
    "UDVerdict",
    "SelfAvoidWitness",
    "SelfAvoidVerdict",
    "make_comma_separated",
    "make_comma_embedded",
    "make_unary",
    "make_generic",
    "encode",
    "quasi_period",
    "quasi_period_bounded",
    "spread",
    "check_unique_decodability",
    "check_self_avoiding",
    "replay_witness",
    "factorization_commutes",
    "IIDModel",
    "MarkovModel",
    "MixtureModel",
    "PushforwardModel",
    "HiddenChain",
    "PathSample",
    "stationary_distribution",
    "cylinder_prob",
    "sample",
    "birkhoff_frequency",
    "model_digest",
    "Bracket",
    "TransportResult",
    "ComponentTransport",
    "TransportedModel",
    "TransportedMixture",
    "transported_model",
    "expected_quasi_period",
    "forward",
    "InverseEvaluator",
    "boundary_prob",
    "inverse",
    "normalization_residual",
    "cesaro_mean",
    "cesaro_profile",
    "DecompositionReport",
    "decomposition_check",
    "EventSet",
    "RecurrenceTrace",
    "recurrence_times",
    "event_prob",
    "kac_expected_return",
    "return_map_invariance",
    "recurrence_joint_law",
    "GapLaw",
    "gap_law_table",
    "exact_block_law",
    "IndicatorModel",
    "BridgeReport",
    "unary_bridge",
    "RecurrenceParse",
    "recurrence_parse",
    "GapStationarityReport",
    "gap_stationarity_report",
    "ExactGapStats",
    "gap_functional_stats",
    "BirkhoffGapAgreement",
    "birkhoff_gap_agreement",
    "sample_recurrence_trace",
    "write_trace",
    "read_trace",
    "CaseResult",
    "SuiteReport",
    "make_case",
    "expect_failure_case",
    "combine_reports",
    "stationarity_suite",
    "plain_transport_control",
    "roundtrip_suite",
    "normalization_suite",
    "cesaro_suite",
    "recurrence_suite",
    "code_suite",
    "NormTransportError",
    "UnknownSymbolError",
    "RangeNotCoveredError",
    "WindowTooShortError",
    "NonCanonicalCylinderError",
    "UnsupportedKindError",
    "NotIrreducibleError",
    "InsufficientVisitsError",
    "StochasticityError",
    "EnumerationBudgetError",
    "ZeroBoundaryError",
    "CodeConstructionError",
    "ConfigError",
]
