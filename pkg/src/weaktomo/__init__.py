"""Finite-dimensional simulator and tomography engine for variable-strength
quantum measurements, including post-selected sub-ensembles whose effective
states carry negative eigenvalues."""

from .errors import (
    BadConditionalData,
    BadWeights,
    ConfigError,
    DimensionMismatch,
    EigendecompositionError,
    EmptyPostselection,
    FrameIncomplete,
    InconsistentProbabilities,
    InvalidEffect,
    NotPositiveSemidefinite,
    SamplingFromQuasiDistribution,
    StrengthZeroNotInvertible,
    TooFewSweepPoints,
    WeaktomoError,
    ZeroProbabilityPostselection,
    ZeroWeightOutcome,
)
from .linalg import (
    as_hermitian,
    eigh,
    hermitian_part,
    hs_inner,
    negativity,
    sqrt_psd,
    trace_distance,
)
from .states import (
    TransientState,
    density_matrix,
    maximally_mixed,
    pure_state,
    random_density_matrix,
)
from .povm import (
    EXACT,
    LINEARIZED,
    MeasurementOperatorSet,
    StrongPovm,
    WeakPovmFamily,
    build_family,
    measurement_operators,
    outcome_probabilities,
    outcome_probability,
    pauli6_povm,
    paulis,
    sic_qubit_povm,
)
from .catalog import CATALOG_NAMES, ScenarioBundle, catalog, random_basis_povm, random_strong_povm
from .tomography import (
    TomographyFrame,
    build_frame,
    coefficients_from_probabilities,
    reconstruct,
    reconstruct_conditional,
)
from .postselect import (
    DecompositionResult,
    OrderIndependenceResult,
    PostselectionReport,
    decompose_by_postselection,
    joint_quasi_probability,
    order_independence_check,
    transient_state,
)
from .experiments import (
    JointDistribution,
    SampleSummary,
    SweepPoint,
    SweepResult,
    backaction_deficit,
    estimate_transient,
    fit_loglog,
    joint_distribution,
    sample,
    sweep_epsilon,
    sweep_samples,
)
from .rng import derive_stream, generator, splitmix64

__version__ = "0.1.0"
