"""Compressed momentum-based single-point zeroth-order decentralized
optimization: simulation engine, benchmark objectives, metrics and a
parameter-condition validator."""

from .compression import CompressedMessage, Compressor, bit_cost, compress, contraction_estimate
from .config import ExperimentConfig, load_config, parse_config_text
from .engine import (
    AlgorithmConfig,
    NetworkState,
    StepRecord,
    experiment_streams,
    horizon_step_size,
    init,
    run,
    step,
)
from .errors import (
    CmzoError,
    ConfigError,
    ConnectivityFailure,
    DomainError,
    NumericalDivergence,
    QueryFailure,
    SpectrumViolation,
)
from .graph import (
    MixingMatrix,
    Topology,
    build_topology,
    metropolis_weights,
    spectral_quantities,
    validate_mixing_matrix,
)
from .objectives import (
    LocalObjective,
    LogisticObjective,
    QuadraticObjective,
    logistic_batch_grad,
    logistic_query,
    make_quadratic_agents,
    nonconvex_regularizer,
    quadratic_objective,
    regularizer_grad,
)
from .runner import (
    CSV_HEADER,
    ExperimentResult,
    MetricsRow,
    build_setup,
    compute_metrics,
    network_gradient,
    run_experiment,
    sweep,
)
from .theorem import (
    CorollaryReport,
    TheoremConstants,
    TheoremInputs,
    TheoremReport,
    check_corollary1,
    check_theorem1,
    compute_constants,
)
from .zo import ZOConfig, bias_bound, one_point_gradient, sample_perturbation

__version__ = "0.1.0"
