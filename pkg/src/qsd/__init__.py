"""Optimal Gaussian discrimination and comparison of constant-p Gaussian states."""

from .comparison import (
    BinaryComparisonProblem,
    ComparisonProblem,
    binary_comparison_error_via_per_mode,
    comparison_success_from_discrimination,
    optimal_gaussian_comparison_error,
    reduce_to_discrimination,
)
from .discrimination import (
    DecisionFunction,
    DiscriminationProblem,
    ErrorReport,
    Hypothesis,
    classify,
    decision_function,
    helstrom_pure,
    optimal_gaussian_error,
    simulate_homodyne_protocol,
    tv_distance,
)
from .gaussian import (
    GaussianMixture,
    GaussianState,
    InvalidStateError,
    MarginalDensity,
    coherent_state,
    is_constant_p_set,
    make_gaussian_state,
    p_marginal,
    tensor,
    vacuum,
    wigner,
    wigner_mixture,
    x_marginal,
)
from .numerics import Estimate, MonteCarloSpec, QuadratureSpec

__version__ = "0.1.0"
