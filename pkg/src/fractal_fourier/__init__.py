"""Self-similar measures on R^k: certified Fourier evaluation and decay bounds."""

from .errors import (
    BadConfig,
    CenterInsideSupport,
    FractalFourierError,
    InconsistentProfile,
    InvalidIFS,
    MissingExponent,
    MissingHessianBound,
    NotApplicable,
    ResourceExceeded,
    SupportNotPositive,
    Unsupported,
)
from .ifs import (
    CylinderWord,
    GrowthVerdict,
    IFSDocument,
    SelfSimilarIFS,
    SimilarityMap,
    StoppingDecomposition,
    cantor_ifs,
    chaos_game,
    fixed_point,
    ifs_1d,
    is_homogeneous,
    load_ifs,
    missing_digit_ifs,
    non_expanding_heuristic,
    porosity_flag,
    separation_diagnostic,
    stopping_decomposition,
    uniform_ifs,
)
from .dimensions import (
    DimensionProfile,
    assouad_dimension,
    build_profile,
    correlation_dimension_estimate,
    lq_spectrum,
    similarity_dimension_measure,
    similarity_dimension_set,
)
from .bounds import (
    DecayBound,
    compute_gamma,
    decay_bound,
    high_dim_condition,
    log_pushforward_sigma,
    two_measure_density_conditions,
    sigma_p,
    symmetric_thresholds,
    three_set_condition,
    two_set_condition,
    vdc_exponent,
)
from .fourier import (
    FrequencySample,
    PushforwardMap,
    constant_map,
    cube_map,
    curvature_diagnostic,
    estimate_bounds,
    graph_lift,
    holomorphic_hessian_identity,
    holomorphic_map,
    identity_map,
    log_map,
    mu_hat,
    neg_log_map,
    pushforward_batch,
    pushforward_hat_order0,
    pushforward_hat_order1,
    quadratic_directional_hessian,
    quadratic_map,
    square_map,
    sum_of_squares_map,
    write_samples_csv,
)
from .experiments import (
    ConvolutionExperiment,
    DecayExperiment,
    log_factor,
    measure_decay_slope,
    multiplicative_convolution,
    neg_log_factor,
    radial_projection_experiment,
)

__version__ = "0.1.0"
