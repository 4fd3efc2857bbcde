"""Multifractional Brownian and linear multifractional stable motion:
simulation, negative power variation estimators of H(t0) and alpha, and
quadrature values of the limiting constants."""

from .errors import (
    CapacityError,
    ConfigError,
    DegenerateDataError,
    DegenerateKernelError,
    DomainError,
    EmptyNeighborhoodError,
    MfstableError,
    NumericFailure,
    PathRangeError,
)
from .estim import (
    EstimationResult,
    EstimatorConfig,
    Neighborhood,
    alpha_from_v,
    estimate,
    estimate_alpha,
    estimate_H,
    h_from_v,
    neighborhood,
    rate_dn,
    rate_dn_gaussian,
    rate_dn_stable,
    v_stat,
    w_stat,
)
from .filters import FilterSeq, binomial_filter, discrete_variations, verify_moments
from .oracle import (
    KernelSpec,
    fixed_point_residual,
    m_t0,
    m_t0_beta_closed,
    m_t0_beta_quadrature,
    sigma_kn,
    stable_moment_integral,
)
from .sim import (
    HURST_PRESETS,
    HurstFunction,
    ModelSpec,
    SamplePath,
    read_path,
    replicate_seed,
    sas_variate,
    simulate,
    simulate_fbm_exact,
    simulate_lmsm,
    simulate_mbm,
    write_path,
)
from .specfun import ExponentPair, c_beta, c_uv, h, ln_gamma, phi, psi

__version__ = "0.1.0"
