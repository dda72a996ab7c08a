"""Distribution-free conservative bounds for Hotelling's T-squared statistic
under the orthant symmetry condition, with an exact sign-enumeration oracle
to verify the underlying extremal inequalities."""

from .chi_kernel import (
    GammaDerivatives,
    gamma3,
    gamma_derivs,
    log_gamma3,
    log_survival,
    log_tail_q,
    moment,
    norm_const,
    normal_cdf,
    normal_pdf,
    quantile,
    survival,
    tail_q,
)
from .errors import DomainError
from .extremal_bounds import (
    SHARP_CONSTANT,
    BoundReport,
    a_u,
    j_function,
    lambda_envelope,
    lambda_monotone_check,
    mu_inverse,
    mu_of_t,
    mu_r,
    q_bound,
    w_bound,
)
from .hotelling import ProjectionSummary, projector, r_squared, r_squared_signed, regularized
from .monotone_family import (
    mlr_log_ratio_derivative,
    normal_limit_gap,
    shifted_survival,
    stochastic_monotone_check,
    tail_ratio_check,
)
from .oracle import (
    SignDistribution,
    TestFunction,
    bounded_symmetric_sample,
    chi_expectation,
    exact_linear_distribution,
    exact_quadratic_distribution,
    expectation_under,
    verify_moment_inequality,
    verify_tail_bounds,
)
from .symmetry_test import (
    QuantileTriple,
    TestReport,
    conservativeness_table,
    critical_chain,
    p_value_bound,
    run_test,
)

__version__ = "0.1.0"
