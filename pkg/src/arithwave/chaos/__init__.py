"""Wiener-chaos machinery for the nodal volume."""
from .coefficients import (
    ChaosCoefficients, a_closed_form, a_coefficient, a_quadrature, beta_coefficient,
    chaos_coefficients, gradient_norm_coefficient, hermite,
)
from .draws import CoefficientDraw, full_coefficients, sample_batch, sample_draw
from .limits import (
    D2LimitLaw, LimitLaw, W_ORDER, covariance_matrix_exact, covariance_matrix_limit,
    d2_limit_law, limit_law, theoretical_variance,
)
from .projections import (
    H4Integrals, correlation_sums_brute_force, fourth_chaos, fourth_chaos_bracket,
    fourth_chaos_d3, fourth_chaos_from_integrals, h4_integral_identities,
    nodal_length_fourth_chaos, pairing_decomposition, second_chaos, second_chaos_terms,
)
from .statistics import ChaosStatistics, StatisticsEngine, chaos_statistics, engine_for
