"""Arithmetic random waves on the 2- and 3-torus.

Lattice points on spheres, zero-sum 4-correlations, the Wiener-chaos
decomposition of the nodal volume, grid synthesis of the field and
geometric nodal estimators.
"""
from .errors import (
    ArithWaveError, DependencyError, DimensionError, DomainError, NumericError,
    RangeError, ResolutionError, SizeError, StatisticsError,
)
from .kernels import BACKEND
from .lattice import (
    FrequencySet, MomentReport, enumerate_frequencies, equidistribution_trend,
    is_admissible, moment_report, multiplicity, multiplicity_by_factorization,
    odd_moment_sums, scan_admissible,
)

__version__ = "0.1.0"
