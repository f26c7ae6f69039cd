"""Goodness-of-fit tests built on U-statistics of m-spacings."""

from ._accel import BACKEND
from .asymptotics import (
    EfficacyReport,
    KernelMoments,
    LocalShift,
    almp_efficacy,
    efficacy,
    integral_l_prime_sq,
    local_shift,
    moments_analytic_gini_sq,
    moments_mc,
    overlap_cov_gini_sq,
)
from .inference import CriticalTable, Tail, TestResult, asymptotic_test, mc_critical, mc_test
from .kernels import ScalarKernel, SymmetricKernel, make_gini, make_power_scalar, parse_kernel, symmetrize
from .sampling import (
    LocalAlternative,
    RngSpec,
    gamma_windows,
    local_alternative,
    sample_beta,
    sample_local_alternative,
    sample_uniform,
)
from .spacings import (
    Sample,
    Scheme,
    SpacingsVector,
    disjoint_spacings,
    from_observations,
    overlapping_spacings,
    pit_transform,
    scale,
)
from .statistics import StatisticValue, u_stat_fast, u_stat_naive, v_stat

__version__ = "0.1.0"
