"""Multiplicative self-decompositions of the exponential, gamma and
half-normal laws.

Each law ``Z`` satisfies ``Z = Z**a * R`` in distribution with ``R``
independent of ``Z``: for the exponential law ``R`` has the M-Wright
density, for gamma(r) a Fox H density (a Wright function), and for the
half-normal law a Wright-function density. The package evaluates these
special functions, their Mellin and Laplace transforms, samples every law
involved, and checks the decompositions numerically.
"""

from .distributions import (
    InverseCdfTable,
    SampleBatch,
    build_inverse_cdf_table,
    cdf_numeric,
    ensure_table,
    pdf,
    power_pdf,
    sample,
)
from .errors import (
    ConvergenceError,
    DomainError,
    PoleError,
    QuadratureError,
    SelfDecompError,
    StripError,
    TableUnavailableError,
)
from .families import DistributionSpec, Family
from .mellin import (
    AnalyticStrip,
    MellinValue,
    QuadratureConfig,
    analytic_mellin,
    mellin_convolve,
    mellin_of_power,
    numeric_mellin,
)
from .specfun import (
    SeriesConfig,
    foxh_residual_density,
    gaussian_residual_density,
    generalized_mittag_leffler,
    log_gamma_complex,
    m_wright,
    mittag_leffler,
    reciprocal_gamma,
    wright_w,
)
from .verify import (
    CharacterizationTrace,
    VerificationReport,
    VerifyConfig,
    characterization_iteration,
    characterization_report,
    ks_two_sample,
    laplace_pair_check,
    limit_beta_zero_check,
    verify_exponential_decomposition,
    verify_gamma_decomposition,
    verify_gaussian_decomposition,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
