"""Barycentric extension of 2-means to n-means, on positive reals and SPD matrices."""

from .core import (
    Certificate,
    ConvergenceReport,
    MeanSpec,
    MetricSpace,
    barycentric_step,
    barycentric_step_star,
    beta_extend,
    extend_tower,
    extension_report,
    homomorphism_residual,
    n_mean,
    power_converge,
    product_mean,
    stable_reduce,
)
from .estimator import NMean
from .exceptions import (
    ConvergenceError,
    DimensionError,
    MeanError,
    ParameterError,
    ParseError,
    ValidationError,
)
from .iterated import agm, hgm, logarithmic_op
from .registry import get_mean

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "ConvergenceError",
    "ConvergenceReport",
    "DimensionError",
    "MeanError",
    "MeanSpec",
    "MetricSpace",
    "NMean",
    "ParameterError",
    "ParseError",
    "ValidationError",
    "agm",
    "barycentric_step",
    "barycentric_step_star",
    "beta_extend",
    "extend_tower",
    "extension_report",
    "get_mean",
    "hgm",
    "homomorphism_residual",
    "logarithmic_op",
    "n_mean",
    "power_converge",
    "product_mean",
    "stable_reduce",
]
