"""Finite-blocklength privacy-amplification key-length bounds.

Calculator for the spectral (min-entropy), exponential, and hybrid
achievability bounds, the spectral converse, and the second-order Gaussian
approximation, with closed forms for the i.i.d. BSC source and exact
small-instance verification oracles for the underlying inequalities.
"""

from .bounds import (
    BoundParams,
    BoundResult,
    binary_dispersion,
    binary_entropy,
    exponential_lower_bound,
    gaussian_approximation,
    hybrid_lower_bound,
    optimal_reference,
    smooth_min_lower_bound,
    spectral_lower_bound,
    spectral_upper_bound,
)
from .entropy import (
    EntropyValue,
    SpectrumTable,
    collision_entropy,
    conditional_entropy,
    dispersion,
    log_likelihood_spectrum,
    min_entropy,
    renyi_entropy,
    security_exponent,
    smooth_min_entropy,
    smooth_min_entropy_sub,
    spectral_entropy,
)
from .errors import AlphabetMismatchError, ReferenceSupportError, SizeCapError
from .hashing import (
    ToeplitzFamily,
    expected_security_distance,
    verify_entropy_inequalities,
    verify_exponential_bound,
    verify_leftover_bound,
)
from .numeric import (
    BinomialModel,
    binomial_cdf_inverse,
    binomial_model,
    log_binomial_cdf,
    normal_cdf,
    normal_quantile,
)
from .tables import (
    BscSource,
    JointTable,
    MarginalTable,
    clip_below,
    product_extension,
    push_forward,
    security_distance,
    total_variation,
)

__version__ = "0.1.0"

__all__ = [
    "AlphabetMismatchError",
    "BinomialModel",
    "BoundParams",
    "BoundResult",
    "BscSource",
    "EntropyValue",
    "JointTable",
    "MarginalTable",
    "ReferenceSupportError",
    "SizeCapError",
    "SpectrumTable",
    "ToeplitzFamily",
    "binary_dispersion",
    "binary_entropy",
    "binomial_cdf_inverse",
    "binomial_model",
    "clip_below",
    "collision_entropy",
    "conditional_entropy",
    "dispersion",
    "expected_security_distance",
    "exponential_lower_bound",
    "gaussian_approximation",
    "hybrid_lower_bound",
    "log_binomial_cdf",
    "log_likelihood_spectrum",
    "min_entropy",
    "normal_cdf",
    "normal_quantile",
    "optimal_reference",
    "product_extension",
    "push_forward",
    "renyi_entropy",
    "security_distance",
    "security_exponent",
    "smooth_min_entropy",
    "smooth_min_entropy_sub",
    "smooth_min_lower_bound",
    "spectral_entropy",
    "spectral_lower_bound",
    "spectral_upper_bound",
    "total_variation",
    "verify_entropy_inequalities",
    "verify_exponential_bound",
    "verify_leftover_bound",
]
