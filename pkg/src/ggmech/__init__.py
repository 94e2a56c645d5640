"""Generalized Gaussian noise for private release of counting queries."""

from .calibration import (
    ComposedParams,
    MechanismSpec,
    PrivacyBudget,
    calibrate_composed,
    calibrate_sigma_ggauss,
    calibrate_sigma_pq,
    calibration_record,
    empirical_calibrate,
    validate_params,
)
from .composed import composed_mechanism
from .distributions import (
    GGammaParams,
    NoiseVector,
    sample_ggamma,
    sample_ggauss_pq_vector,
    sample_ggauss_vector,
    sample_lp_sphere,
)
from .errors import CalibrationError, NumericError, ParameterError
from .mechanisms import (
    MechanismOutput,
    gaussian_mechanism,
    ggauss_mechanism,
    ggauss_pq_mechanism,
    laplace_mechanism,
    run_mechanism,
)
from .sparse_vector import SvConfig, numeric_sparse
from .streams import RandomStream

__version__ = "0.1.0"

__all__ = [
    "calibrate_composed",
    "calibrate_sigma_ggauss",
    "calibrate_sigma_pq",
    "calibration_record",
    "CalibrationError",
    "composed_mechanism",
    "ComposedParams",
    "empirical_calibrate",
    "gaussian_mechanism",
    "GGammaParams",
    "ggauss_mechanism",
    "ggauss_pq_mechanism",
    "laplace_mechanism",
    "MechanismOutput",
    "MechanismSpec",
    "NoiseVector",
    "numeric_sparse",
    "NumericError",
    "ParameterError",
    "PrivacyBudget",
    "RandomStream",
    "run_mechanism",
    "sample_ggamma",
    "sample_ggauss_pq_vector",
    "sample_ggauss_vector",
    "sample_lp_sphere",
    "SvConfig",
    "validate_params",
]
