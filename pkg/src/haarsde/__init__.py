"""Euler-Maruyama for 1-d SDEs whose drift is the derivative of an fBm path.

The drift is truncated in the Haar basis, smoothed in closed form by the
killed heat semigroup and fed to a Brownian-coupled Euler scheme.
"""

__version__ = "0.1.0"

from .experiment import (
    ErrorCurve,
    RateFit,
    RateParams,
    StudyConfig,
    build_drift,
    fit_rate,
    mc_error,
    run_table,
    schedule,
    theoretical_rate,
)
from .fbm import FbmPath, cholesky_factor, fbm_covariance, refine_fbm, sample_fbm
from .mollifier import (
    MollifiedDrift,
    drift_eval,
    drift_grad_eval,
    mollified_indicator,
    std_normal_cdf,
)
from .scheme import (
    BrownianGrid,
    SamplePath,
    SchemeConfig,
    brownian_path,
    coarsen,
    euler_maruyama,
    euler_on_path,
    sample_brownian_grid,
)
from .wavelets import (
    DyadicIndex,
    FaberCoefficients,
    HaarExpansion,
    faber_coefficients_from_samples,
    faber_eval,
    faber_sum_eval,
    haar_coefficients_from_samples,
    haar_eval,
    haar_sum_eval,
    refine_expansion,
)

__all__ = [
    "BrownianGrid",
    "DyadicIndex",
    "ErrorCurve",
    "FaberCoefficients",
    "FbmPath",
    "HaarExpansion",
    "MollifiedDrift",
    "RateFit",
    "RateParams",
    "SamplePath",
    "SchemeConfig",
    "StudyConfig",
    "brownian_path",
    "build_drift",
    "cholesky_factor",
    "coarsen",
    "drift_eval",
    "drift_grad_eval",
    "euler_maruyama",
    "euler_on_path",
    "faber_coefficients_from_samples",
    "faber_eval",
    "faber_sum_eval",
    "fbm_covariance",
    "fit_rate",
    "haar_coefficients_from_samples",
    "haar_eval",
    "haar_sum_eval",
    "mc_error",
    "mollified_indicator",
    "refine_expansion",
    "refine_fbm",
    "run_table",
    "sample_brownian_grid",
    "sample_fbm",
    "schedule",
    "std_normal_cdf",
    "theoretical_rate",
]
