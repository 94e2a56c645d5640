"""Generalized Gaussian noise corrected by the sparse-vector mechanism.

Sample ``x ~ GGauss(p, sigma)``.  If ``||x||_p^p > 2 k sigma^p / p`` the
true answers are released unchanged.  Otherwise sparse vector privately
locates and re-estimates the large coordinates of ``x`` as ``x_hat``, and
the release is ``d + x - x_hat``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .calibration import ComposedParams, MechanismSpec, PrivacyBudget, calibrate_composed
from .distributions import NoiseVector, sample_ggauss_batch
from .errors import ParameterError
from .mechanisms import MechanismOutput, as_answers, guard_fires
from .sparse_vector import SV_NOISE_CONSTANT, SvConfig, numeric_sparse
from .streams import RandomStream


@dataclass(frozen=True, eq=False)
class ComposedRun:
    params: ComposedParams
    truncated: bool
    noise: NoiseVector
    sv_correction: np.ndarray
    output: MechanismOutput


def sv_config_for(params: ComposedParams, sv_constant: float = SV_NOISE_CONSTANT) -> SvConfig:
    if params.alpha_sv <= 0:
        raise ParameterError("alpha_SV is zero; the composed mechanism needs t > 0")
    return SvConfig.from_budget(params.alpha_sv, params.c_sv, params.eps_sv, params.delta_sv,
                                params.beta_sv, constant=sv_constant)


def count_large_coordinates(x, threshold: float) -> int:
    """Number of coordinates with ``|x_i| > threshold``."""
    values = x.values if isinstance(x, NoiseVector) else np.asarray(x, dtype=float)
    return int(np.count_nonzero(np.abs(values) > threshold))


def composition_accounting(params: ComposedParams, budget: PrivacyBudget) -> dict:
    """Privacy shares of the three composed pieces.

    The noise step and sparse vector each take ``(eps/2, delta/3)``; the
    truncation guard is charged the last ``delta/3``.
    """
    return {
        "noise": (budget.epsilon - params.eps_sv, budget.delta / 3.0),
        "sparse_vector": (params.eps_sv, params.delta_sv),
        "guard": (0.0, budget.delta / 3.0),
    }


def composed_mechanism(d, p: float, budget: PrivacyBudget, t: float, stream: RandomStream, *,
                       c_sigma: float = 1.0, log_base: str = "natural",
                       sv_constant: float = SV_NOISE_CONSTANT,
                       params: ComposedParams | None = None, noise=None) -> ComposedRun:
    """One release of the composed mechanism.

    ``params`` skips recalibration in Monte Carlo loops; ``noise`` injects a
    draw of ``x`` (used to force the guard in tests).
    """
    d = as_answers(d)
    k = d.size
    if params is None:
        params = calibrate_composed(k, p, budget, t, c_sigma, log_base)
    sigma = params.sigma
    if noise is None:
        x = sample_ggauss_batch(1, k, p, sigma, stream)[0]
    else:
        x = np.asarray(noise, dtype=float)
        if x.shape != d.shape:
            raise ParameterError("injected noise must match the answer vector's shape")
    xv = NoiseVector(x)
    norm = xv.norm(p)
    if guard_fires(norm, sigma, k, p):
        out = MechanismOutput(d, True, norm)
        return ComposedRun(params, True, xv, np.zeros(k), out)
    x_hat = numeric_sparse(x, sv_config_for(params, sv_constant), stream)
    out = MechanismOutput(d + x - x_hat, False, norm)
    return ComposedRun(params, False, xv, x_hat, out)


def composed_spec(params: ComposedParams, p: float, log_base: str = "natural") -> MechanismSpec:
    return MechanismSpec("composed", sigma=params.sigma, p=p, truncate=True, log_base=log_base)
