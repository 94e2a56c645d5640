"""Additive-noise mechanisms for k counting queries.

Neighbouring inputs differ by at most 1 in every coordinate, so the
baseline Laplace mechanism has l1 sensitivity k and the Gaussian mechanism
l2 sensitivity sqrt(k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .calibration import MechanismSpec, PrivacyBudget
from .distributions import (
    lp_norm,
    sample_ggauss_batch,
    sample_ggauss_pq_batch,
    sample_laplace,
)
from .errors import ParameterError
from .streams import RandomStream


@dataclass(frozen=True, eq=False)
class MechanismOutput:
    values: np.ndarray
    truncated: bool = False
    noise_norm_p: float = float("nan")

    def __post_init__(self):
        arr = np.array(self.values, dtype=float, copy=True)
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)


def as_answers(d) -> np.ndarray:
    """Validate a true-answer vector: 1-d, non-empty, finite."""
    arr = np.asarray(d, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ParameterError("query answers must be a non-empty 1-d vector")
    if not np.all(np.isfinite(arr)):
        raise ParameterError("query answers must be finite")
    return arr


def laplace_scale(k: int, budget: PrivacyBudget) -> float:
    return k / budget.epsilon


def gaussian_std(k: int, budget: PrivacyBudget) -> float:
    return math.sqrt(2.0 * k * math.log(1.25 / budget.delta)) / budget.epsilon


def laplace_mechanism(d, budget: PrivacyBudget, stream: RandomStream, scale: float | None = None):
    d = as_answers(d)
    b = laplace_scale(d.size, budget) if scale is None else scale
    x = sample_laplace(b, stream, size=d.size)
    return MechanismOutput(d + x, False, float(np.sum(np.abs(x))))


def gaussian_mechanism(d, budget: PrivacyBudget, stream: RandomStream, std: float | None = None):
    d = as_answers(d)
    if std is None:
        if budget.epsilon > 1:
            raise ParameterError("the textbook Gaussian calibration needs epsilon <= 1")
        std = gaussian_std(d.size, budget)
    x = std * stream.standard_normal(d.size)
    return MechanismOutput(d + x, False, float(np.sqrt(np.sum(x * x))))


def guard_fires(noise_norm: float, sigma: float, k: int, exponent: float) -> bool:
    """Truncation guard ``(||x||_p / sigma)**exponent > 2k / exponent``."""
    return (noise_norm / sigma) ** exponent > 2.0 * k / exponent


def _release(d, x, spec: MechanismSpec, exponent: float):
    norm = float(lp_norm(x, spec.p))
    if spec.truncate and guard_fires(norm, spec.sigma, d.size, exponent):
        return MechanismOutput(d, True, norm)
    return MechanismOutput(d + x, False, norm)


def ggauss_mechanism(d, spec: MechanismSpec, stream: RandomStream, noise=None) -> MechanismOutput:
    """Add GGauss(p, sigma) noise; release ``d`` itself when the guard fires.

    ``noise`` injects a precomputed draw, which tests use to force the guard.
    """
    d = as_answers(d)
    if spec.family not in ("ggauss", "composed"):
        raise ParameterError(f"spec family {spec.family!r} is not a Generalized Gaussian")
    if noise is None:
        x = sample_ggauss_batch(1, d.size, spec.p, spec.sigma, stream)[0]
    else:
        x = np.asarray(noise, dtype=float)
        if x.shape != d.shape:
            raise ParameterError("injected noise must match the answer vector's shape")
    return _release(d, x, spec, spec.p)


def ggauss_pq_mechanism(d, spec: MechanismSpec, stream: RandomStream, noise=None) -> MechanismOutput:
    """Add noise with density prop. to ``exp(-(||x||_p/sigma)**q)``."""
    d = as_answers(d)
    q = spec.p if spec.q is None else spec.q
    if q > spec.p:
        raise ParameterError(f"q must not exceed p (got q={q}, p={spec.p})")
    if noise is None:
        x = sample_ggauss_pq_batch(1, d.size, spec.p, q, spec.sigma, stream)[0]
    else:
        x = np.asarray(noise, dtype=float)
        if x.shape != d.shape:
            raise ParameterError("injected noise must match the answer vector's shape")
    return _release(d, x, spec, q)


def run_mechanism(spec: MechanismSpec, d, budget: PrivacyBudget, stream: RandomStream) -> MechanismOutput:
    """Dispatch on ``spec.family`` for the additive mechanisms."""
    if spec.family == "laplace":
        return laplace_mechanism(d, budget, stream)
    if spec.family == "gaussian":
        return gaussian_mechanism(d, budget, stream)
    if spec.family == "ggauss":
        return ggauss_mechanism(d, spec, stream)
    if spec.family == "ggauss_pq":
        return ggauss_pq_mechanism(d, spec, stream)
    raise ParameterError(f"run_mechanism does not handle family {spec.family!r}")
