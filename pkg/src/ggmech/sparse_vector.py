"""NumericSparse with zeros in place of "below threshold".

Queries are the magnitudes ``|d_i|`` compared, in index order, against a
noisy threshold ``alpha/2``.  A query judged above threshold is answered
with ``d_i`` plus Laplace noise and the threshold is redrawn; after
``budget_count`` such answers every remaining output is 0.

Noise schedule.  Epsilon is split evenly between the threshold/comparison
part and the numeric answers.  With ``C = 2 * sqrt(32)`` (the sqrt(32)
advanced-composition constant of the (eps, delta) NumericSparse, doubled
for the half-epsilon share):

* threshold scale  ``C * sqrt(c * ln(2/delta)) / eps``
* comparison scale ``2 * threshold scale``
* answer scale     ``C * sqrt(c * ln(4/delta)) / eps``

so the comparison part uses a ``delta/2`` share and the answers ``delta/4``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import sample_laplace
from .errors import ParameterError
from .streams import RandomStream

SV_NOISE_CONSTANT = 2.0 * math.sqrt(32.0)


def sv_noise_schedule(eps: float, delta: float, budget_count: int,
                      constant: float = SV_NOISE_CONSTANT) -> tuple[float, float, float]:
    """Return ``(threshold_scale, comparison_scale, answer_scale)``."""
    if not (eps > 0) or not (0 < delta < 1):
        raise ParameterError(f"need eps > 0 and delta in (0, 1), got eps={eps!r}, delta={delta!r}")
    if int(budget_count) != budget_count or budget_count < 1:
        raise ParameterError(f"budget_count must be a positive integer, got {budget_count!r}")
    threshold = constant * math.sqrt(budget_count * math.log(2.0 / delta)) / eps
    answer = constant * math.sqrt(budget_count * math.log(4.0 / delta)) / eps
    return threshold, 2.0 * threshold, answer


def sv_accuracy_alpha(k: int, beta: float, comparison_scale: float) -> float:
    """An ``alpha`` at which the accuracy guarantee holds for this schedule.

    Fails only if one of at most ``3(k+1)`` Laplace draws is large: a
    comparison or threshold draw of magnitude ``alpha/4`` or an answer draw
    of magnitude ``alpha``.  Each has tail at most
    ``exp(-alpha / (4 * comparison_scale))`` because the other two scales
    are no larger than the comparison scale, hence
    ``alpha = 4 * comparison_scale * ln(3(k+1)/beta)``.
    """
    if not (0 < beta < 1):
        raise ParameterError(f"beta must lie in (0, 1), got {beta!r}")
    return 4.0 * comparison_scale * math.log(3.0 * (k + 1) / beta)


@dataclass(frozen=True)
class SvConfig:
    alpha: float
    budget_count: int
    eps: float
    delta: float
    beta: float
    threshold_noise_scale: float
    comparison_noise_scale: float
    answer_noise_scale: float

    def __post_init__(self):
        if not (self.alpha > 0):
            raise ParameterError(f"alpha must be positive, got {self.alpha!r}")
        if int(self.budget_count) != self.budget_count or self.budget_count < 1:
            raise ParameterError(f"budget_count must be a positive integer, got {self.budget_count!r}")
        if not (0 < self.beta < 1):
            raise ParameterError(f"beta must lie in (0, 1), got {self.beta!r}")
        for name in ("threshold_noise_scale", "comparison_noise_scale", "answer_noise_scale"):
            if not (getattr(self, name) > 0):
                raise ParameterError(f"{name} must be positive")

    @classmethod
    def from_budget(cls, alpha: float, budget_count: int, eps: float, delta: float, beta: float,
                    constant: float = SV_NOISE_CONSTANT) -> "SvConfig":
        scales = sv_noise_schedule(eps, delta, budget_count, constant)
        return cls(alpha, int(budget_count), eps, delta, beta, *scales)

    def check_length(self, k: int):
        if self.budget_count > k:
            raise ParameterError(f"budget_count={self.budget_count} exceeds k={k}")


def numeric_sparse_detailed(d, config: SvConfig, stream: RandomStream):
    """Run the mechanism and also return the indices answered numerically.

    Draw order: all ``k`` comparison draws, the initial threshold draw,
    then per above-threshold event the answer draw followed by a fresh
    threshold draw.
    """
    d = np.asarray(d, dtype=float)
    if d.ndim != 1:
        raise ParameterError("input must be a 1-d vector")
    k = d.size
    config.check_length(k)
    f = np.abs(d)
    nu = sample_laplace(config.comparison_noise_scale, stream, size=k)
    noisy = f + nu
    out = np.zeros(k)
    flagged = []
    base = config.alpha / 2.0
    threshold = base + sample_laplace(config.threshold_noise_scale, stream)
    pos = 0
    while pos < k and len(flagged) < config.budget_count:
        hits = np.flatnonzero(noisy[pos:] >= threshold)
        if hits.size == 0:
            break
        i = pos + int(hits[0])
        out[i] = d[i] + sample_laplace(config.answer_noise_scale, stream)
        flagged.append(i)
        pos = i + 1
        threshold = base + sample_laplace(config.threshold_noise_scale, stream)
    return out, np.asarray(flagged, dtype=int)


def numeric_sparse(d, config: SvConfig, stream: RandomStream) -> np.ndarray:
    return numeric_sparse_detailed(d, config, stream)[0]
