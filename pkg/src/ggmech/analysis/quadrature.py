"""Deterministic checks: Generalized Gamma moments, MGFs and mean bounds.

Expectations under GGamma(a, b) are computed after the substitution
``v = x**a``, under which the density becomes
``(b/a) exp(-v**(b/a)) / Gamma(a/b)`` on ``(0, inf)``.  That density is
bounded at 0 even when ``a < 1``, so adaptive quadrature converges without
special handling of the singularity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from ..distributions import GGammaParams, sample_ggamma
from ..errors import NumericError, ParameterError
from . import verdicts as V

QUAD_RTOL = 1e-8


@dataclass(frozen=True)
class SubGammaSpec:
    """MGF domination by ``exp(lambda^2 v / (2 (1 - c lambda)))`` on one side."""

    v: float
    c: float
    side: str = "right"

    def __post_init__(self):
        if not (self.v > 0):
            raise ParameterError(f"variance proxy must be positive, got {self.v!r}")
        if not (self.c >= 0):
            raise ParameterError(f"scale must be nonnegative, got {self.c!r}")
        if self.side not in ("right", "left"):
            raise ParameterError(f"side must be 'right' or 'left', got {self.side!r}")

    @property
    def lambda_max(self) -> float:
        return math.inf if self.c == 0 else 1.0 / self.c

    def mgf_bound(self, lam: float) -> float:
        return math.exp(lam * lam * self.v / (2.0 * (1.0 - self.c * lam)))

    def tail_threshold(self, mean: float, t: float) -> float:
        """Deviation point ``mean +/- (sqrt(2 v t) + c t)`` with tail ``<= e^{-t}``."""
        dev = math.sqrt(2.0 * self.v * t) + self.c * t
        return mean + dev if self.side == "right" else mean - dev


def ggamma_expectation(params: GGammaParams, func, rtol: float = QUAD_RTOL) -> float:
    """``E[func(X)]`` for ``X ~ GGamma(a, b)`` by adaptive quadrature.

    Raises :class:`NumericError` if the reported error exceeds ``rtol``.
    """
    a, b = params.a, params.b
    ratio = b / a
    norm = ratio / math.gamma(a / b)

    def integrand(v):
        w = math.exp(-v ** ratio)
        # the weight underflows before exponential integrands overflow
        return 0.0 if w == 0.0 else func(v ** (1.0 / a)) * w

    # split where the weight has decayed by e^{-1}; the far piece is integrated on (mid, inf)
    mid = 1.0
    # quadpack refuses relative tolerances near machine precision
    epsrel = max(rtol * 1e-2, 1e-13)
    pieces = []
    for lo, hi in ((0.0, mid), (mid, np.inf)):
        val, err = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=epsrel, limit=500)
        pieces.append((val, err))
    total = sum(v for v, _ in pieces) * norm
    err = sum(e for _, e in pieces) * norm
    if not math.isfinite(total) or err > rtol * abs(total):
        raise NumericError("quadrature did not reach the requested tolerance",
                           {"value": total, "abserr": err, "rtol": rtol, "a": a, "b": b})
    return total


def mgf_subgamma_check(p: float, spec: SubGammaSpec, lambdas, rtol: float = QUAD_RTOL) -> list[V.Verdict]:
    """Check ``E[exp(+-lambda (Y - mu))] <= bound`` for ``Y ~ GGamma(1/(p-1), p/(p-1))``."""
    if p < 4:
        raise ParameterError(f"the sub-gamma check is stated for p >= 4, got {p!r}")
    params = GGammaParams.for_privacy_loss(p)
    mu = 1.0 / math.gamma(1.0 / p)
    sign = 1.0 if spec.side == "right" else -1.0
    out = []
    for lam in lambdas:
        lam = float(lam)
        if not (0 < lam < spec.lambda_max):
            raise ParameterError(f"lambda={lam} outside (0, 1/c) for c={spec.c}")
        lhs = ggamma_expectation(params, lambda y: math.exp(sign * lam * (y - mu)), rtol)
        rhs = spec.mgf_bound(lam)
        out.append(V.exact_upper(
            f"mgf_{spec.side}", {"p": p, "lambda": lam, "v": spec.v, "c": spec.c, "mu": mu},
            lhs, rhs))
    return out


def ggamma_moment_check(params: GGammaParams, r_set, trials: int | None = None, stream=None,
                        rtol: float = 1e-6) -> list[V.Verdict]:
    """Moments against ``Gamma((a+r)/b) / Gamma(a/b)``.

    With ``trials`` and ``stream`` the moments are Monte Carlo estimates
    judged within 5 standard errors; otherwise quadrature within ``rtol``.
    """
    out = []
    if trials is None:
        for r in r_set:
            val = ggamma_expectation(params, lambda x, r=r: x ** r)
            out.append(V.rel_close("ggamma_moment_quad", {"a": params.a, "b": params.b, "r": r},
                                   val, params.moment(r), rtol))
        return out
    if stream is None:
        raise ParameterError("Monte Carlo moments need a stream")
    x = sample_ggamma(params, stream, size=int(trials))
    for r in r_set:
        xr = x ** r
        out.append(V.close_5se("ggamma_moment_mc",
                               {"a": params.a, "b": params.b, "r": r, "trials": int(trials)},
                               float(xr.mean()), params.moment(r),
                               float(xr.std(ddof=1) / math.sqrt(trials))))
    return out


def mu_bounds_check(p_values) -> list[V.Verdict]:
    """``1/p <= 1/Gamma(1/p) <= 1.2/p`` for each ``p``."""
    out = []
    for p in p_values:
        if p < 2:
            raise ParameterError(f"the mean bound is stated for p >= 2, got {p!r}")
        mu = 1.0 / math.gamma(1.0 / p)
        out.append(V.interval("mu_bounds", {"p": p}, mu, 1.0 / p, 1.2 / p))
    return out
