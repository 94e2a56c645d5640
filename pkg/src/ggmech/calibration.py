"""Noise-scale calibration for the Generalized Gaussian mechanisms.

The analytic formulas only pin the scale up to a constant, so the constant
is an explicit argument (``c_sigma``, default 1).  :func:`empirical_calibrate`
is a constant-free alternative that searches for the smallest scale whose
Monte Carlo privacy-loss tail stays below ``delta``.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, asdict
from typing import Literal

import numpy as np

from .distributions import sample_ggauss_batch
from .errors import CalibrationError, ParameterError
from .streams import RandomStream

LogBase = Literal["natural", "base2"]

FAMILIES = ("laplace", "gaussian", "ggauss", "ggauss_pq", "composed")

# Default range constants; see validate_params and calibrate_composed.
C_RANGE = 0.001
T_RANGE_CONSTANT = 1.0


def log_fn(log_base: str):
    if log_base == "natural":
        return math.log
    if log_base == "base2":
        return math.log2
    raise ParameterError(f"log_base must be 'natural' or 'base2', got {log_base!r}")


@dataclass(frozen=True)
class PrivacyBudget:
    epsilon: float
    delta: float

    def __post_init__(self):
        if not (self.epsilon > 0) or not math.isfinite(self.epsilon):
            raise ParameterError(f"epsilon must be positive, got {self.epsilon!r}")
        if not (0 < self.delta < 1):
            raise ParameterError(f"delta must lie in (0, 1), got {self.delta!r}")

    def scaled(self, eps_factor: float, delta_factor: float) -> "PrivacyBudget":
        return PrivacyBudget(self.epsilon * eps_factor, self.delta * delta_factor)


@dataclass(frozen=True)
class MechanismSpec:
    """Which mechanism to run and with what shape parameters."""

    family: str
    sigma: float = 1.0
    p: float = 2.0
    q: float | None = None
    truncate: bool = True
    c_sigma: float = 1.0
    log_base: str = "natural"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown mechanism family {self.family!r}")
        if not (self.sigma > 0):
            raise ParameterError(f"sigma must be positive, got {self.sigma!r}")
        if not (self.p >= 1):
            raise ParameterError(f"p must be >= 1, got {self.p!r}")
        if self.q is not None and not (1 <= self.q <= self.p):
            raise ParameterError(f"q must satisfy 1 <= q <= p, got q={self.q!r}, p={self.p!r}")
        if self.family == "ggauss_pq" and self.q is None:
            raise ParameterError("the ggauss_pq family needs q")
        if not (self.c_sigma > 0):
            raise ParameterError(f"c_sigma must be positive, got {self.c_sigma!r}")
        log_fn(self.log_base)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ComposedParams:
    sigma: float
    alpha_sv: float
    c_sv: int
    eps_sv: float
    delta_sv: float
    beta_sv: float
    t: float
    c_sv_raw: float = float("nan")
    warnings: tuple[str, ...] = ()

    @property
    def degenerate(self) -> bool:
        """True when the sparse-vector budget had to be floored at 1."""
        return self.c_sv_raw < 1

    def as_dict(self) -> dict:
        d = asdict(self)
        d["warnings"] = list(self.warnings)
        d["degenerate"] = self.degenerate
        return d


@dataclass
class Validation:
    p: int
    warnings: dict[str, str] = field(default_factory=dict)

    @property
    def in_range(self) -> bool:
        return not self.warnings


def round_p(p: float) -> int:
    """Smallest even integer that is >= max(p, 4)."""
    if not (p >= 1) or not math.isfinite(p):
        raise ParameterError(f"p must be a finite number >= 1, got {p!r}")
    even = 2 * math.ceil(p / 2.0)
    return int(max(4, even))


def validate_params(k: int, p: float, budget: PrivacyBudget, c_range: float = C_RANGE,
                    log_base: str = "natural") -> Validation:
    """Normalize ``p`` and report parameters outside the analysed regime.

    Range problems are warnings keyed by name (``p_above_log_k``,
    ``delta_above_max``, ``delta_below_min``) so that callers can probe
    out-of-range settings on purpose.
    """
    if int(k) != k or k < 2:
        raise ParameterError(f"k must be an integer >= 2, got {k!r}")
    if not isinstance(budget, PrivacyBudget):
        raise ParameterError("budget must be a PrivacyBudget")
    log = log_fn(log_base)
    pn = round_p(p)
    out = Validation(p=pn)
    if pn > log(k):
        out.warnings["p_above_log_k"] = f"p={pn} exceeds log(k)={log(k):.4g}"
    if budget.delta > 1.0 / k:
        out.warnings["delta_above_max"] = f"delta={budget.delta:.4g} exceeds 1/k={1.0 / k:.4g}"
    lower = 2.0 ** (-c_range * k / pn)
    if budget.delta < lower:
        out.warnings["delta_below_min"] = (
            f"delta={budget.delta:.4g} is below 2^(-{c_range:g} k/p)={lower:.4g}")
    return out


def sigma_branches(k: int, p: float, budget: PrivacyBudget, log_base: str = "natural",
                   k_exponent: float = 0.5) -> tuple[float, float]:
    """The two candidate scales whose max sets sigma (before the constant)."""
    log = log_fn(log_base)
    kk = float(k) ** k_exponent
    first = kk * math.sqrt(p * log(1.0 / budget.delta)) / budget.epsilon
    second = kk / budget.epsilon ** (1.0 / p)
    return first, second


def calibrate_sigma_ggauss(k: int, p: float, budget: PrivacyBudget, c_sigma: float = 1.0,
                           log_base: str = "natural") -> float:
    """``c_sigma * max(sqrt(k p log(1/delta)) / eps, sqrt(k) / eps**(1/p))``."""
    if not (c_sigma > 0):
        raise ParameterError(f"c_sigma must be positive, got {c_sigma!r}")
    return c_sigma * max(sigma_branches(k, p, budget, log_base))


def calibrate_sigma_pq(k: int, p: float, q: float, budget: PrivacyBudget, c_sigma: float = 1.0,
                       log_base: str = "natural") -> float:
    """As :func:`calibrate_sigma_ggauss` with ``sqrt(k)`` replaced by ``k^{1/2+1/p-1/q}``."""
    if q > p:
        raise ParameterError(f"q must not exceed p (got q={q}, p={p})")
    if not (q >= 1):
        raise ParameterError(f"q must be >= 1, got {q!r}")
    if not (c_sigma > 0):
        raise ParameterError(f"c_sigma must be positive, got {c_sigma!r}")
    expo = 0.5 + 1.0 / p - 1.0 / q
    return c_sigma * max(sigma_branches(k, p, budget, log_base, k_exponent=expo))


def calibrate_composed(k: int, p: float, budget: PrivacyBudget, t: float, c_sigma: float = 1.0,
                       log_base: str = "natural", t_constant: float = T_RANGE_CONSTANT) -> ComposedParams:
    """Parameters of the Generalized Gaussian plus sparse-vector mechanism.

    Half of epsilon and a third of delta go to each of the noise and the
    sparse-vector step; the remaining third of delta covers the truncation
    guard.
    """
    if int(k) != k or k < 16:
        raise ParameterError(f"the composed mechanism needs k >= 16, got {k!r}")
    if not (t >= 0) or not math.isfinite(t):
        raise ParameterError(f"t must be a nonnegative number, got {t!r}")
    log = log_fn(log_base)
    logk = log(k)
    loglogk = log(logk)
    if loglogk <= 0:
        raise ParameterError(f"log log k must be positive, got {loglogk:.4g} for k={k}")
    warnings = []
    t_max = t_constant * logk / loglogk
    if t > t_max:
        warnings.append(f"t={t:g} exceeds {t_constant:g} log k / log log k = {t_max:.4g}")
    noise_budget = budget.scaled(0.5, 1.0 / 3.0)
    sigma = calibrate_sigma_ggauss(k, p, noise_budget, c_sigma, log_base)
    c_raw = 4.0 * k / logk ** (2.0 + 2.0 * t)
    c_sv = int(min(k, max(1, math.floor(c_raw))))
    if c_raw < 1:
        warnings.append(f"c_SV={c_raw:.4g} < 1 floored to 1; only the unconditional tail applies")
    beta_sv = math.exp(-logk ** t) / 2.0
    if beta_sv < sys.float_info.min:
        # e^{-log^t k} underflows for large t; keep beta a valid probability
        warnings.append(f"beta_SV underflows at t={t:g}; clamped to {sys.float_info.min:.3g}")
        beta_sv = sys.float_info.min
    return ComposedParams(
        sigma=sigma,
        alpha_sv=12.0 * t * loglogk ** (1.0 / p) * sigma,
        c_sv=c_sv,
        eps_sv=budget.epsilon / 2.0,
        delta_sv=budget.delta / 3.0,
        beta_sv=beta_sv,
        t=float(t),
        c_sv_raw=c_raw,
        warnings=tuple(warnings),
    )


def calibration_record(k: int, p: float, budget: PrivacyBudget, *, family: str = "ggauss",
                       q: float | None = None, t: float | None = None, c_sigma: float = 1.0,
                       log_base: str = "natural", c_range: float = C_RANGE) -> dict:
    """JSON-ready summary of a calibration: inputs, branches, sigma, warnings."""
    val = validate_params(k, p, budget, c_range=c_range, log_base=log_base)
    rec = {
        "inputs": {"k": int(k), "p": p, "q": q, "t": t, "epsilon": budget.epsilon,
                   "delta": budget.delta, "c_sigma": c_sigma, "log_base": log_base,
                   "family": family},
        "p_normalized": val.p,
        "warnings": [f"{key}: {msg}" for key, msg in val.warnings.items()],
    }
    if family == "composed":
        if t is None:
            raise ParameterError("the composed family needs t")
        params = calibrate_composed(k, val.p, budget, t, c_sigma, log_base)
        b1, b2 = sigma_branches(k, val.p, budget.scaled(0.5, 1.0 / 3.0), log_base)
        rec["branches"] = {"privacy": c_sigma * b1, "small_epsilon": c_sigma * b2}
        rec["sigma"] = params.sigma
        rec["composed"] = params.as_dict()
        rec["warnings"].extend(params.warnings)
    elif family == "ggauss_pq":
        if q is None:
            raise ParameterError("the ggauss_pq family needs q")
        expo = 0.5 + 1.0 / val.p - 1.0 / q
        b1, b2 = sigma_branches(k, val.p, budget, log_base, k_exponent=expo)
        rec["branches"] = {"privacy": c_sigma * b1, "small_epsilon": c_sigma * b2}
        rec["sigma"] = calibrate_sigma_pq(k, val.p, q, budget, c_sigma, log_base)
    elif family == "ggauss":
        b1, b2 = sigma_branches(k, val.p, budget, log_base)
        rec["branches"] = {"privacy": c_sigma * b1, "small_epsilon": c_sigma * b2}
        rec["sigma"] = calibrate_sigma_ggauss(k, val.p, budget, c_sigma, log_base)
    else:
        raise ParameterError(f"calibration is not defined for family {family!r}")
    return rec


# Privacy-loss statistic


def privacy_loss_statistic(x, shift, sigma: float, p: float) -> np.ndarray:
    """``(||x - shift||_p^p - ||x||_p^p) / sigma^p`` for each row of ``x``."""
    x = np.asarray(x, dtype=float)
    z = x / sigma
    zs = z - np.asarray(shift, dtype=float) / sigma
    return np.sum(np.abs(zs) ** p - np.abs(z) ** p, axis=-1)


class _UnitShiftLoss:
    """Privacy-loss statistic for the all-ones shift at many scales.

    Draws ``z ~ GGauss(p, 1)`` once and reuses it for every candidate sigma,
    so that the search compares scales on common random numbers.  For even
    integer ``p`` the statistic is the polynomial
    ``sum_{j>=1} C(p, j) (-s)^j S_{p-j}`` in ``s = 1/sigma`` with per-row
    power sums ``S_m = sum_i z_i^m``, which avoids the cancellation in
    ``(z - s)^p - z^p``.
    """

    def __init__(self, k, p, trials, stream, chunk=1 << 21):
        self.p = p
        self.trials = int(trials)
        self.even = float(p).is_integer() and int(p) % 2 == 0
        rows = max(1, chunk // k)
        if self.even:
            pi = int(p)
            sums = np.empty((self.trials, pi), dtype=float)
            for start in range(0, self.trials, rows):
                n = min(rows, self.trials - start)
                z = sample_ggauss_batch(n, k, p, 1.0, stream)
                zp = np.ones_like(z)
                for m in range(pi):
                    sums[start:start + n, m] = zp.sum(axis=1)
                    zp *= z
            self.power_sums = sums
        else:
            self.z = np.concatenate([
                sample_ggauss_batch(min(rows, self.trials - s), k, p, 1.0, stream)
                for s in range(0, self.trials, rows)])

    def values(self, sigma):
        s = 1.0 / sigma
        if self.even:
            pi = int(self.p)
            out = np.zeros(self.trials)
            for j in range(1, pi + 1):
                out += math.comb(pi, j) * (-s) ** j * self.power_sums[:, pi - j]
            return out
        return np.sum(np.abs(self.z - s) ** self.p - np.abs(self.z) ** self.p, axis=1)

    def exceedance(self, sigma, epsilon):
        hits = int(np.count_nonzero(self.values(sigma) > epsilon))
        est = hits / self.trials
        se = math.sqrt(est * (1.0 - est) / self.trials)
        return est, se


def empirical_calibrate(k: int, p: float, budget: PrivacyBudget, trials: int, stream: RandomStream,
                        rel_tol: float = 0.04, max_doublings: int = 60) -> float:
    """Smallest scale (within ``rel_tol``) passing the Monte Carlo privacy check.

    A scale passes when the estimated probability that the all-ones-shift
    privacy loss exceeds ``epsilon``, plus two standard errors, is at most
    ``delta``.  Candidates are the lattice ``(1 + rel_tol)**n``, shared by
    every budget so that results at different budgets are comparable.  The
    search brackets in jumps of about a factor 2 from the analytic scale,
    then walks down from the passing end and stops at the first failure.
    """
    if int(trials) != trials or trials < 1:
        raise ParameterError(f"trials must be a positive integer, got {trials!r}")
    if not (0 < rel_tol < 1):
        raise ParameterError(f"rel_tol must lie in (0, 1), got {rel_tol!r}")
    loss = _UnitShiftLoss(int(k), p, trials, stream)
    eps, delta = budget.epsilon, budget.delta
    log_ratio = math.log1p(rel_tol)
    jump = max(1, math.ceil(math.log(2.0) / log_ratio))

    def scale(n):
        return math.exp(n * log_ratio)

    def passes(n):
        est, se = loss.exceedance(scale(n), eps)
        return est + 2.0 * se <= delta

    hi = round(math.log(calibrate_sigma_ggauss(k, p, budget)) / log_ratio)
    steps = 0
    while not passes(hi):
        hi += jump
        steps += 1
        if steps > max_doublings:
            est, se = loss.exceedance(scale(hi), eps)
            raise CalibrationError("no passing scale found while doubling",
                                   {"sigma": scale(hi), "estimate": est, "stderr": se, "delta": delta})
    lo = hi - jump
    steps = 0
    while passes(lo):
        hi, lo = lo, lo - jump
        steps += 1
        if steps > max_doublings:
            raise CalibrationError("every scale passes; the loss is degenerate",
                                   {"sigma": scale(lo), "delta": delta})
    best = hi
    n = hi - 1
    while n > lo and passes(n):
        best = n
        n -= 1
    return scale(best)
