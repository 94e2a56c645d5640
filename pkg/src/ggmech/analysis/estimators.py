"""Monte Carlo estimators for the error, tail and privacy bounds.

Every estimator draws from the stream it is handed, in fixed-size chunks,
so results depend only on (parameters, seed) and not on how the work is
scheduled.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from ..calibration import (
    PrivacyBudget,
    calibrate_composed,
    calibrate_sigma_ggauss,
    log_fn,
    privacy_loss_statistic,
)
from ..composed import composed_mechanism, count_large_coordinates, sv_config_for
from ..distributions import (
    lp_norm,
    sample_ggauss_batch,
    sample_ggauss_pq_batch,
    sample_laplace,
    sample_lp_sphere_batch,
    sample_univariate_ggauss,
)
from ..errors import ParameterError
from ..mechanisms import MechanismOutput
from ..sparse_vector import SvConfig, numeric_sparse_detailed, sv_accuracy_alpha
from ..streams import RandomStream
from . import verdicts as V
from .verdicts import ErrorReport, NormSummary, binomial_stderr

CHUNK_ELEMENTS = 1 << 20
QUANTILE_LEVELS = (0.5, 0.9, 0.99)


def _row_chunks(trials: int, k: int):
    rows = max(1, CHUNK_ELEMENTS // max(1, k))
    for start in range(0, trials, rows):
        yield min(rows, trials - start)


def _mean_se(values) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    n = values.size
    se = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return float(values.mean()), se


def fit_power_law(xs, ys) -> float:
    """Least-squares exponent ``s`` in ``y ~ c * x**s`` on log-log axes."""
    xs = np.log(np.asarray(xs, dtype=float))
    ys = np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(xs, ys, 1)[0])


# Error norms


def _norm_columns(errors: np.ndarray, p: float | None, q: float) -> dict[str, np.ndarray]:
    k = errors.shape[1]
    cols = {
        "l1/k": np.abs(errors).sum(axis=1) / k,
        f"lq/k^(1/q) (q={q:g})": lp_norm(errors, q) / k ** (1.0 / q),
        "linf": np.abs(errors).max(axis=1),
    }
    if p is not None:
        cols["lp"] = lp_norm(errors, p)
    return cols


def estimate_error_norms(mechanism, d, trials: int, stream: RandomStream, *, p: float | None = None,
                         q: float = 2.0, levels=QUANTILE_LEVELS, label: dict | None = None,
                         chunk: int = 512) -> ErrorReport:
    """Summaries of ``||d_tilde - d||`` over independent runs of ``mechanism``.

    ``mechanism(d, stream)`` returns a :class:`MechanismOutput` or an array.
    """
    if trials < 100:
        raise ParameterError(f"need at least 100 trials, got {trials}")
    d = np.asarray(d, dtype=float)
    collected: dict[str, list] = {}
    for start in range(0, trials, chunk):
        n = min(chunk, trials - start)
        errs = np.empty((n, d.size))
        for i in range(n):
            out = mechanism(d, stream)
            vals = out.values if isinstance(out, MechanismOutput) else np.asarray(out, dtype=float)
            errs[i] = vals - d
        for name, col in _norm_columns(errs, p, q).items():
            collected.setdefault(name, []).append(col)
    report = ErrorReport(mechanism=dict(label or {}), trials=int(trials), seed=stream.seed)
    for name, parts in collected.items():
        col = np.concatenate(parts)
        mean, se = _mean_se(col)
        qs = {float(lv): float(np.quantile(col, lv)) for lv in sorted(levels)}
        report.summaries[name] = NormSummary(mean, se, qs)
    return report


def ggauss_error_batch(n: int, k: int, p: float, sigma: float, truncate: bool,
                       stream: RandomStream) -> tuple[np.ndarray, np.ndarray]:
    """``n`` noise rows of the Generalized Gaussian mechanism and guard flags.

    Guarded rows are zeroed, matching a release of the true answers.
    """
    x = sample_ggauss_batch(n, k, p, sigma, stream)
    guard = (lp_norm(x, p) / sigma) ** p > 2.0 * k / p
    if truncate:
        x[guard] = 0.0
    return x, guard


def mean_l1_error(k: int, p: float, sigma: float, trials: int, stream: RandomStream,
                  truncate: bool = True) -> tuple[float, float]:
    """Mean and SE of ``||d_tilde - d||_1 / k`` for the Generalized Gaussian mechanism."""
    parts = []
    for n in _row_chunks(trials, k):
        x, _ = ggauss_error_batch(n, k, p, sigma, truncate, stream)
        parts.append(np.abs(x).mean(axis=1))
    return _mean_se(np.concatenate(parts))


# Sampler laws


def radius_law_check(k: int, p: float, trials: int, stream: RandomStream, sigma: float = 1.0,
                     mean_rtol: float = 0.01, var_rtol: float = 0.03) -> list[V.Verdict]:
    """``(||x||_p / sigma)^p`` has mean and variance ``k/p`` (it is Gamma(k/p))."""
    parts = [(lp_norm(sample_ggauss_batch(n, k, p, sigma, stream), p) / sigma) ** p
             for n in _row_chunks(trials, k)]
    r = np.concatenate(parts)
    params = {"k": k, "p": p, "sigma": sigma, "trials": trials}
    return [
        V.rel_close("radius_mean", params, float(r.mean()), k / p, mean_rtol),
        V.rel_close("radius_variance", params, float(r.var(ddof=1)), k / p, var_rtol),
    ]


def _ks(check, params, a, b, level):
    res = stats.ks_2samp(a, b)
    return V.exact_lower(check, dict(params, statistic=float(res.statistic), level=level),
                         float(res.pvalue), level, note="empirical is the two-sample KS p-value")


def reduction_checks(trials: int, stream: RandomStream, sigma: float = 1.0, k: int = 8,
                     p_pq: float = 4.0, level: float = 1e-3) -> list[V.Verdict]:
    """Two-sample KS tests for the special cases of the samplers.

    ``p = 1`` is Laplace with scale ``sigma``; ``p = 2`` is normal with
    standard deviation ``sigma / sqrt(2)``; the (p, q) sampler with
    ``q = p`` matches the iid sampler on ``||x||_p`` and ``|x_1|``.
    """
    out = []
    a = sample_univariate_ggauss(1.0, sigma, stream, size=trials)
    b = sample_laplace(sigma, stream, size=trials)
    out.append(_ks("reduction_laplace", {"p": 1, "sigma": sigma, "trials": trials}, a, b, level))
    a = sample_univariate_ggauss(2.0, sigma, stream, size=trials)
    b = stream.standard_normal(trials) * (sigma / math.sqrt(2.0))
    out.append(_ks("reduction_normal", {"p": 2, "sigma": sigma, "trials": trials}, a, b, level))
    n = max(1, trials // k)
    x = sample_ggauss_pq_batch(n, k, p_pq, p_pq, sigma, stream)
    y = sample_ggauss_batch(n, k, p_pq, sigma, stream)
    params = {"k": k, "p": p_pq, "q": p_pq, "sigma": sigma, "trials": n}
    out.append(_ks("reduction_pq_norm", params, lp_norm(x, p_pq), lp_norm(y, p_pq), level))
    out.append(_ks("reduction_pq_coordinate", params, np.abs(x[:, 0]), np.abs(y[:, 0]), level))
    return out


# Sphere caps


def _sphere_ratios(k, p, trials, stream, statistic):
    parts = []
    for n in _row_chunks(trials, k):
        x = sample_lp_sphere_batch(n, k, p, 1.0, stream)
        parts.append(statistic(x) / lp_norm(x, p))
    return np.concatenate(parts)


def _check_r(r):
    if not (0 <= r <= 1):
        raise ParameterError(f"r must lie in [0, 1], got {r!r}")


def sphere_cap_check(k: int, p: float, r_grid, trials: int, stream: RandomStream) -> list[V.Verdict]:
    """Empirical ``Pr[|x_1| >= r ||x||_p]`` against both closed-form caps."""
    for r in r_grid:
        _check_r(r)
    ratios = _sphere_ratios(k, p, trials, stream, lambda x: np.abs(x[:, 0]))
    out = []
    for r in r_grid:
        est = float(np.count_nonzero(ratios >= r)) / trials
        se = binomial_stderr(est, trials)
        params = {"k": k, "p": p, "r": r, "trials": trials}
        out.append(V.upper("sphere_cap_power", params, est, (1.0 - r ** p) ** ((k - 1) / p), se))
        out.append(V.upper("sphere_cap_exp", params, est, math.exp(-(k - 1) * r ** p / p), se))
    return out


def exact_circle_check(trials: int, stream: RandomStream, tolerance: float = 0.002) -> list[V.Verdict]:
    """On the unit circle ``Pr[|x_1| >= ||x||_2 / sqrt(2)] = 1/2`` exactly.

    The window is ``0.5 +/- max(tolerance, 5 SE)`` so small runs are not
    judged against a width only 10^6 draws can resolve.
    """
    r = 1.0 / math.sqrt(2.0)
    out = sphere_cap_check(2, 2.0, [r], trials, stream)
    est = out[0].empirical
    half = max(tolerance, 5.0 * 0.5 / math.sqrt(trials))
    out.append(V.interval("sphere_cap_circle", {"k": 2, "p": 2, "r": r, "trials": trials},
                          est, 0.5 - half, 0.5 + half))
    return out


def linf_union_check(k: int, p: float, r_grid, trials: int, stream: RandomStream) -> list[V.Verdict]:
    """Empirical ``Pr[||x||_inf >= r ||x||_p]`` against ``k exp(-(k-1) r^p / p)``."""
    for r in r_grid:
        _check_r(r)
    ratios = _sphere_ratios(k, p, trials, stream, lambda x: np.abs(x).max(axis=1))
    out = []
    for r in r_grid:
        est = float(np.count_nonzero(ratios >= r)) / trials
        se = binomial_stderr(est, trials)
        bound = k * math.exp(-(k - 1) * r ** p / p)
        note = "bound exceeds 1 (vacuous)" if bound > 1 else ""
        out.append(V.upper("linf_union", {"k": k, "p": p, "r": r, "trials": trials}, est, bound, se, note=note))
    return out


def linf_expectation_check(k: int, p: float, trials: int, stream: RandomStream) -> V.Verdict:
    """``E||x||_inf <= 5 (ln k)^{1/p} k^{-1/p} ||x||_p`` on the unit sphere."""
    ratios = _sphere_ratios(k, p, trials, stream, lambda x: np.abs(x).max(axis=1))
    mean, se = _mean_se(ratios)
    bound = 5.0 * math.log(k) ** (1.0 / p) / k ** (1.0 / p)
    return V.upper("linf_expectation", {"k": k, "p": p, "trials": trials}, mean, bound, se)


def negative_association_check(k: int, p: float, q: float, r: float, trials: int,
                               stream: RandomStream) -> V.Verdict:
    """Correlation of the exceedance indicators ``|x_i| >= r ||x||_p`` for two coordinates.

    Negatively associated indicators have non-positive correlation; the
    verdict allows three standard errors (``3/sqrt(trials)``).
    """
    a_parts, b_parts = [], []
    for n in _row_chunks(trials, k):
        x = sample_ggauss_pq_batch(n, k, p, q, 1.0, stream)
        nrm = lp_norm(x, p)
        a_parts.append(np.abs(x[:, 0]) >= r * nrm)
        b_parts.append(np.abs(x[:, 1]) >= r * nrm)
    a = np.concatenate(a_parts).astype(float)
    b = np.concatenate(b_parts).astype(float)
    corr = float(np.corrcoef(a, b)[0, 1]) if a.std() > 0 and b.std() > 0 else 0.0
    return V.upper("negative_association", {"k": k, "p": p, "q": q, "r": r, "trials": trials},
                   corr, 0.0, 1.0 / math.sqrt(trials))


# Privacy loss


def privacy_loss_tail(k: int, p: float, sigma: float, epsilon: float, delta: float, shift,
                      trials: int, stream: RandomStream) -> V.Verdict:
    """Estimate ``Pr[(||x - shift||_p^p - ||x||_p^p) / sigma^p > epsilon]``.

    Passes when the estimate minus two standard errors is at most ``delta``.
    """
    shift = np.broadcast_to(np.asarray(shift, dtype=float), (k,))
    if np.max(np.abs(shift)) > 1:
        raise ParameterError("the shift must lie in [-1, 1]^k")
    hits = 0
    for n in _row_chunks(trials, k):
        x = sample_ggauss_batch(n, k, p, sigma, stream)
        hits += int(np.count_nonzero(privacy_loss_statistic(x, shift, sigma, p) > epsilon))
    est = hits / trials
    se = binomial_stderr(est, trials)
    params = {"k": k, "p": p, "sigma": sigma, "epsilon": epsilon, "delta": delta,
              "shift_linf": float(np.max(np.abs(shift))), "trials": trials}
    return V.est_minus_2se("privacy_loss_tail", params, est, delta, se)


# Sub-gamma tails


def gamma_tail_check(sampler, spec, mean: float, t_grid, trials: int, stream: RandomStream,
                     label: str = "gamma_tail") -> list[V.Verdict]:
    """Exceedance of ``mean +/- (sqrt(2vt) + ct)`` against ``e^{-t}``.

    ``sampler(n, stream)`` returns ``n`` draws of the variable under test.
    """
    x = np.asarray(sampler(int(trials), stream), dtype=float)
    out = []
    for t in t_grid:
        thr = spec.tail_threshold(mean, t)
        hit = x > thr if spec.side == "right" else x < thr
        est = float(np.count_nonzero(hit)) / trials
        se = binomial_stderr(est, trials)
        out.append(V.upper(label, {"side": spec.side, "v": spec.v, "c": spec.c, "t": t,
                                   "trials": trials}, est, math.exp(-t), se))
    return out


# Error tails of the mechanisms


def lq_chain_check(k: int, p: float, sigma: float, q_set, trials: int, stream: RandomStream,
                   tolerance: float = 0.0) -> list[V.Verdict]:
    """``E||x||_q / k^{1/q} <= (2k/p)^{1/p} sigma k^{-1/p}`` for truncated noise."""
    xs = [ggauss_error_batch(n, k, p, sigma, True, stream)[0] for n in _row_chunks(trials, k)]
    out = []
    bound = (2.0 * k / p) ** (1.0 / p) * sigma * k ** (-1.0 / p) * (1.0 + tolerance)
    for q in q_set:
        vals = np.concatenate([lp_norm(x, q) for x in xs]) / k ** (1.0 / q)
        mean, se = _mean_se(vals)
        out.append(V.upper("lq_chain", {"k": k, "p": p, "q": q, "sigma": sigma, "trials": trials},
                           mean, bound, se))
    return out


def linf_tail_check(k: int, p: float, budget: PrivacyBudget, t_grid, trials: int,
                            stream: RandomStream, *, c: float = 2.0, c_sigma: float = 1.0,
                            log_base: str = "natural", composed_trials: int | None = None,
                            c_composed: float | None = None) -> list[V.Verdict]:
    """l_inf tail of the Generalized Gaussian and composed mechanisms.

    Three families of verdicts, all one-sided with 3-SE slack:

    * untruncated noise at ``c t sqrt(kp) log^{1/p}k sqrt(log 1/delta)/eps``
      against ``e^{-t^p log k} + e^{-0.001 k/p}``;
    * the truncated mechanism at the same threshold against
      ``e^{-t^p log k}``;
    * the composed mechanism (if ``composed_trials``) at
      ``c_composed t sqrt(kp log 1/delta) (log log k)^{1/p}/eps`` against
      ``e^{-log^t k}``.  With ``c_composed=None`` the threshold is the
      calibrated ``alpha_SV`` and the constant it implies is recorded.
    """
    log = log_fn(log_base)
    logk = log(k)
    sigma = calibrate_sigma_ggauss(k, p, budget, c_sigma, log_base)
    linf_raw, linf_trunc = [], []
    for n in _row_chunks(trials, k):
        x, guard = ggauss_error_batch(n, k, p, sigma, False, stream)
        m = np.abs(x).max(axis=1)
        linf_raw.append(m)
        linf_trunc.append(np.where(guard, 0.0, m))
    linf_raw = np.concatenate(linf_raw)
    linf_trunc = np.concatenate(linf_trunc)
    scale = math.sqrt(k * p) * logk ** (1.0 / p) * math.sqrt(log(1.0 / budget.delta)) / budget.epsilon
    out = []
    for t in t_grid:
        thr = c * t * scale
        tail = math.exp(-t ** p * logk)
        params = {"k": k, "p": p, "epsilon": budget.epsilon, "delta": budget.delta, "c": c,
                  "c_sigma": c_sigma, "t": t, "threshold": thr, "sigma": sigma, "trials": trials}
        for name, vals, bound in (("tail_untruncated", linf_raw, tail + math.exp(-0.001 * k / p)),
                                  ("tail_truncated", linf_trunc, tail)):
            est = float(np.count_nonzero(vals >= thr)) / trials
            v = V.upper(name, params, est, bound, binomial_stderr(est, trials))
            if not v.passed:
                v.note = "constant mismatch at the configured c"
            out.append(v)
    if composed_trials:
        d = np.zeros(k)
        for t in t_grid:
            if t <= 0:
                continue
            params_c = calibrate_composed(k, p, budget, t, c_sigma, log_base)
            unit = t * math.sqrt(k * p * log(1.0 / budget.delta)) * log(logk) ** (1.0 / p) / budget.epsilon
            cc = params_c.alpha_sv / unit if c_composed is None else c_composed
            thr = cc * unit
            hits = 0
            for _ in range(composed_trials):
                run = composed_mechanism(d, p, budget, t, stream, params=params_c)
                hits += bool(np.max(np.abs(run.output.values)) >= thr)
            est = hits / composed_trials
            v = V.upper("tail_composed",
                        {"k": k, "p": p, "epsilon": budget.epsilon, "delta": budget.delta,
                         "c": cc, "t": t, "threshold": thr, "trials": composed_trials},
                        est, math.exp(-logk ** t), binomial_stderr(est, composed_trials))
            if not v.passed:
                v.note = "constant mismatch at the configured c"
            out.append(v)
    return out


# Sparse vector


def sv_accuracy_check(k: int, n_large: int, budget_count: int, beta: float, eps: float, delta: float,
                      invocations: int, stream: RandomStream, alpha: float | None = None,
                      large_factor: float = 10.0) -> list[V.Verdict]:
    """Accuracy when few entries are large, plus the exact-zero and budget properties.

    The large entries sit at evenly spaced indices with value
    ``large_factor * alpha``; all others are 0.
    """
    probe = SvConfig.from_budget(1.0, budget_count, eps, delta, beta)
    if alpha is None:
        alpha = sv_accuracy_alpha(k, beta, probe.comparison_noise_scale)
    config = SvConfig.from_budget(alpha, budget_count, eps, delta, beta)
    d = np.zeros(k)
    d[np.linspace(0, k - 1, n_large).astype(int)] = large_factor * alpha
    failures = 0
    zero_ok = True
    max_flags = 0
    for _ in range(invocations):
        out, flagged = numeric_sparse_detailed(d, config, stream)
        failures += bool(np.max(np.abs(out - d)) >= alpha)
        mask = np.ones(k, dtype=bool)
        mask[flagged] = False
        zero_ok &= bool(np.all(out[mask] == 0.0))
        max_flags = max(max_flags, flagged.size)
    est = failures / invocations
    params = {"k": k, "n_large": n_large, "budget_count": budget_count, "beta": beta, "eps": eps,
              "delta": delta, "alpha": alpha, "invocations": invocations}
    return [
        V.upper("sv_accuracy", params, est, beta, binomial_stderr(est, invocations)),
        V.exact_upper("sv_exact_zero", params, 0.0 if zero_ok else 1.0, 0.0,
                      note="1 if any below-threshold output was nonzero"),
        V.exact_upper("sv_budget", params, float(max_flags), float(budget_count)),
    ]


def sv_tail_check(k: int, budget_count: int, eps: float, delta: float, beta: float, t_grid,
                  invocations: int, stream: RandomStream, alpha: float | None = None) -> list[V.Verdict]:
    """Unconditional tail on a dense input (every entry equal to ``alpha``).

    The event is ``||out - d||_inf > max(||d||_inf, t sqrt(k ln(1/delta))/eps)``
    (strict, so that unanswered entries, whose error is exactly
    ``||d||_inf``, do not count).  The fitted rate
    ``c_t = ln(k / P_t) / t`` must be positive for ``Pr <= k e^{-c t}``.
    ``alpha`` defaults to ``sqrt(k ln(1/delta))/eps``, small enough that
    the answered entries, not ``||d||_inf``, decide the event.
    """
    unit = math.sqrt(k * math.log(1.0 / delta)) / eps
    if alpha is None:
        alpha = unit
    config = SvConfig.from_budget(alpha, budget_count, eps, delta, beta)
    d = np.full(k, alpha)
    errs = np.empty(invocations)
    for i in range(invocations):
        errs[i] = np.max(np.abs(numeric_sparse_detailed(d, config, stream)[0] - d))
    out = []
    rates = []
    for t in t_grid:
        thr = max(alpha, t * unit)
        est = float(np.count_nonzero(errs > thr)) / invocations
        rate = math.inf if est == 0 else math.log(k / est) / t
        rates.append(rate)
        out.append(V.info("sv_tail", {"k": k, "t": t, "threshold": thr, "invocations": invocations},
                          est, note=f"fitted rate ln(k/P)/t = {rate:.4g}"))
    fitted = min(rates)
    out.append(V.Verdict("sv_tail_rate", {"k": k, "t_grid": list(t_grid)}, fitted, 0.0, None,
                         "empirical > bound", V.PASS if fitted > 0 else V.FAIL))
    return out


# Scaling


def scaling_exponent_check(grid, k_of, p_of, budget: PrivacyBudget, trials: int, stream: RandomStream,
                           lower: float, upper_: float, check: str, c_sigma: float = 1.0) -> list[V.Verdict]:
    """Fit ``mean ||d_tilde - d||_1 / k ~ c x^s`` over ``grid`` and bound ``s``.

    ``k_of(x)`` and ``p_of(x)`` map a grid point to the mechanism's (k, p).
    """
    means = []
    out = []
    for x in grid:
        k, p = int(k_of(x)), float(p_of(x))
        sigma = calibrate_sigma_ggauss(k, p, budget, c_sigma)
        m, se = mean_l1_error(k, p, sigma, trials, stream)
        means.append(m)
        out.append(V.info(f"{check}_cell", {"k": k, "p": p, "sigma": sigma, "trials": trials}, m, stderr=se))
    s = fit_power_law(grid, means)
    v = V.interval(check, {"grid": list(grid), "epsilon": budget.epsilon, "delta": budget.delta,
                           "trials": trials}, s, lower, upper_)
    if not v.passed:
        v.note = "shape violation"
    out.append(v)
    return out


# Composed mechanism


def composed_decomposition_check(k: int, p: float, budget: PrivacyBudget, t: float, runs: int,
                                 stream: RandomStream, c_sigma: float = 1.0,
                                 log_base: str = "natural", count_rate_cap: float = 0.01) -> list[V.Verdict]:
    """Union-bound decomposition of the composed mechanism's accuracy.

    (a) guard frequency against ``e^{-0.001 k/p}``; (b) frequency with which
    more than ``c_SV`` coordinates of ``x`` exceed ``alpha_SV/2``, capped
    at ``count_rate_cap``; (c) ``Pr[||d_tilde - d||_inf >= alpha_SV]``
    against ``beta_SV`` plus the rate in (b).
    """
    params = calibrate_composed(k, p, budget, t, c_sigma, log_base)
    sv_config_for(params)
    d = np.zeros(k)
    truncated = over_budget = failures = 0
    counts = np.empty(runs)
    for i in range(runs):
        run = composed_mechanism(d, p, budget, t, stream, params=params)
        truncated += run.truncated
        counts[i] = count_large_coordinates(run.noise, params.alpha_sv / 2.0)
        over_budget += counts[i] > params.c_sv
        failures += bool(np.max(np.abs(run.output.values)) >= params.alpha_sv)
    base = {"k": k, "p": p, "epsilon": budget.epsilon, "delta": budget.delta, "t": t, "runs": runs,
            "sigma": params.sigma, "alpha_sv": params.alpha_sv, "c_sv": params.c_sv,
            "beta_sv": params.beta_sv}
    a = truncated / runs
    b = over_budget / runs
    c_rate = failures / runs
    logk = log_fn(log_base)(k)
    out = [
        V.upper("composed_truncation", base, a, math.exp(-0.001 * k / p), binomial_stderr(a, runs)),
        V.exact_upper("composed_large_count", base, b, count_rate_cap),
        V.upper("composed_count_trend", base, b, math.exp(-2.0 * logk ** t), binomial_stderr(b, runs)),
        V.upper("composed_accuracy", base, c_rate, params.beta_sv + b, binomial_stderr(c_rate, runs)),
        V.info("composed_large_fraction", base, float(counts.mean()) / k, bound=params.c_sv / k),
    ]
    if params.degenerate:
        out[3].note = "c_SV floored at 1; only the unconditional sparse-vector tail is claimed"
    return out
